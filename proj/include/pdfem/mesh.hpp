#pragma once

#include <array>
#include <vector>

#include "pdfem/grid.hpp"

namespace pdfem {

/// Node/element lists for inclusion meshes and conformal reference meshes.
/// Immutable by convention once built; generators and the MSH reader are the
/// only producers.
struct UnstructuredMesh {
    struct Element {
        ElementType type;
        int tag = 0;                 // physical tag; 1 = matrix, 2 = inclusion by convention
        std::array<int, 8> conn{};   // first element_node_count(type) entries used
    };

    int dim = 2;
    std::vector<Vec3> nodes;
    std::vector<Element> elements;
    /// Set by the fiber generator when nodes may lie outside the periodic box
    /// and need modular wrapping at location time.
    bool periodic_overflow = false;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }

    void element_coords(int e, Vec3* out) const;
    double element_measure(int e) const;
    /// Total measure: area (2D) or volume (3D).
    double measure() const;
    /// Characteristic length h_inc: the longest element edge in the mesh.
    double characteristic_length() const;

    /// Connectivity in range, positive measures. Throws ValidationError /
    /// GeometryError.
    void validate() const;

    /// Append another mesh (node indices offset). Tags are preserved.
    void append(const UnstructuredMesh& other);
};

UnstructuredMesh gen_disk_mesh(const Vec3& center, double diameter, double target_h);

UnstructuredMesh gen_square_mesh(const Vec3& center, double side, double target_h);

struct FiberSpec {
    std::vector<Vec3> control_points;
    double radius = 0.0;
    int axial_subdivisions = 30;
    int circumferential_subdivisions = 12;
    bool periodic_wrap = false;

    void validate() const;
};

/// Tet mesh of a tube swept along a Catmull-Rom centerline with
/// parallel-transport frames. Cross sections are concentric-ring disk
/// triangulations; prism slabs between sections split into tets with a
/// smallest-index diagonal rule so shared faces agree.
UnstructuredMesh gen_fiber_mesh(const FiberSpec& spec);

/// Uniform-parameter Catmull-Rom evaluation through the given points,
/// t in [0, 1] across the whole chain. Exposed for tests.
Vec3 catmull_rom(const std::vector<Vec3>& pts, double t);

} // namespace pdfem
