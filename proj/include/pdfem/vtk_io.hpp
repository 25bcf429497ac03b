#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pdfem/grid.hpp"
#include "pdfem/mesh.hpp"

namespace pdfem {

/// Named nodal or cell fields; vectors carry components per entry.
struct VtkField {
    std::string name;
    int components = 1;
    std::vector<double> values;
};

/// Legacy ASCII writer, DATASET STRUCTURED_POINTS. Point fields need
/// node_count * components values, cell fields cell_count * components.
void write_vtk_grid(const std::string& path, const StructuredGrid& grid,
                    const std::vector<VtkField>& point_fields,
                    const std::vector<VtkField>& cell_fields = {});

/// Legacy ASCII writer, DATASET UNSTRUCTURED_GRID.
void write_vtk_mesh(const std::string& path, const UnstructuredMesh& mesh,
                    const std::vector<VtkField>& point_fields,
                    const std::vector<VtkField>& cell_fields = {});

} // namespace pdfem
