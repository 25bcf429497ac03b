#include "pdfem/vtk_io.hpp"

#include <cstdio>
#include <fstream>

namespace pdfem {

namespace {

void write_fields(std::ofstream& out, const std::vector<VtkField>& fields, long count,
                  const char* section) {
    if (fields.empty()) return;
    out << section << " " << count << "\n";
    char buf[64];
    for (const auto& f : fields) {
        if (f.values.size() != static_cast<size_t>(count) * f.components)
            throw ValidationError("vtk: field '" + f.name + "' has wrong size");
        if (f.components == 1) {
            out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : f.values) {
                std::snprintf(buf, sizeof buf, "%.12g\n", v);
                out << buf;
            }
        } else {
            out << "VECTORS " << f.name << " double\n";
            for (long i = 0; i < count; ++i) {
                const double x = f.values[i * f.components];
                const double y = f.components > 1 ? f.values[i * f.components + 1] : 0.0;
                const double z = f.components > 2 ? f.values[i * f.components + 2] : 0.0;
                std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g\n", x, y, z);
                out << buf;
            }
        }
    }
}

} // namespace

void write_vtk_grid(const std::string& path, const StructuredGrid& grid,
                    const std::vector<VtkField>& point_fields,
                    const std::vector<VtkField>& cell_fields) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    const auto& n = grid.resolution();
    const Vec3 h = grid.h();
    const Vec3& o = grid.origin();

    out << "# vtk DataFile Version 3.0\npdfem structured field\nASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << n[0] + 1 << " " << n[1] + 1 << " "
        << (grid.dim() == 3 ? n[2] + 1 : 1) << "\n";
    out << "ORIGIN " << o[0] << " " << o[1] << " " << o[2] << "\n";
    out << "SPACING " << h[0] << " " << h[1] << " " << (grid.dim() == 3 ? h[2] : 1.0) << "\n";
    write_fields(out, point_fields, grid.node_count(), "POINT_DATA");
    write_fields(out, cell_fields, grid.cell_count(), "CELL_DATA");
}

void write_vtk_mesh(const std::string& path, const UnstructuredMesh& mesh,
                    const std::vector<VtkField>& point_fields,
                    const std::vector<VtkField>& cell_fields) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);

    out << "# vtk DataFile Version 3.0\npdfem unstructured field\nASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.node_count() << " double\n";
    char buf[96];
    for (const Vec3& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g\n", p[0], p[1], p[2]);
        out << buf;
    }

    long list_len = 0;
    for (const auto& el : mesh.elements) list_len += 1 + element_node_count(el.type);
    out << "CELLS " << mesh.element_count() << " " << list_len << "\n";
    for (const auto& el : mesh.elements) {
        out << element_node_count(el.type);
        for (int a = 0; a < element_node_count(el.type); ++a) out << ' ' << el.conn[a];
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.element_count() << "\n";
    for (const auto& el : mesh.elements) {
        int code = 0;
        switch (el.type) {
            case ElementType::tri3: code = 5; break;
            case ElementType::qua4: code = 9; break;
            case ElementType::tet4: code = 10; break;
            case ElementType::hex8: code = 12; break;
        }
        out << code << '\n';
    }
    write_fields(out, point_fields, mesh.node_count(), "POINT_DATA");
    write_fields(out, cell_fields, mesh.element_count(), "CELL_DATA");
}

} // namespace pdfem
