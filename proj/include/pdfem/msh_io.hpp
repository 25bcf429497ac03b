#pragma once

#include <iosfwd>
#include <string>

#include "pdfem/mesh.hpp"

namespace pdfem {

/// Read a Gmsh MSH 2.2 ASCII stream. Keeps tri3/qua4/tet4/hex8 (type codes
/// 2, 3, 4, 5) with their physical tags; other element types are skipped.
/// Throws ParseError with the offending line number; `source` names the
/// stream in diagnostics.
UnstructuredMesh read_msh(std::istream& in, const std::string& source = "<msh>");

UnstructuredMesh read_msh_file(const std::string& path);

/// Write MSH 2.2 ASCII. Nodes are renumbered 1..N; coordinates keep 17
/// significant digits so a read/write cycle is bit-stable.
void write_msh(std::ostream& out, const UnstructuredMesh& mesh);

void write_msh_file(const std::string& path, const UnstructuredMesh& mesh);

} // namespace pdfem
