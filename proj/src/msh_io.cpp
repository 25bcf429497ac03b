#include "pdfem/msh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace pdfem {

namespace {

// node counts for the MSH type codes we may encounter and skip
int msh_type_nodes(int code) {
    switch (code) {
        case 1: return 2;   // line2
        case 2: return 3;   // tri3
        case 3: return 4;   // qua4
        case 4: return 4;   // tet4
        case 5: return 8;   // hex8
        case 6: return 6;   // prism6
        case 7: return 5;   // pyramid5
        case 8: return 3;   // line3
        case 9: return 6;   // tri6
        case 10: return 9;  // qua9
        case 11: return 10; // tet10
        case 15: return 1;  // point
        default: return -1;
    }
}

struct LineReader {
    std::istream& in;
    const std::string& source;
    long line_no = 0;
    std::string line{};

    bool next() {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source, line_no, msg); }

    std::string must_next(const std::string& what) {
        if (!next()) throw ParseError(source, line_no, "unexpected end of file, expected " + what);
        return line;
    }
};

} // namespace

UnstructuredMesh read_msh(std::istream& in, const std::string& source) {
    LineReader r{in, source};
    UnstructuredMesh mesh;
    std::unordered_map<long, int> node_id_map;
    bool saw_format = false, saw_nodes = false, saw_elements = false;

    while (r.next()) {
        if (r.line == "$MeshFormat") {
            const std::string fmt = r.must_next("version line");
            std::istringstream is(fmt);
            std::string version;
            int file_type = -1, data_size = -1;
            if (!(is >> version >> file_type >> data_size))
                r.fail("malformed $MeshFormat line");
            if (version != "2.2")
                r.fail("unsupported MSH version " + version + " (only 2.2 ASCII is supported)");
            if (file_type != 0) r.fail("binary MSH files are not supported");
            if (r.must_next("$EndMeshFormat") != "$EndMeshFormat") r.fail("expected $EndMeshFormat");
            saw_format = true;
        } else if (r.line == "$Nodes") {
            if (!saw_format) r.fail("$Nodes before $MeshFormat");
            long count = -1;
            {
                std::istringstream is(r.must_next("node count"));
                if (!(is >> count) || count < 0) r.fail("malformed node count");
            }
            mesh.nodes.reserve(count);
            for (long i = 0; i < count; ++i) {
                std::istringstream is(r.must_next("node line"));
                long id;
                double x, y, z;
                if (!(is >> id >> x >> y >> z)) r.fail("malformed node line");
                if (!node_id_map.emplace(id, static_cast<int>(mesh.nodes.size())).second)
                    r.fail("duplicate node id " + std::to_string(id));
                mesh.nodes.push_back({x, y, z});
            }
            if (r.must_next("$EndNodes") != "$EndNodes") r.fail("expected $EndNodes");
            saw_nodes = true;
        } else if (r.line == "$Elements") {
            if (!saw_nodes) r.fail("$Elements before $Nodes");
            long count = -1;
            {
                std::istringstream is(r.must_next("element count"));
                if (!(is >> count) || count < 0) r.fail("malformed element count");
            }
            bool any3d = false;
            for (long i = 0; i < count; ++i) {
                std::istringstream is(r.must_next("element line"));
                long id;
                int type, ntags;
                if (!(is >> id >> type >> ntags) || ntags < 0) r.fail("malformed element line");
                const int nn = msh_type_nodes(type);
                if (nn < 0) r.fail("unknown element type code " + std::to_string(type));
                int tag = 0;
                for (int t = 0; t < ntags; ++t) {
                    long v;
                    if (!(is >> v)) r.fail("missing element tag");
                    if (t == 0) tag = static_cast<int>(v);
                }
                const bool keep = type >= 2 && type <= 5;
                UnstructuredMesh::Element el;
                el.tag = tag;
                switch (type) {
                    case 2: el.type = ElementType::tri3; break;
                    case 3: el.type = ElementType::qua4; break;
                    case 4: el.type = ElementType::tet4; break;
                    case 5: el.type = ElementType::hex8; break;
                    default: break;
                }
                for (int a = 0; a < nn; ++a) {
                    long nid;
                    if (!(is >> nid)) r.fail("element has too few node references");
                    if (keep) {
                        auto it = node_id_map.find(nid);
                        if (it == node_id_map.end())
                            r.fail("element references unknown node " + std::to_string(nid));
                        el.conn[a] = it->second;
                    }
                }
                if (keep) {
                    mesh.elements.push_back(el);
                    any3d = any3d || element_dim(el.type) == 3;
                }
            }
            if (r.must_next("$EndElements") != "$EndElements") r.fail("expected $EndElements");
            mesh.dim = any3d ? 3 : 2;
            saw_elements = true;
        } else if (!r.line.empty() && r.line[0] == '$') {
            // unknown section: skip to its matching $End
            const std::string end = "$End" + r.line.substr(1);
            for (;;) {
                if (!r.next()) r.fail("unterminated section, expected " + end);
                if (r.line == end) break;
            }
        } else {
            r.fail("unexpected content outside any section");
        }
    }

    if (!saw_format) throw ParseError(source, r.line_no, "missing $MeshFormat section");
    if (!saw_nodes) throw ParseError(source, r.line_no, "missing $Nodes section");
    if (!saw_elements) throw ParseError(source, r.line_no, "missing $Elements section");
    mesh.validate();
    return mesh;
}

UnstructuredMesh read_msh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open mesh file: " + path);
    return read_msh(in, path);
}

void write_msh(std::ostream& out, const UnstructuredMesh& mesh) {
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << mesh.nodes.size() << "\n";
    char buf[96];
    for (size_t i = 0; i < mesh.nodes.size(); ++i) {
        const Vec3& p = mesh.nodes[i];
        std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g\n", i + 1, p[0], p[1], p[2]);
        out << buf;
    }
    out << "$EndNodes\n$Elements\n" << mesh.elements.size() << "\n";
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& el = mesh.elements[e];
        int code = 0;
        switch (el.type) {
            case ElementType::tri3: code = 2; break;
            case ElementType::qua4: code = 3; break;
            case ElementType::tet4: code = 4; break;
            case ElementType::hex8: code = 5; break;
        }
        out << e + 1 << ' ' << code << " 2 " << el.tag << ' ' << el.tag;
        for (int a = 0; a < element_node_count(el.type); ++a) out << ' ' << el.conn[a] + 1;
        out << '\n';
    }
    out << "$EndElements\n";
}

void write_msh_file(const std::string& path, const UnstructuredMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    write_msh(out, mesh);
}

} // namespace pdfem
