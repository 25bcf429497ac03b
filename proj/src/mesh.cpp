#include "pdfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdfem/elements.hpp"

namespace pdfem {

namespace {

constexpr int kEdgeTable[4][12][2] = {
    /* tri3 */ {{0, 1}, {1, 2}, {2, 0}},
    /* qua4 */ {{0, 1}, {1, 2}, {2, 3}, {3, 0}},
    /* tet4 */ {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}},
    /* hex8 */
    {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}},
};

int edge_count(ElementType t) {
    switch (t) {
        case ElementType::tri3: return 3;
        case ElementType::qua4: return 4;
        case ElementType::tet4: return 6;
        case ElementType::hex8: return 12;
    }
    return 0;
}

double dist(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace

void UnstructuredMesh::element_coords(int e, Vec3* out) const {
    const Element& el = elements[e];
    const int nn = element_node_count(el.type);
    for (int a = 0; a < nn; ++a) out[a] = nodes[el.conn[a]];
}

double UnstructuredMesh::element_measure(int e) const {
    Vec3 c[8];
    element_coords(e, c);
    return elements::element_measure(elements[e].type, std::span<const Vec3>(c, element_node_count(elements[e].type)));
}

double UnstructuredMesh::measure() const {
    double v = 0.0;
    for (int e = 0; e < element_count(); ++e) v += element_measure(e);
    return v;
}

double UnstructuredMesh::characteristic_length() const {
    double h = 0.0;
    for (const Element& el : elements) {
        const int idx = static_cast<int>(el.type);
        for (int k = 0; k < edge_count(el.type); ++k)
            h = std::max(h, dist(nodes[el.conn[kEdgeTable[idx][k][0]]],
                                 nodes[el.conn[kEdgeTable[idx][k][1]]]));
    }
    return h;
}

void UnstructuredMesh::validate() const {
    const int nn = node_count();
    for (int e = 0; e < element_count(); ++e) {
        const Element& el = elements[e];
        for (int a = 0; a < element_node_count(el.type); ++a)
            if (el.conn[a] < 0 || el.conn[a] >= nn)
                throw ValidationError("mesh: element " + std::to_string(e) +
                                      " references node out of range");
        if (!(element_measure(e) > 0.0))
            throw GeometryError("mesh: element " + std::to_string(e) + " has non-positive measure");
    }
}

void UnstructuredMesh::append(const UnstructuredMesh& other) {
    const int offset = node_count();
    dim = std::max(dim, other.dim);
    periodic_overflow = periodic_overflow || other.periodic_overflow;
    nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
    for (Element el : other.elements) {
        for (int a = 0; a < element_node_count(el.type); ++a) el.conn[a] += offset;
        elements.push_back(el);
    }
}

// ---------------------------------------------------------------------------
// Disk triangulation: concentric rings with 6k nodes on ring k, a center fan,
// and a spiderweb pattern between rings. Shared with the fiber cross-section.

namespace {

struct DiskLayout {
    std::vector<std::array<double, 2>> pts; // unit radius
    std::vector<std::array<int, 3>> tris;
};

int ring_start(int k) { return k == 0 ? 0 : 1 + 3 * k * (k - 1); }

DiskLayout unit_disk_layout(int rings) {
    DiskLayout d;
    d.pts.push_back({0.0, 0.0});
    for (int k = 1; k <= rings; ++k) {
        const double rk = static_cast<double>(k) / rings;
        const int ck = 6 * k;
        for (int t = 0; t < ck; ++t) {
            const double th = 2.0 * M_PI * t / ck;
            d.pts.push_back({rk * std::cos(th), rk * std::sin(th)});
        }
    }
    // center fan
    for (int j = 0; j < 6; ++j)
        d.tris.push_back({ring_start(1) + j, ring_start(1) + (j + 1) % 6, 0});
    for (int k = 2; k <= rings; ++k) {
        const int go = ring_start(k), gi = ring_start(k - 1);
        const int co = 6 * k, ci = 6 * (k - 1);
        for (int s = 0; s < 6; ++s)
            for (int j = 0; j < k; ++j) {
                const int o0 = go + (s * k + j) % co;
                const int o1 = go + (s * k + j + 1) % co;
                const int i0 = gi + (s * (k - 1) + j) % ci;
                d.tris.push_back({o0, o1, i0});
                if (j < k - 1) {
                    const int i1 = gi + (s * (k - 1) + j + 1) % ci;
                    d.tris.push_back({o1, i1, i0});
                }
            }
    }
    return d;
}

} // namespace

UnstructuredMesh gen_disk_mesh(const Vec3& center, double diameter, double target_h) {
    if (!(diameter > 0.0) || !(target_h > 0.0))
        throw ValidationError("gen_disk_mesh: diameter and target_h must be > 0");
    if (target_h >= diameter)
        throw ValidationError("gen_disk_mesh: target_h >= diameter yields a degenerate mesh");
    const double r = 0.5 * diameter;

    int rings = std::max(1, static_cast<int>(std::ceil(1.5 * r / target_h)));
    for (;; ++rings) {
        const DiskLayout d = unit_disk_layout(rings);
        UnstructuredMesh m;
        m.dim = 2;
        m.nodes.reserve(d.pts.size());
        for (const auto& p : d.pts)
            m.nodes.push_back({center[0] + r * p[0], center[1] + r * p[1], 0.0});
        for (const auto& t : d.tris)
            m.elements.push_back({ElementType::tri3, 2, {t[0], t[1], t[2]}});
        if (m.characteristic_length() <= target_h) {
            m.validate();
            return m;
        }
    }
}

UnstructuredMesh gen_square_mesh(const Vec3& center, double side, double target_h) {
    if (!(side > 0.0) || !(target_h > 0.0))
        throw ValidationError("gen_square_mesh: side and target_h must be > 0");
    const int m = std::max(1, static_cast<int>(std::ceil(side / target_h - 1e-12)));
    const double h = side / m;
    const double x0 = center[0] - 0.5 * side, y0 = center[1] - 0.5 * side;

    UnstructuredMesh mesh;
    mesh.dim = 2;
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i) mesh.nodes.push_back({x0 + i * h, y0 + j * h, 0.0});
    const auto node = [m](int i, int j) { return j * (m + 1) + i; };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            mesh.elements.push_back(
                {ElementType::qua4, 2, {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)}});
    mesh.validate();
    return mesh;
}

// ---------------------------------------------------------------------------
// Swept fiber

void FiberSpec::validate() const {
    if (!(radius > 0.0)) throw ValidationError("fiber: radius must be > 0");
    if (control_points.size() < 2) throw ValidationError("fiber: need >= 2 control points");
    if (circumferential_subdivisions < 3)
        throw ValidationError("fiber: need >= 3 circumferential subdivisions");
    if (axial_subdivisions < 1) throw ValidationError("fiber: need >= 1 axial subdivision");
}

namespace {

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double vdot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 vcross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 vnormalize(const Vec3& a) {
    const double n = std::sqrt(vdot(a, a));
    if (!(n > 0.0)) throw GeometryError("fiber: zero-length tangent");
    return scale(a, 1.0 / n);
}

struct SplineSample {
    Vec3 pos, tangent;
};

SplineSample sample_catmull_rom(const std::vector<Vec3>& pts, double t) {
    const int nseg = static_cast<int>(pts.size()) - 1;
    const double ft = std::clamp(t, 0.0, 1.0) * nseg;
    int seg = std::min(static_cast<int>(ft), nseg - 1);
    const double u = ft - seg;

    const auto at = [&](int i) -> Vec3 {
        if (i < 0) return sub(scale(pts[0], 2.0), pts[1]); // mirrored phantom ends
        if (i >= static_cast<int>(pts.size()))
            return sub(scale(pts.back(), 2.0), pts[pts.size() - 2]);
        return pts[i];
    };
    const Vec3 p0 = at(seg - 1), p1 = at(seg), p2 = at(seg + 1), p3 = at(seg + 2);

    const double u2 = u * u, u3 = u2 * u;
    SplineSample s;
    for (int c = 0; c < 3; ++c) {
        const double a = -p0[c] + 3 * p1[c] - 3 * p2[c] + p3[c];
        const double b = 2 * p0[c] - 5 * p1[c] + 4 * p2[c] - p3[c];
        const double cc = -p0[c] + p2[c];
        s.pos[c] = 0.5 * (a * u3 + b * u2 + cc * u + 2 * p1[c]);
        s.tangent[c] = 0.5 * (3 * a * u2 + 2 * b * u + cc) * nseg;
    }
    return s;
}

} // namespace

Vec3 catmull_rom(const std::vector<Vec3>& pts, double t) { return sample_catmull_rom(pts, t).pos; }

UnstructuredMesh gen_fiber_mesh(const FiberSpec& spec) {
    spec.validate();
    const int ns = spec.axial_subdivisions; // slabs; ns+1 sections

    std::vector<SplineSample> stations(ns + 1);
    for (int j = 0; j <= ns; ++j) {
        stations[j] = sample_catmull_rom(spec.control_points, static_cast<double>(j) / ns);
        stations[j].tangent = vnormalize(stations[j].tangent);
    }

    // parallel-transport frames via the double-reflection method
    std::vector<Vec3> e1(ns + 1), e2(ns + 1);
    {
        const Vec3 t0 = stations[0].tangent;
        int least = 0;
        for (int a = 1; a < 3; ++a)
            if (std::abs(t0[a]) < std::abs(t0[least])) least = a;
        Vec3 seed{0, 0, 0};
        seed[least] = 1.0;
        e1[0] = vnormalize(sub(seed, scale(t0, vdot(seed, t0))));
        e2[0] = vcross(t0, e1[0]);
    }
    for (int j = 0; j < ns; ++j) {
        const Vec3 v1 = sub(stations[j + 1].pos, stations[j].pos);
        const double c1 = vdot(v1, v1);
        if (!(c1 > 0.0)) throw GeometryError("fiber: coincident centerline samples");
        const Vec3 e1r = sub(e1[j], scale(v1, 2.0 * vdot(v1, e1[j]) / c1));
        const Vec3 tr = sub(stations[j].tangent, scale(v1, 2.0 * vdot(v1, stations[j].tangent) / c1));
        const Vec3 v2 = sub(stations[j + 1].tangent, tr);
        const double c2 = vdot(v2, v2);
        e1[j + 1] = c2 > 1e-28 ? sub(e1r, scale(v2, 2.0 * vdot(v2, e1r) / c2)) : e1r;
        e1[j + 1] = vnormalize(sub(e1[j + 1], scale(stations[j + 1].tangent,
                                                    vdot(e1[j + 1], stations[j + 1].tangent))));
        e2[j + 1] = vcross(stations[j + 1].tangent, e1[j + 1]);
    }

    const int rings = std::max(1, (spec.circumferential_subdivisions + 5) / 6);
    const DiskLayout cross = unit_disk_layout(rings);
    const int np = static_cast<int>(cross.pts.size());

    UnstructuredMesh m;
    m.dim = 3;
    m.periodic_overflow = spec.periodic_wrap;
    m.nodes.reserve(static_cast<size_t>(ns + 1) * np);
    for (int j = 0; j <= ns; ++j)
        for (const auto& p : cross.pts)
            m.nodes.push_back(add(stations[j].pos,
                                  add(scale(e1[j], spec.radius * p[0]), scale(e2[j], spec.radius * p[1]))));

    // prisms between consecutive sections, split into tets; quad-face
    // diagonals follow the smallest-global-index rule so neighbours agree
    const auto emit_prism = [&m](int v0, int v1, int v2, int v3, int v4, int v5) {
        int p[6] = {v0, v1, v2, v3, v4, v5};
        static const int rot[6][6] = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
                                      {3, 5, 4, 0, 2, 1}, {5, 4, 3, 2, 1, 0}, {4, 3, 5, 1, 0, 2}};
        int best = 0;
        for (int r = 1; r < 6; ++r)
            if (p[rot[r][0]] < p[rot[best][0]]) best = r;
        int q[6];
        for (int a = 0; a < 6; ++a) q[a] = p[rot[best][a]];
        const auto tet = [&m](int a, int b, int c, int d) {
            m.elements.push_back({ElementType::tet4, 2, {a, b, c, d}});
        };
        if (std::min(q[1], q[5]) < std::min(q[2], q[4])) {
            tet(q[0], q[1], q[2], q[5]);
            tet(q[0], q[1], q[5], q[4]);
            tet(q[0], q[4], q[5], q[3]);
        } else {
            tet(q[0], q[1], q[2], q[4]);
            tet(q[0], q[4], q[2], q[5]);
            tet(q[0], q[4], q[5], q[3]);
        }
    };

    for (int j = 0; j < ns; ++j) {
        const int base0 = j * np, base1 = (j + 1) * np;
        for (const auto& t : cross.tris)
            emit_prism(base0 + t[0], base0 + t[1], base0 + t[2],
                       base1 + t[0], base1 + t[1], base1 + t[2]);
    }

    for (int e = 0; e < m.element_count(); ++e)
        if (!(m.element_measure(e) > 0.0))
            throw GeometryError("gen_fiber_mesh: inverted element (self-intersecting sweep?)");
    return m;
}

} // namespace pdfem
