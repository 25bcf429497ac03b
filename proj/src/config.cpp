#include "pdfem/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "pdfem/msh_io.hpp"

namespace pdfem {

using nlohmann::json;

namespace {

const json* maybe(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> vector_at(const json& j, const std::string& path, int want = -1) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> v;
    for (size_t i = 0; i < j.size(); ++i)
        v.push_back(number_at(j[i], path + "/" + std::to_string(i)));
    if (want >= 0 && static_cast<int>(v.size()) != want)
        throw ConfigError(path, "expected " + std::to_string(want) + " entries");
    return v;
}

int axis_of(const std::string& side, const std::string& path, bool& max_side) {
    if (side == "x_min") { max_side = false; return 0; }
    if (side == "x_max") { max_side = true; return 0; }
    if (side == "y_min") { max_side = false; return 1; }
    if (side == "y_max") { max_side = true; return 1; }
    if (side == "z_min") { max_side = false; return 2; }
    if (side == "z_max") { max_side = true; return 2; }
    throw ConfigError(path, "unknown side '" + side + "'");
}

} // namespace

ProblemConfig ProblemConfig::from_json(const json& j) {
    ProblemConfig c;
    if (!j.is_object()) throw ConfigError("/", "config root must be an object");

    if (const json* p = maybe(j, "physics")) {
        const std::string s = string_at(*p, "/physics");
        if (s == "thermal") c.physics = Physics::thermal;
        else if (s == "elastic") c.physics = Physics::elastic;
        else throw ConfigError("/physics", "must be 'thermal' or 'elastic'");
    }
    if (const json* p = maybe(j, "dimension")) {
        c.dimension = int_at(*p, "/dimension");
        if (c.dimension != 2 && c.dimension != 3)
            throw ConfigError("/dimension", "must be 2 or 3");
    }

    const json* grid = maybe(j, "grid");
    if (!grid) throw ConfigError("/grid", "missing required section");
    if (const json* p = maybe(*grid, "resolution")) {
        if (p->is_array()) {
            const auto v = vector_at(*p, "/grid/resolution", c.dimension);
            for (int a = 0; a < c.dimension; ++a) c.resolution[a] = static_cast<int>(v[a]);
        } else {
            const int n = int_at(*p, "/grid/resolution");
            c.resolution = {n, n, n};
        }
    } else {
        throw ConfigError("/grid/resolution", "missing required entry");
    }
    if (const json* p = maybe(*grid, "origin")) {
        const auto v = vector_at(*p, "/grid/origin", c.dimension);
        for (int a = 0; a < c.dimension; ++a) c.origin[a] = v[a];
    }
    if (const json* p = maybe(*grid, "side_lengths")) {
        const auto v = vector_at(*p, "/grid/side_lengths", c.dimension);
        for (int a = 0; a < c.dimension; ++a) c.side_lengths[a] = v[a];
    }

    if (const json* mats = maybe(j, "materials")) {
        if (const json* m = maybe(*mats, "matrix")) {
            if (const json* p = maybe(*m, "lambda")) c.lambda_mat = number_at(*p, "/materials/matrix/lambda");
            if (const json* p = maybe(*m, "bulk_modulus"))
                c.bulk_mat = number_at(*p, "/materials/matrix/bulk_modulus");
            if (const json* p = maybe(*m, "poisson_ratio"))
                c.poisson = number_at(*p, "/materials/matrix/poisson_ratio");
        }
        const json* inc = maybe(*mats, "inclusion");
        const json* con = maybe(*mats, "contrast");
        if (inc && con)
            throw ConfigError("/materials",
                              "contrast and explicit inclusion coefficients are mutually exclusive");
        if (inc) {
            if (const json* p = maybe(*inc, "lambda"))
                c.lambda_inc = number_at(*p, "/materials/inclusion/lambda");
            if (const json* p = maybe(*inc, "bulk_modulus"))
                c.bulk_inc = number_at(*p, "/materials/inclusion/bulk_modulus");
            if (const json* p = maybe(*inc, "poisson_ratio")) {
                const double nu = number_at(*p, "/materials/inclusion/poisson_ratio");
                if (nu != c.poisson)
                    throw ConfigError("/materials/inclusion/poisson_ratio",
                                      "both phases share one poisson ratio");
            }
        }
        if (con) c.contrast = number_at(*con, "/materials/contrast");
    }

    if (const json* incs = maybe(j, "inclusions")) {
        if (!incs->is_array()) throw ConfigError("/inclusions", "expected an array");
        for (size_t i = 0; i < incs->size(); ++i) {
            const std::string base = "/inclusions/" + std::to_string(i);
            const json& e = (*incs)[i];
            InclusionConfig ic;
            if (const json* p = maybe(e, "mesh_file")) {
                ic.mesh_file = string_at(*p, base + "/mesh_file");
            } else if (const json* p = maybe(e, "shape")) {
                ic.shape = string_at(*p, base + "/shape");
                if (ic.shape == "disk") {
                    if (const json* q = maybe(e, "center")) {
                        const auto v = vector_at(*q, base + "/center", c.dimension);
                        for (int a = 0; a < c.dimension; ++a) ic.center[a] = v[a];
                    }
                    if (const json* q = maybe(e, "diameter"))
                        ic.diameter = number_at(*q, base + "/diameter");
                    else
                        throw ConfigError(base + "/diameter", "missing required entry");
                    if (const json* q = maybe(e, "target_h"))
                        ic.target_h = number_at(*q, base + "/target_h");
                    else
                        throw ConfigError(base + "/target_h", "missing required entry");
                } else if (ic.shape == "square") {
                    if (const json* q = maybe(e, "center")) {
                        const auto v = vector_at(*q, base + "/center", c.dimension);
                        for (int a = 0; a < c.dimension; ++a) ic.center[a] = v[a];
                    }
                    if (const json* q = maybe(e, "side")) ic.side = number_at(*q, base + "/side");
                    else throw ConfigError(base + "/side", "missing required entry");
                    if (const json* q = maybe(e, "target_h"))
                        ic.target_h = number_at(*q, base + "/target_h");
                    else
                        throw ConfigError(base + "/target_h", "missing required entry");
                } else if (ic.shape == "fiber") {
                    const json* cp = maybe(e, "control_points");
                    if (!cp) throw ConfigError(base + "/control_points", "missing required entry");
                    if (!cp->is_array() || cp->size() < 2)
                        throw ConfigError(base + "/control_points", "need >= 2 points");
                    for (size_t k = 0; k < cp->size(); ++k) {
                        const auto v =
                            vector_at((*cp)[k], base + "/control_points/" + std::to_string(k), 3);
                        ic.fiber.control_points.push_back({v[0], v[1], v[2]});
                    }
                    if (const json* q = maybe(e, "radius"))
                        ic.fiber.radius = number_at(*q, base + "/radius");
                    else
                        throw ConfigError(base + "/radius", "missing required entry");
                    if (const json* q = maybe(e, "axial_subdivisions"))
                        ic.fiber.axial_subdivisions = int_at(*q, base + "/axial_subdivisions");
                    if (const json* q = maybe(e, "circumferential_subdivisions"))
                        ic.fiber.circumferential_subdivisions =
                            int_at(*q, base + "/circumferential_subdivisions");
                    if (const json* q = maybe(e, "periodic_wrap"))
                        ic.fiber.periodic_wrap = q->is_boolean() && q->get<bool>();
                } else {
                    throw ConfigError(base + "/shape",
                                      "unknown shape '" + ic.shape + "' (disk, square, fiber)");
                }
            } else {
                throw ConfigError(base, "need either 'shape' or 'mesh_file'");
            }
            c.inclusions.push_back(std::move(ic));
        }
    }

    const json* bc = maybe(j, "bc");
    if (!bc) throw ConfigError("/bc", "missing required section");
    const json* kind = maybe(*bc, "kind");
    if (!kind) throw ConfigError("/bc/kind", "missing required entry");
    const std::string ks = string_at(*kind, "/bc/kind");
    if (ks == "kubc") c.bc_kind = BcKind::kubc;
    else if (ks == "subc") c.bc_kind = BcKind::subc;
    else if (ks == "periodic") c.bc_kind = BcKind::periodic;
    else if (ks == "dirichlet_neumann") c.bc_explicit = true;
    else throw ConfigError("/bc/kind", "must be kubc, subc, periodic or dirichlet_neumann");

    const int m = c.physics == Physics::thermal ? c.dimension : (c.dimension == 2 ? 3 : 6);
    if (!c.bc_explicit) {
        for (const char* key : {"gradient", "flux", "strain", "stress", "macro"})
            if (const json* p = maybe(*bc, key)) c.macro = vector_at(*p, std::string("/bc/") + key, m);
    } else {
        const int d = dofs_per_node(c.physics, c.dimension);
        if (const json* p = maybe(*bc, "dirichlet")) {
            if (!p->is_array()) throw ConfigError("/bc/dirichlet", "expected an array");
            for (size_t i = 0; i < p->size(); ++i) {
                const std::string base = "/bc/dirichlet/" + std::to_string(i);
                ExplicitBc::Side s;
                s.axis = axis_of(string_at((*p)[i].at("side"), base + "/side"), base + "/side",
                                 s.max_side);
                const json* v = maybe((*p)[i], "value");
                if (!v) throw ConfigError(base + "/value", "missing required entry");
                s.value = v->is_array() ? vector_at(*v, base + "/value", d)
                                        : std::vector<double>(d, number_at(*v, base + "/value"));
                c.explicit_bc.dirichlet.push_back(std::move(s));
            }
        }
        if (const json* p = maybe(*bc, "neumann")) {
            if (!p->is_array()) throw ConfigError("/bc/neumann", "expected an array");
            for (size_t i = 0; i < p->size(); ++i) {
                const std::string base = "/bc/neumann/" + std::to_string(i);
                ExplicitBc::Side s;
                s.axis = axis_of(string_at((*p)[i].at("side"), base + "/side"), base + "/side",
                                 s.max_side);
                const json* v = maybe((*p)[i], "flux");
                if (!v) v = maybe((*p)[i], "traction");
                if (!v) throw ConfigError(base, "need 'flux' (thermal) or 'traction' (elastic)");
                s.value = v->is_array() ? vector_at(*v, base, d)
                                        : std::vector<double>(d, number_at(*v, base + "/flux"));
                c.explicit_bc.neumann.push_back(std::move(s));
            }
        }
        if (const json* p = maybe(*bc, "body_source"))
            c.explicit_bc.body_source = number_at(*p, "/bc/body_source");
    }

    if (const json* s = maybe(j, "solver")) {
        if (const json* p = maybe(*s, "tol")) c.solver.tol = number_at(*p, "/solver/tol");
        if (const json* p = maybe(*s, "max_iter"))
            c.solver.max_iter = int_at(*p, "/solver/max_iter");
        if (const json* p = maybe(*s, "preconditioner")) {
            const std::string pc = string_at(*p, "/solver/preconditioner");
            if (pc == "ic0") c.solver.preconditioner = Preconditioner::ic0;
            else if (pc == "jacobi") c.solver.preconditioner = Preconditioner::jacobi;
            else if (pc == "none") c.solver.preconditioner = Preconditioner::none;
            else throw ConfigError("/solver/preconditioner", "must be ic0, jacobi or none");
        }
        if (!(c.solver.tol > 0)) throw ConfigError("/solver/tol", "must be > 0");
    }

    if (const json* p = maybe(j, "threads")) c.threads = int_at(*p, "/threads");

    if (const json* o = maybe(j, "output")) {
        if (const json* p = maybe(*o, "vtk")) c.out_vtk = string_at(*p, "/output/vtk");
        if (const json* p = maybe(*o, "json")) c.out_json = string_at(*p, "/output/json");
        if (const json* p = maybe(*o, "csv")) c.out_csv = string_at(*p, "/output/csv");
        if (const json* p = maybe(*o, "mesh_vtk"))
            c.out_mesh_vtk = string_at(*p, "/output/mesh_vtk");
    }

    // cross-field validation
    if (c.physics == Physics::thermal && !(c.lambda_mat > 0))
        throw ConfigError("/materials/matrix/lambda", "must be > 0");
    if (c.physics == Physics::elastic && !(c.bulk_mat > 0))
        throw ConfigError("/materials/matrix/bulk_modulus", "must be > 0");
    if (c.physics == Physics::elastic && !(c.poisson > -1.0 && c.poisson < 0.5))
        throw ConfigError("/materials/matrix/poisson_ratio", "must lie in (-1, 0.5)");
    if (c.contrast && !(*c.contrast > 0)) throw ConfigError("/materials/contrast", "must be > 0");
    return c;
}

DenseMatrix ProblemConfig::coef_mat() const {
    if (physics == Physics::thermal) return DenseMatrix::identity(dimension, lambda_mat);
    return elements::elastic_D(bulk_mat, poisson,
                               dimension == 2 ? elements::ElasticModel::plane_strain
                                              : elements::ElasticModel::three_d);
}

DenseMatrix ProblemConfig::coef_inc() const {
    if (physics == Physics::thermal) {
        double li = lambda_mat;
        if (contrast) li = lambda_mat * *contrast;
        else if (lambda_inc) li = *lambda_inc;
        return DenseMatrix::identity(dimension, li);
    }
    double ki = bulk_mat;
    if (contrast) ki = bulk_mat * *contrast;
    else if (bulk_inc) ki = *bulk_inc;
    return elements::elastic_D(ki, poisson,
                               dimension == 2 ? elements::ElasticModel::plane_strain
                                              : elements::ElasticModel::three_d);
}

UnstructuredMesh ProblemConfig::build_inclusion_mesh() const {
    UnstructuredMesh merged;
    merged.dim = dimension;
    for (const auto& ic : inclusions) {
        UnstructuredMesh m;
        if (!ic.mesh_file.empty()) {
            m = read_msh_file(ic.mesh_file);
        } else if (ic.shape == "disk") {
            m = gen_disk_mesh(ic.center, ic.diameter, ic.target_h);
        } else if (ic.shape == "square") {
            m = gen_square_mesh(ic.center, ic.side, ic.target_h);
        } else if (ic.shape == "fiber") {
            m = gen_fiber_mesh(ic.fiber);
        }
        merged.append(m);
    }
    return merged;
}

PdfemProblem ProblemConfig::build_problem() const {
    PdfemProblem p;
    p.grid = StructuredGrid::make(dimension, resolution, origin, side_lengths);
    p.physics = physics;
    p.coef_mat = coef_mat();
    p.coef_inc = coef_inc();
    p.inclusion = build_inclusion_mesh();
    p.periodic = bc_kind == BcKind::periodic && !bc_explicit;
    p.solver = solver;
    return p;
}

nlohmann::json ProblemConfig::to_effective_json() const {
    json j;
    j["physics"] = physics_name(physics);
    j["dimension"] = dimension;
    j["grid"]["resolution"] = std::vector<int>(resolution.begin(), resolution.begin() + dimension);
    j["grid"]["origin"] = std::vector<double>(origin.begin(), origin.begin() + dimension);
    j["grid"]["side_lengths"] =
        std::vector<double>(side_lengths.begin(), side_lengths.begin() + dimension);
    if (physics == Physics::thermal) {
        j["materials"]["matrix"]["lambda"] = lambda_mat;
        if (contrast) j["materials"]["contrast"] = *contrast;
        else j["materials"]["inclusion"]["lambda"] = lambda_inc ? *lambda_inc : lambda_mat;
    } else {
        j["materials"]["matrix"]["bulk_modulus"] = bulk_mat;
        j["materials"]["matrix"]["poisson_ratio"] = poisson;
        if (contrast) j["materials"]["contrast"] = *contrast;
        else j["materials"]["inclusion"]["bulk_modulus"] = bulk_inc ? *bulk_inc : bulk_mat;
    }
    j["inclusions"] = json::array();
    for (const auto& ic : inclusions) {
        json e;
        if (!ic.mesh_file.empty()) {
            e["mesh_file"] = ic.mesh_file;
        } else {
            e["shape"] = ic.shape;
            if (ic.shape == "disk") {
                e["center"] = std::vector<double>(ic.center.begin(), ic.center.begin() + dimension);
                e["diameter"] = ic.diameter;
                e["target_h"] = ic.target_h;
            } else if (ic.shape == "square") {
                e["center"] = std::vector<double>(ic.center.begin(), ic.center.begin() + dimension);
                e["side"] = ic.side;
                e["target_h"] = ic.target_h;
            } else {
                e["radius"] = ic.fiber.radius;
                e["axial_subdivisions"] = ic.fiber.axial_subdivisions;
                e["circumferential_subdivisions"] = ic.fiber.circumferential_subdivisions;
                e["periodic_wrap"] = ic.fiber.periodic_wrap;
                json cps = json::array();
                for (const auto& p : ic.fiber.control_points)
                    cps.push_back(std::vector<double>{p[0], p[1], p[2]});
                e["control_points"] = cps;
            }
        }
        j["inclusions"].push_back(e);
    }
    if (bc_explicit) {
        j["bc"]["kind"] = "dirichlet_neumann";
        j["bc"]["body_source"] = explicit_bc.body_source;
    } else {
        j["bc"]["kind"] = bc_name(bc_kind);
        if (!macro.empty()) j["bc"]["macro"] = macro;
    }
    j["solver"]["tol"] = solver.tol;
    j["solver"]["max_iter"] = solver.max_iter;
    j["solver"]["preconditioner"] = solver.preconditioner == Preconditioner::ic0 ? "ic0"
                                    : solver.preconditioner == Preconditioner::jacobi ? "jacobi"
                                                                                      : "none";
    j["threads"] = threads;
    if (!out_vtk.empty()) j["output"]["vtk"] = out_vtk;
    if (!out_json.empty()) j["output"]["json"] = out_json;
    if (!out_csv.empty()) j["output"]["csv"] = out_csv;
    if (!out_mesh_vtk.empty()) j["output"]["mesh_vtk"] = out_mesh_vtk;
    return j;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    return ProblemConfig::from_json(j);
}

} // namespace pdfem
