#include "pdfem/homogenize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>

#include "pdfem/kernels.hpp"

namespace pdfem {

const char* bc_name(BcKind k) {
    switch (k) {
        case BcKind::kubc: return "kubc";
        case BcKind::subc: return "subc";
        case BcKind::periodic: return "periodic";
    }
    return "?";
}

namespace {
std::atomic<int> g_max_threads{1};
}

void set_max_threads(int n) { g_max_threads.store(std::max(1, n)); }
int max_threads() { return g_max_threads.load(); }

namespace {

// macro vector -> tensor form. Strains use engineering shear (gamma), so
// off-diagonal entries are halved; stresses are copied as-is.
DenseMatrix macro_tensor(Physics physics, int dim, std::span<const double> macro, bool is_strain) {
    if (physics == Physics::thermal) {
        DenseMatrix g(dim, 1);
        for (int i = 0; i < dim; ++i) g(i, 0) = macro[i];
        return g;
    }
    DenseMatrix t(dim, dim);
    const double off = is_strain ? 0.5 : 1.0;
    if (dim == 2) {
        t(0, 0) = macro[0];
        t(1, 1) = macro[1];
        t(0, 1) = t(1, 0) = off * macro[2];
    } else {
        t(0, 0) = macro[0];
        t(1, 1) = macro[1];
        t(2, 2) = macro[2];
        t(1, 2) = t(2, 1) = off * macro[3];
        t(0, 2) = t(2, 0) = off * macro[4];
        t(0, 1) = t(1, 0) = off * macro[5];
    }
    return t;
}

std::vector<double> affine_values_at(Physics physics, int dim, std::span<const double> macro,
                                     std::span<const Vec3> positions, bool is_strain) {
    const DenseMatrix t = macro_tensor(physics, dim, macro, is_strain);
    const int d = dofs_per_node(physics, dim);
    std::vector<double> u(positions.size() * d, 0.0);
    for (size_t i = 0; i < positions.size(); ++i) {
        if (physics == Physics::thermal) {
            double s = 0.0;
            for (int a = 0; a < dim; ++a) s += t(a, 0) * positions[i][a];
            u[i] = s;
        } else {
            for (int c = 0; c < dim; ++c) {
                double s = 0.0;
                for (int a = 0; a < dim; ++a) s += t(c, a) * positions[i][a];
                u[i * d + c] = s;
            }
        }
    }
    return u;
}

} // namespace

PdfemSystem::PdfemSystem(const PdfemProblem& problem) : problem_(&problem) {
    const auto& p = problem;
    dofmap_ = p.periodic ? periodic_dofmap(p.grid, p.physics) : make_dofmap(p.grid, p.physics);
    has_inclusion_ = p.inclusion.element_count() > 0;

    Vec3 corner_pos[8];
    p.grid.cell_corner_positions({0, 0, 0}, corner_pos);
    const std::span<const Vec3> cp(corner_pos, p.grid.nodes_per_cell());
    local_template_ = p.physics == Physics::thermal
                          ? elements::local_stiffness_thermal(p.grid.cell_type(), cp, p.coef_mat)
                          : elements::local_stiffness_elastic(p.grid.cell_type(), cp, p.coef_mat);

    const auto t0 = std::chrono::steady_clock::now();
    if (p.inclusion.node_count() > 0) subst_ = build_substitution(p.grid, p.inclusion, dofmap_, p.periodic);
    const auto t1 = std::chrono::steady_clock::now();

    CsrMatrix k_mat = assemble_Kmat(p.grid, p.coef_mat, dofmap_);
    if (has_inclusion_) {
        k_inc_ = assemble_Kinc(p.inclusion, p.coef_inc, p.coef_mat, p.physics);
        k_ = combine(k_mat, subst_, k_inc_);
    } else {
        k_ = std::move(k_mat);
    }
    const auto t2 = std::chrono::steady_clock::now();
    timings_.substitution = std::chrono::duration<double>(t1 - t0).count();
    timings_.assembly = std::chrono::duration<double>(t2 - t1).count();
}

CaseSolution PdfemSystem::solve_case(const LoadCase& lc) const {
    const int want = problem_->voigt_dim();
    if (static_cast<int>(lc.macro.size()) != want)
        throw ValidationError("load case: macro data must have " + std::to_string(want) +
                              " entries");
    switch (lc.kind) {
        case BcKind::kubc: return solve_kubc(lc);
        case BcKind::subc: return solve_subc(lc);
        case BcKind::periodic: return solve_periodic(lc);
    }
    throw ValidationError("load case: unknown kind");
}

std::vector<double> PdfemSystem::affine_grid_values(std::span<const double> macro) const {
    const auto& p = *problem_;
    std::vector<Vec3> pos(p.grid.node_count());
    for (long i = 0; i < p.grid.node_count(); ++i) pos[i] = p.grid.node_position(i);
    return affine_values_at(p.physics, p.dim(), macro, pos, true);
}

CaseSolution PdfemSystem::solve_kubc(const LoadCase& lc) const {
    const auto& p = *problem_;
    if (p.periodic) throw ValidationError("kubc battery requires a non-periodic problem");
    CaseSolution sol;

    const std::vector<double> affine = affine_grid_values(lc.macro);
    DirichletBC bc;
    const int d = dofmap_.dofs_per_node;
    for (long node = 0; node < p.grid.node_count(); ++node)
        if (p.grid.on_boundary_node(node))
            for (int c = 0; c < d; ++c)
                bc.add(static_cast<int>(node) * d + c, affine[node * d + c]);

    const std::vector<double> zero(dofmap_.dof_count(), 0.0);
    ReducedSystem sys = apply_dirichlet(k_, zero, bc);
    SolveResult r = solve_cg(sys.k, sys.rhs, p.solver);
    if (!r.converged)
        throw Error("kubc solve did not converge: residual " +
                    std::to_string(r.report.rel_residual));
    sol.u_full = sys.recover(r.x);
    sol.report = r.report;
    if (subst_.scalar.n_rows > 0) sol.v_inc = subst_.apply(sol.u_full);
    return sol;
}

CaseSolution PdfemSystem::solve_subc(const LoadCase& lc) const {
    const auto& p = *problem_;
    if (p.periodic) throw ValidationError("subc battery requires a non-periodic problem");
    CaseSolution sol;

    const DenseMatrix macro = macro_tensor(p.physics, p.dim(), lc.macro, false);
    NeumannSpec spec;
    const int d = dofmap_.dofs_per_node;
    for (int axis = 0; axis < p.dim(); ++axis)
        for (int side = 0; side < 2; ++side) {
            NeumannSpec::SideLoad sl;
            sl.axis = axis;
            sl.max_side = side == 1;
            const double sign = sl.max_side ? 1.0 : -1.0;
            sl.value.resize(d);
            if (p.physics == Physics::thermal) {
                sl.value[0] = sign * macro(axis, 0); // Q . n
            } else {
                for (int c = 0; c < d; ++c) sl.value[c] = sign * macro(c, axis); // Sigma n
            }
            spec.sides.push_back(std::move(sl));
        }

    const std::vector<double> load = assemble_load(p.grid, nullptr, spec, dofmap_);
    const DirichletBC pins = pin_rigid_modes(load, p.physics, p.grid);
    ReducedSystem sys = apply_dirichlet(k_, load, pins);
    SolveResult r = solve_cg(sys.k, sys.rhs, p.solver);
    if (!r.converged)
        throw Error("subc solve did not converge: residual " +
                    std::to_string(r.report.rel_residual));
    sol.u_full = sys.recover(r.x);

    std::vector<Vec3> pos(p.grid.node_count());
    for (long i = 0; i < p.grid.node_count(); ++i) pos[i] = p.grid.node_position(i);
    remove_rigid_best_fit(sol.u_full, p.physics, pos, p.dim());

    sol.report = r.report;
    if (subst_.scalar.n_rows > 0) sol.v_inc = subst_.apply(sol.u_full);
    return sol;
}

CaseSolution PdfemSystem::solve_periodic(const LoadCase& lc) const {
    const auto& p = *problem_;
    if (!p.periodic) throw ValidationError("periodic battery requires a periodic problem");
    CaseSolution sol;
    const int d = dofmap_.dofs_per_node;
    const int ncorner = p.grid.nodes_per_cell();

    // fluctuation problem: K u~ = -K u_aff, assembled without the full-space
    // operator; the affine part is interpolated on the unwrapped geometry
    const std::vector<double> u_aff = affine_grid_values(lc.macro);
    std::vector<double> rhs(dofmap_.dof_count(), 0.0);

    const auto& n = p.grid.resolution();
    long corners[8];
    std::vector<double> local_aff(static_cast<size_t>(ncorner) * d);
    for (int kk = 0; kk < (p.dim() == 3 ? n[2] : 1); ++kk)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                p.grid.cell_nodes({i, j, kk}, corners);
                for (int a = 0; a < ncorner; ++a)
                    for (int c = 0; c < d; ++c) local_aff[a * d + c] = u_aff[corners[a] * d + c];
                for (int a = 0; a < ncorner; ++a)
                    for (int ca = 0; ca < d; ++ca) {
                        double s = 0.0;
                        for (int b = 0; b < ncorner * d; ++b)
                            s += local_template_(a * d + ca, b) * local_aff[b];
                        rhs[dofmap_.reduced_dof(corners[a], ca)] -= s;
                    }
            }

    std::vector<double> v_aff;
    if (has_inclusion_) {
        v_aff = affine_values_at(p.physics, p.dim(), lc.macro,
                                 std::span<const Vec3>(p.inclusion.nodes), true);
        const std::vector<double> w = k_inc_.multiply(v_aff);
        // rhs -= S^T w
        const CsrMatrix& s = subst_.scalar;
        for (int row = 0; row < s.n_rows; ++row)
            for (int k = s.row_ptr[row]; k < s.row_ptr[row + 1]; ++k)
                for (int c = 0; c < d; ++c)
                    rhs[s.cols[k] * d + c] -= s.vals[k] * w[row * d + c];
    }

    // pin the per-component constants (the only rigid modes left)
    DirichletBC pins;
    for (int c = 0; c < d; ++c) pins.add(dofmap_.reduced_dof(0, c), 0.0);

    ReducedSystem sys = apply_dirichlet(k_, rhs, pins);
    SolveResult r = solve_cg(sys.k, sys.rhs, p.solver);
    if (!r.converged)
        throw Error("periodic solve did not converge: residual " +
                    std::to_string(r.report.rel_residual));
    const std::vector<double> fluct_red = sys.recover(r.x);
    const std::vector<double> fluct_full = dofmap_.expand(fluct_red);

    sol.u_full.resize(u_aff.size());
    for (size_t i = 0; i < u_aff.size(); ++i) sol.u_full[i] = u_aff[i] + fluct_full[i];
    if (subst_.scalar.n_rows > 0) {
        sol.v_inc = subst_.apply(fluct_red);
        for (size_t i = 0; i < sol.v_inc.size(); ++i) sol.v_inc[i] += v_aff[i];
    }
    sol.report = r.report;
    return sol;
}

namespace {

// per-cell integral of the constitutive flux over the structured grid; the
// constant-coefficient integrand over congruent cells still varies with the
// nodal values, so this loops cells but reuses one gradient table
struct GridFluxAccumulator {
    const StructuredGrid& grid;
    Physics physics;
    const DenseMatrix& coef; // material (flux) or empty for geometric average
    bool weighted;

    std::vector<double> accumulate(std::span<const double> u) const {
        const int dim = grid.dim();
        const int d = dofs_per_node(physics, dim);
        const int m = physics == Physics::thermal ? dim : (dim == 2 ? 3 : 6);
        const int ncorner = grid.nodes_per_cell();
        const ElementType ct = grid.cell_type();
        const auto& rule = elements::stiffness_rule(ct);

        // gradient tables per quadrature point (constant across cells)
        Vec3 corner_pos[8];
        grid.cell_corner_positions({0, 0, 0}, corner_pos);
        const Vec3 h = grid.h();
        double det = 1.0;
        for (int a = 0; a < dim; ++a) det *= h[a] * 0.5;

        std::vector<std::array<std::array<double, 8>, 3>> grads(rule.size());
        for (int q = 0; q < rule.size(); ++q) {
            double dn[3 * 8];
            elements::shape_gradients(ct, rule.points[q], dn);
            for (int i = 0; i < dim; ++i)
                for (int a = 0; a < ncorner; ++a)
                    grads[q][i][a] = dn[i * ncorner + a] * (2.0 / h[i]);
        }

        std::vector<double> acc(m, 0.0);
        const auto& n = grid.resolution();
        long corners[8];
        for (int kk = 0; kk < (dim == 3 ? n[2] : 1); ++kk)
            for (int j = 0; j < n[1]; ++j)
                for (int i = 0; i < n[0]; ++i) {
                    grid.cell_nodes({i, j, kk}, corners);
                    for (int q = 0; q < rule.size(); ++q) {
                        const double w = rule.weights[q] * det;
                        double g[6] = {0, 0, 0, 0, 0, 0};
                        if (physics == Physics::thermal) {
                            for (int a = 0; a < ncorner; ++a) {
                                const double ua = u[corners[a]];
                                for (int c = 0; c < dim; ++c) g[c] += grads[q][c][a] * ua;
                            }
                        } else {
                            for (int a = 0; a < ncorner; ++a)
                                for (int c = 0; c < dim; ++c) {
                                    const double ua = u[corners[a] * d + c];
                                    // strain Voigt accumulation
                                    if (dim == 2) {
                                        if (c == 0) {
                                            g[0] += grads[q][0][a] * ua;
                                            g[2] += grads[q][1][a] * ua;
                                        } else {
                                            g[1] += grads[q][1][a] * ua;
                                            g[2] += grads[q][0][a] * ua;
                                        }
                                    } else {
                                        if (c == 0) {
                                            g[0] += grads[q][0][a] * ua;
                                            g[4] += grads[q][2][a] * ua;
                                            g[5] += grads[q][1][a] * ua;
                                        } else if (c == 1) {
                                            g[1] += grads[q][1][a] * ua;
                                            g[3] += grads[q][2][a] * ua;
                                            g[5] += grads[q][0][a] * ua;
                                        } else {
                                            g[2] += grads[q][2][a] * ua;
                                            g[3] += grads[q][1][a] * ua;
                                            g[4] += grads[q][0][a] * ua;
                                        }
                                    }
                                }
                        }
                        if (weighted) {
                            for (int r = 0; r < m; ++r) {
                                double s = 0.0;
                                for (int c = 0; c < m; ++c) s += coef(r, c) * g[c];
                                acc[r] += w * s;
                            }
                        } else {
                            for (int r = 0; r < m; ++r) acc[r] += w * g[r];
                        }
                    }
                }
        return acc;
    }
};

// inclusion-mesh integral of (coef_diff * gradient/strain of v)
std::vector<double> mesh_flux(const UnstructuredMesh& mesh, Physics physics,
                              const DenseMatrix& diff, std::span<const double> v) {
    const int dim = mesh.dim;
    const int d = dofs_per_node(physics, dim);
    const int m = physics == Physics::thermal ? dim : (dim == 2 ? 3 : 6);
    std::vector<double> acc(m, 0.0);

    Vec3 coords[8];
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const int nn = element_node_count(el.type);
        mesh.element_coords(e, coords);
        const auto& rule = elements::stiffness_rule(el.type);
        for (int q = 0; q < rule.size(); ++q) {
            // gradients mapped per element
            double dn[3 * 8];
            elements::shape_gradients(el.type, rule.points[q], dn);
            // build jacobian
            double jac[3][3] = {};
            for (int i = 0; i < dim; ++i)
                for (int jj = 0; jj < dim; ++jj) {
                    double s = 0.0;
                    for (int a = 0; a < nn; ++a) s += dn[i * nn + a] * coords[a][jj];
                    jac[i][jj] = s;
                }
            double det, inv[3][3];
            if (dim == 2) {
                det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                const double id = 1.0 / det;
                inv[0][0] = jac[1][1] * id;
                inv[0][1] = -jac[0][1] * id;
                inv[1][0] = -jac[1][0] * id;
                inv[1][1] = jac[0][0] * id;
            } else {
                det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) -
                      jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0]) +
                      jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
                const double id = 1.0 / det;
                inv[0][0] = (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) * id;
                inv[0][1] = (jac[0][2] * jac[2][1] - jac[0][1] * jac[2][2]) * id;
                inv[0][2] = (jac[0][1] * jac[1][2] - jac[0][2] * jac[1][1]) * id;
                inv[1][0] = (jac[1][2] * jac[2][0] - jac[1][0] * jac[2][2]) * id;
                inv[1][1] = (jac[0][0] * jac[2][2] - jac[0][2] * jac[2][0]) * id;
                inv[1][2] = (jac[0][2] * jac[1][0] - jac[0][0] * jac[1][2]) * id;
                inv[2][0] = (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]) * id;
                inv[2][1] = (jac[0][1] * jac[2][0] - jac[0][0] * jac[2][1]) * id;
                inv[2][2] = (jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]) * id;
            }
            const double w = rule.weights[q] * det;

            double g[6] = {0, 0, 0, 0, 0, 0};
            for (int a = 0; a < nn; ++a) {
                double gp[3] = {0, 0, 0};
                for (int i = 0; i < dim; ++i) {
                    double s = 0.0;
                    for (int jj = 0; jj < dim; ++jj) s += inv[i][jj] * dn[jj * nn + a];
                    gp[i] = s;
                }
                if (physics == Physics::thermal) {
                    for (int c = 0; c < dim; ++c) g[c] += gp[c] * v[el.conn[a]];
                } else {
                    for (int c = 0; c < dim; ++c) {
                        const double va = v[el.conn[a] * d + c];
                        if (dim == 2) {
                            if (c == 0) {
                                g[0] += gp[0] * va;
                                g[2] += gp[1] * va;
                            } else {
                                g[1] += gp[1] * va;
                                g[2] += gp[0] * va;
                            }
                        } else {
                            if (c == 0) {
                                g[0] += gp[0] * va;
                                g[4] += gp[2] * va;
                                g[5] += gp[1] * va;
                            } else if (c == 1) {
                                g[1] += gp[1] * va;
                                g[3] += gp[2] * va;
                                g[5] += gp[0] * va;
                            } else {
                                g[2] += gp[2] * va;
                                g[3] += gp[1] * va;
                                g[4] += gp[0] * va;
                            }
                        }
                    }
                }
            }
            for (int r = 0; r < m; ++r) {
                double s = 0.0;
                for (int c = 0; c < m; ++c) s += diff(r, c) * g[c];
                acc[r] += w * s;
            }
        }
    }
    return acc;
}

} // namespace

std::vector<double> PdfemSystem::average_flux(const CaseSolution& sol) const {
    const auto& p = *problem_;
    GridFluxAccumulator grid_acc{p.grid, p.physics, p.coef_mat, true};
    std::vector<double> acc = grid_acc.accumulate(sol.u_full);
    if (has_inclusion_) {
        const DenseMatrix diff = p.coef_inc - p.coef_mat;
        const std::vector<double> inc = mesh_flux(p.inclusion, p.physics, diff, sol.v_inc);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += inc[i];
    }
    const double vol = p.grid.volume();
    for (double& a : acc) a /= vol;
    return acc;
}

std::vector<double> PdfemSystem::average_gradient(std::span<const double> u_full) const {
    const auto& p = *problem_;
    GridFluxAccumulator grid_acc{p.grid, p.physics, p.coef_mat, false};
    std::vector<double> acc = grid_acc.accumulate(u_full);
    const double vol = p.grid.volume();
    for (double& a : acc) a /= vol;
    return acc;
}

double PdfemSystem::energy(const CaseSolution& a, const CaseSolution& b) const {
    const auto& p = *problem_;
    const int d = dofmap_.dofs_per_node;
    const int ncorner = p.grid.nodes_per_cell();
    const auto& n = p.grid.resolution();

    double e = 0.0;
    long corners[8];
    std::vector<double> la(static_cast<size_t>(ncorner) * d), lb(la.size());
    for (int kk = 0; kk < (p.dim() == 3 ? n[2] : 1); ++kk)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                p.grid.cell_nodes({i, j, kk}, corners);
                for (int aa = 0; aa < ncorner; ++aa)
                    for (int c = 0; c < d; ++c) {
                        la[aa * d + c] = a.u_full[corners[aa] * d + c];
                        lb[aa * d + c] = b.u_full[corners[aa] * d + c];
                    }
                for (size_t r = 0; r < la.size(); ++r) {
                    double s = 0.0;
                    for (size_t c = 0; c < lb.size(); ++c)
                        s += local_template_(static_cast<int>(r), static_cast<int>(c)) * lb[c];
                    e += la[r] * s;
                }
            }
    if (has_inclusion_) {
        const std::vector<double> w = k_inc_.multiply(b.v_inc);
        e += kernels::dot(a.v_inc, w);
    }
    return e;
}

std::vector<LoadCase> unit_macro_cases(Physics physics, int dim, BcKind kind) {
    const int m = physics == Physics::thermal ? dim : (dim == 2 ? 3 : 6);
    std::vector<LoadCase> cases(m);
    for (int k = 0; k < m; ++k) {
        cases[k].kind = kind;
        cases[k].macro.assign(m, 0.0);
        cases[k].macro[k] = 1.0;
    }
    return cases;
}

namespace {

HomogenizeResult run_cases(const PdfemProblem& problem, BcKind kind) {
    PdfemSystem sys(problem);
    const int m = problem.voigt_dim();
    const auto cases = unit_macro_cases(problem.physics, problem.dim(), kind);

    HomogenizeResult result;
    result.tensor.physics = problem.physics;
    result.tensor.bc = kind;
    result.tensor.dim = problem.dim();
    result.tensor.matrix = DenseMatrix(m, m);
    result.tensor.volume_fraction = problem.inclusion.element_count() > 0
                                        ? problem.inclusion.measure() / problem.grid.volume()
                                        : 0.0;

    std::vector<CaseSolution> sols(m);
    if (max_threads() > 1) {
        for (int base = 0; base < m; base += max_threads()) {
            const int batch = std::min(max_threads(), m - base);
            std::vector<std::future<CaseSolution>> futures;
            futures.reserve(batch);
            for (int k = base; k < base + batch; ++k)
                futures.push_back(std::async(std::launch::async,
                                             [&sys, &cases, k] { return sys.solve_case(cases[k]); }));
            for (int k = base; k < base + batch; ++k) {
                try {
                    sols[k] = futures[k - base].get();
                } catch (const Error& e) {
                    throw Error(std::string(bc_name(kind)) + " case " + std::to_string(k) + ": " +
                                e.what());
                }
            }
        }
    } else {
        for (int k = 0; k < m; ++k) {
            try {
                sols[k] = sys.solve_case(cases[k]);
            } catch (const Error& e) {
                throw Error(std::string(bc_name(kind)) + " case " + std::to_string(k) + ": " +
                            e.what());
            }
        }
    }

    DenseMatrix columns(m, m); // flux columns (kubc/periodic) or gradients (subc)
    for (int k = 0; k < m; ++k) {
        const std::vector<double> col = kind == BcKind::subc ? sys.average_gradient(sols[k].u_full)
                                                             : sys.average_flux(sols[k]);
        for (int r = 0; r < m; ++r) columns(r, k) = col[r];
        result.reports.push_back(sols[k].report);
    }

    if (kind == BcKind::subc) {
        // apparent compliance (averaged gradients per unit flux) inverted
        DenseMatrix compliance = columns;
        try {
            result.tensor.matrix = dense_inverse(compliance);
        } catch (const ValidationError&) {
            throw ValidationError("subc battery: singular apparent compliance");
        }
    } else {
        result.tensor.matrix = columns;
    }

    // energy identity: a(u_i, u_j)/|V| must equal the flux column entries
    // (kubc/periodic) or the compliance entries (subc)
    const double vol = problem.grid.volume();
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double e = sys.energy(sols[i], sols[j]) / vol;
            worst = std::max(worst, std::abs(e - columns(j, i)));
        }
    result.tensor.energy_crosscheck = worst;
    return result;
}

} // namespace

HomogenizeResult run_kubc(const PdfemProblem& problem) { return run_cases(problem, BcKind::kubc); }
HomogenizeResult run_subc(const PdfemProblem& problem) { return run_cases(problem, BcKind::subc); }
HomogenizeResult run_periodic(const PdfemProblem& problem) {
    return run_cases(problem, BcKind::periodic);
}
HomogenizeResult run_battery(const PdfemProblem& problem, BcKind kind) {
    return run_cases(problem, kind);
}

double EffectiveTensor::sym_error_rel() const {
    const double m = matrix.max_abs();
    return m > 0.0 ? matrix.sym_error() / m : 0.0;
}

std::string EffectiveTensor::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\n  \"physics\": \"" << physics_name(physics) << "\",\n";
    os << "  \"bc\": \"" << bc_name(bc) << "\",\n";
    os << "  \"dim\": " << dim << ",\n";
    os << "  \"voigt_order\": \"" << (physics == Physics::thermal ? "xx,yy(,zz)" : "11,22,(33,)23,13,12")
       << "\",\n";
    os << "  \"volume_fraction\": " << volume_fraction << ",\n";
    os << "  \"energy_crosscheck\": " << energy_crosscheck << ",\n";
    os << "  \"matrix\": [";
    for (int i = 0; i < matrix.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (int j = 0; j < matrix.cols(); ++j) os << (j ? ", " : "") << matrix(i, j);
        os << "]";
    }
    os << "]\n}\n";
    return os.str();
}

std::string EffectiveTensor::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < matrix.rows(); ++i) {
        for (int j = 0; j < matrix.cols(); ++j) os << (j ? "," : "") << matrix(i, j);
        os << "\n";
    }
    return os.str();
}

std::pair<DenseMatrix, DenseMatrix> voigt_reuss_bounds(double f, const DenseMatrix& coef_mat,
                                                       const DenseMatrix& coef_inc) {
    if (f < 0.0 || f > 1.0) throw ValidationError("bounds: volume fraction must be in [0, 1]");
    const int m = coef_mat.rows();
    DenseMatrix voigt(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) voigt(i, j) = f * coef_inc(i, j) + (1.0 - f) * coef_mat(i, j);

    const DenseMatrix inv_mat = dense_inverse(coef_mat);
    const DenseMatrix inv_inc = dense_inverse(coef_inc);
    DenseMatrix harm(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) harm(i, j) = f * inv_inc(i, j) + (1.0 - f) * inv_mat(i, j);
    return {dense_inverse(harm), voigt};
}

BoundsCheck check_bounds(const DenseMatrix& tensor, const DenseMatrix& reuss,
                         const DenseMatrix& voigt, double tol) {
    BoundsCheck c;
    const auto above = symmetric_eigenvalues(tensor - reuss);
    const auto below = symmetric_eigenvalues(voigt - tensor);
    c.min_eig_above_reuss = above.front();
    c.min_eig_below_voigt = below.front();
    const double scale = std::max(1.0, voigt.max_abs());
    c.inside = c.min_eig_above_reuss >= -tol * scale && c.min_eig_below_voigt >= -tol * scale;
    return c;
}

} // namespace pdfem
