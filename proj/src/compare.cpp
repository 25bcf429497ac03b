#include "pdfem/compare.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pdfem/kernels.hpp"

namespace pdfem {

void ConformalProblem::validate_tags() const {
    for (int e = 0; e < mesh.element_count(); ++e) {
        const int tag = mesh.elements[e].tag;
        if (tag != 1 && tag != 2)
            throw ValidationError("conformal mesh: element " + std::to_string(e) +
                                  " has tag " + std::to_string(tag) + " (expected 1 or 2)");
    }
}

namespace {

std::vector<double> conformal_affine(const ConformalProblem& p, std::span<const double> macro) {
    const int dim = p.mesh.dim;
    const int d = dofs_per_node(p.physics, dim);
    std::vector<double> u(static_cast<size_t>(p.mesh.node_count()) * d, 0.0);
    for (int i = 0; i < p.mesh.node_count(); ++i) {
        const Vec3& x = p.mesh.nodes[i];
        if (p.physics == Physics::thermal) {
            double s = 0.0;
            for (int a = 0; a < dim; ++a) s += macro[a] * x[a];
            u[i] = s;
        } else {
            // Voigt strain with engineering shear
            if (dim == 2) {
                u[i * 2 + 0] = macro[0] * x[0] + 0.5 * macro[2] * x[1];
                u[i * 2 + 1] = 0.5 * macro[2] * x[0] + macro[1] * x[1];
            } else {
                u[i * 3 + 0] = macro[0] * x[0] + 0.5 * macro[5] * x[1] + 0.5 * macro[4] * x[2];
                u[i * 3 + 1] = 0.5 * macro[5] * x[0] + macro[1] * x[1] + 0.5 * macro[3] * x[2];
                u[i * 3 + 2] = 0.5 * macro[4] * x[0] + 0.5 * macro[3] * x[1] + macro[2] * x[2];
            }
        }
    }
    return u;
}

DenseMatrix stress_macro(const ConformalProblem& p, std::span<const double> macro) {
    const int dim = p.mesh.dim;
    if (p.physics == Physics::thermal) {
        DenseMatrix q(dim, 1);
        for (int a = 0; a < dim; ++a) q(a, 0) = macro[a];
        return q;
    }
    DenseMatrix s(dim, dim);
    if (dim == 2) {
        s(0, 0) = macro[0];
        s(1, 1) = macro[1];
        s(0, 1) = s(1, 0) = macro[2];
    } else {
        s(0, 0) = macro[0];
        s(1, 1) = macro[1];
        s(2, 2) = macro[2];
        s(1, 2) = s(2, 1) = macro[3];
        s(0, 2) = s(2, 0) = macro[4];
        s(0, 1) = s(1, 0) = macro[5];
    }
    return s;
}

} // namespace

std::vector<double> solve_conformal(const ConformalProblem& p, const LoadCase& lc,
                                    SolveReport* report) {
    p.validate_tags();
    const int d = dofs_per_node(p.physics, p.mesh.dim);
    const std::map<int, DenseMatrix> coef{{1, p.coef_mat}, {2, p.coef_inc}};
    const CsrMatrix k = assemble_unstructured(p.mesh, coef, p.physics);

    std::vector<double> u;
    if (lc.kind == BcKind::kubc) {
        std::set<int> bnodes;
        for (const auto& f : boundary_facets(p.mesh))
            for (int nn : f.nodes) bnodes.insert(nn);
        const std::vector<double> affine = conformal_affine(p, lc.macro);
        DirichletBC bc;
        for (int node : bnodes)
            for (int c = 0; c < d; ++c) bc.add(node * d + c, affine[node * d + c]);
        const std::vector<double> zero(k.n_rows, 0.0);
        ReducedSystem sys = apply_dirichlet(k, zero, bc);
        SolveResult r = solve_cg(sys.k, sys.rhs, p.solver);
        if (!r.converged)
            throw Error("conformal kubc solve did not converge: residual " +
                        std::to_string(r.report.rel_residual));
        u = sys.recover(r.x);
        if (report) *report = r.report;
    } else if (lc.kind == BcKind::subc) {
        const DenseMatrix macro = stress_macro(p, lc.macro);
        const std::vector<double> load =
            assemble_boundary_load_unstructured(p.mesh, macro, p.physics);
        const DirichletBC pins =
            pin_rigid_modes_points(load, p.physics, p.mesh.nodes, p.mesh.dim);
        ReducedSystem sys = apply_dirichlet(k, load, pins);
        SolveResult r = solve_cg(sys.k, sys.rhs, p.solver);
        if (!r.converged)
            throw Error("conformal subc solve did not converge: residual " +
                        std::to_string(r.report.rel_residual));
        u = sys.recover(r.x);
        remove_rigid_best_fit(u, p.physics, p.mesh.nodes, p.mesh.dim);
        if (report) *report = r.report;
    } else {
        throw ValidationError("solve_conformal: only kubc and subc batteries are supported");
    }
    return u;
}

std::vector<double> project_pdfem(const StructuredGrid& grid, const UnstructuredMesh& conformal,
                                  std::span<const double> u_pdfem, Physics physics) {
    UnstructuredMesh nodes_only;
    nodes_only.dim = conformal.dim;
    nodes_only.nodes = conformal.nodes;
    const DofMap dofmap = make_dofmap(grid, physics);
    const SubstitutionMatrix s = build_substitution(grid, nodes_only, dofmap, false);
    return s.apply(u_pdfem);
}

namespace {

double quad_form_scalar(const CsrMatrix& a, std::span<const double> x, int d) {
    // per-component quadratic form x^T (A (x) I_d) x for a scalar operator
    const int n = a.n_rows;
    double s = 0.0;
    for (int r = 0; r < n; ++r)
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            for (int c = 0; c < d; ++c) s += x[r * d + c] * a.vals[k] * x[a.cols[k] * d + c];
    return s;
}

} // namespace

DifferenceReport relative_difference(std::span<const double> u_fem,
                                     std::span<const double> u_projected, const CsrMatrix& m_scalar,
                                     const CsrMatrix& k_scalar, int dofs_per_node) {
    if (u_fem.size() != u_projected.size())
        throw ValidationError("relative_difference: size mismatch");
    std::vector<double> e(u_fem.size());
    for (size_t i = 0; i < e.size(); ++i) e[i] = u_fem[i] - u_projected[i];

    DifferenceReport rep;
    rep.conformal_dofs = static_cast<int>(u_fem.size());

    const double un = kernels::nrm2(u_fem);
    if (un == 0.0) throw ValidationError("relative_difference: zero-norm reference");
    rep.euclidean = kernels::nrm2(e) / un;

    const double um = quad_form_scalar(m_scalar, u_fem, dofs_per_node);
    const double uk = quad_form_scalar(k_scalar, u_fem, dofs_per_node);
    if (!(um > 0.0) || !(uk > 0.0))
        throw ValidationError("relative_difference: zero-norm reference under M or K");
    rep.l2 = std::sqrt(std::max(0.0, quad_form_scalar(m_scalar, e, dofs_per_node)) / um);
    rep.h1_semi = std::sqrt(std::max(0.0, quad_form_scalar(k_scalar, e, dofs_per_node)) / uk);
    return rep;
}

void remove_gauge(std::span<double> u, const UnstructuredMesh& mesh, const CsrMatrix& m_scalar,
                  Physics physics) {
    const int dim = mesh.dim;
    const int d = dofs_per_node(physics, dim);
    const long n = mesh.node_count();

    std::vector<std::vector<double>> modes;
    if (physics == Physics::thermal) {
        modes.emplace_back(n, 1.0);
    } else {
        for (int c = 0; c < d; ++c) {
            std::vector<double> t(n * d, 0.0);
            for (long i = 0; i < n; ++i) t[i * d + c] = 1.0;
            modes.push_back(std::move(t));
        }
        if (dim == 2) {
            std::vector<double> r(n * 2);
            for (long i = 0; i < n; ++i) {
                r[i * 2] = -mesh.nodes[i][1];
                r[i * 2 + 1] = mesh.nodes[i][0];
            }
            modes.push_back(std::move(r));
        } else {
            const int axes[3][2] = {{1, 2}, {2, 0}, {0, 1}};
            for (const auto& ax : axes) {
                std::vector<double> r(n * 3, 0.0);
                for (long i = 0; i < n; ++i) {
                    r[i * 3 + ax[0]] = -mesh.nodes[i][ax[1]];
                    r[i * 3 + ax[1]] = mesh.nodes[i][ax[0]];
                }
                modes.push_back(std::move(r));
            }
        }
    }

    const auto m_inner = [&](std::span<const double> x, std::span<const double> y) {
        double s = 0.0;
        for (int r = 0; r < m_scalar.n_rows; ++r)
            for (int k = m_scalar.row_ptr[r]; k < m_scalar.row_ptr[r + 1]; ++k)
                for (int c = 0; c < d; ++c)
                    s += x[r * d + c] * m_scalar.vals[k] * y[m_scalar.cols[k] * d + c];
        return s;
    };

    const int nm = static_cast<int>(modes.size());
    DenseMatrix gram(nm, nm);
    std::vector<double> proj(nm);
    for (int i = 0; i < nm; ++i) {
        for (int j = 0; j < nm; ++j) gram(i, j) = m_inner(modes[i], modes[j]);
        proj[i] = m_inner(std::span<const double>(u.data(), u.size()), modes[i]);
    }
    const std::vector<double> coef = dense_solve(gram, proj);
    for (int i = 0; i < nm; ++i) kernels::axpy(-coef[i], modes[i], u);
}

std::pair<double, int> max_nodal_discrepancy(std::span<const double> u_fem,
                                             std::span<const double> u_projected,
                                             int dofs_per_node) {
    const long n = static_cast<long>(u_fem.size()) / dofs_per_node;
    double ref = 0.0;
    for (long i = 0; i < n; ++i) {
        double m = 0.0;
        for (int c = 0; c < dofs_per_node; ++c) {
            const double v = u_fem[i * dofs_per_node + c];
            m += v * v;
        }
        ref = std::max(ref, m);
    }
    ref = std::sqrt(ref);
    if (ref == 0.0) throw ValidationError("max_nodal_discrepancy: zero reference");

    double best = -1.0;
    long node = 0;
    for (long i = 0; i < n; ++i) {
        double m = 0.0;
        for (int c = 0; c < dofs_per_node; ++c) {
            const double v = u_fem[i * dofs_per_node + c] - u_projected[i * dofs_per_node + c];
            m += v * v;
        }
        if (m > best) {
            best = m;
            node = i;
        }
    }
    return {std::sqrt(best) / ref, static_cast<int>(node)};
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("fit_loglog_slope: need >= 2 samples");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ValidationError("fit_loglog_slope: samples must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string ConvergenceTable::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "n,h,eta,euclidean,l2,h1_semi,eta_warning\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.h << ',' << r.eta << ',' << r.euclidean << ',' << r.l2 << ','
           << r.h1_semi << ',' << (r.eta_warning ? 1 : 0) << '\n';
    os << "slope,euclidean," << slope_euclidean << '\n';
    os << "slope,l2," << slope_l2 << '\n';
    os << "slope,h1_semi," << slope_h1 << '\n';
    return os.str();
}

ConvergenceTable convergence_study(const ConvergenceFixture& fixture,
                                   const std::vector<int>& resolutions) {
    if (resolutions.size() < 3)
        throw ValidationError("convergence_study: need >= 3 resolutions");

    ConvergenceTable table;
    for (int n : resolutions) {
        PdfemProblem problem;
        problem.grid = StructuredGrid::unit(2, n);
        problem.physics = fixture.physics;
        problem.coef_mat = fixture.coef_mat;
        problem.coef_inc = fixture.coef_inc;
        problem.inclusion = fixture.inclusion_for(n);
        problem.solver = fixture.solver;

        PdfemSystem sys(problem);
        const CaseSolution sol = sys.solve_case(fixture.bc);

        ConformalProblem ref;
        ref.mesh = fixture.conformal_for(n);
        ref.physics = fixture.physics;
        ref.coef_mat = fixture.coef_mat;
        ref.coef_inc = fixture.coef_inc;
        ref.solver = fixture.solver;
        std::vector<double> u_fem = solve_conformal(ref, fixture.bc);

        std::vector<double> u_proj =
            project_pdfem(problem.grid, ref.mesh, sol.u_full, fixture.physics);

        const CsrMatrix m_scalar = assemble_mass_mesh(ref.mesh, 1);
        const std::map<int, DenseMatrix> unit{{1, DenseMatrix::identity(ref.mesh.dim)},
                                              {2, DenseMatrix::identity(ref.mesh.dim)}};
        const CsrMatrix k_scalar = assemble_unstructured(ref.mesh, unit, Physics::thermal);

        if (fixture.bc.kind == BcKind::subc) {
            remove_gauge(u_fem, ref.mesh, m_scalar, fixture.physics);
            remove_gauge(u_proj, ref.mesh, m_scalar, fixture.physics);
        }

        const int d = dofs_per_node(fixture.physics, 2);
        DifferenceReport rep = relative_difference(u_fem, u_proj, m_scalar, k_scalar, d);
        ConvergenceRow row;
        row.n = n;
        row.h = problem.grid.h_max();
        row.eta = row.h / problem.inclusion.characteristic_length();
        row.euclidean = rep.euclidean;
        row.l2 = rep.l2;
        row.h1_semi = rep.h1_semi;
        row.eta_warning = row.eta < 1.0;
        table.rows.push_back(row);
    }

    std::vector<double> hs, eu, l2, h1;
    for (const auto& r : table.rows) {
        hs.push_back(r.h);
        eu.push_back(r.euclidean);
        l2.push_back(r.l2);
        h1.push_back(r.h1_semi);
    }
    table.slope_euclidean = fit_loglog_slope(hs, eu);
    table.slope_l2 = fit_loglog_slope(hs, l2);
    table.slope_h1 = fit_loglog_slope(hs, h1);
    return table;
}

std::string EffectiveConvergenceTable::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "n,h,rel_diff\n";
    for (size_t i = 0; i < resolutions.size(); ++i)
        os << resolutions[i] << ',' << h[i] << ',' << rel_diff[i] << '\n';
    os << "slope,," << slope << '\n';
    return os.str();
}

EffectiveConvergenceTable effective_convergence(
    const std::function<PdfemProblem(int)>& problem_for, BcKind kind,
    const std::vector<int>& resolutions, int reference_n) {
    EffectiveConvergenceTable table;

    const PdfemProblem ref_problem = problem_for(reference_n);
    table.reference = run_battery(ref_problem, kind).tensor.matrix;
    double ref_norm = 0.0;
    for (int i = 0; i < table.reference.rows(); ++i)
        for (int j = 0; j < table.reference.cols(); ++j)
            ref_norm += table.reference(i, j) * table.reference(i, j);
    ref_norm = std::sqrt(ref_norm);

    for (int n : resolutions) {
        const PdfemProblem problem = problem_for(n);
        const DenseMatrix t = run_battery(problem, kind).tensor.matrix;
        double diff = 0.0;
        for (int i = 0; i < t.rows(); ++i)
            for (int j = 0; j < t.cols(); ++j) {
                const double d = t(i, j) - table.reference(i, j);
                diff += d * d;
            }
        table.resolutions.push_back(n);
        table.h.push_back(problem.grid.h_max());
        table.rel_diff.push_back(std::sqrt(diff) / ref_norm);
    }
    if (table.resolutions.size() >= 2)
        table.slope = fit_loglog_slope(table.h, table.rel_diff);
    return table;
}

std::string DifferenceReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{ \"euclidean\": " << euclidean << ", \"l2\": " << l2 << ", \"h1_semi\": " << h1_semi
       << ", \"n\": " << n << ", \"h\": " << h << ", \"conformal_dofs\": " << conformal_dofs
       << " }";
    return os.str();
}

} // namespace pdfem
