#include "pdfem/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pdfem/dense.hpp"
#include "pdfem/kernels.hpp"

namespace pdfem {

std::vector<double> ReducedSystem::recover(std::span<const double> x_free) const {
    std::vector<double> full = full_values;
    for (size_t i = 0; i < free_dofs.size(); ++i) full[free_dofs[i]] = x_free[i];
    return full;
}

ReducedSystem apply_dirichlet(const CsrMatrix& k, std::span<const double> rhs,
                              const DirichletBC& bc) {
    const int n = k.n_rows;
    std::vector<int> free_index(n, 0);
    for (size_t i = 0; i < bc.dofs.size(); ++i) {
        const int dof = bc.dofs[i];
        if (dof < 0 || dof >= n)
            throw ValidationError("dirichlet: constraint on nonexistent dof " + std::to_string(dof));
        if (free_index[dof] == -1)
            throw ValidationError("dirichlet: dof " + std::to_string(dof) + " constrained twice");
        if (!std::isfinite(bc.values[i]))
            throw ValidationError("dirichlet: non-finite prescribed value");
        free_index[dof] = -1;
    }

    ReducedSystem sys;
    sys.full_values.assign(n, 0.0);
    for (size_t i = 0; i < bc.dofs.size(); ++i) sys.full_values[bc.dofs[i]] = bc.values[i];

    for (int i = 0; i < n; ++i)
        if (free_index[i] != -1) {
            free_index[i] = static_cast<int>(sys.free_dofs.size());
            sys.free_dofs.push_back(i);
        }
    const int nf = static_cast<int>(sys.free_dofs.size());

    sys.k.n_rows = sys.k.n_cols = nf;
    sys.k.row_ptr.assign(nf + 1, 0);
    sys.rhs.assign(nf, 0.0);

    for (int fi = 0; fi < nf; ++fi) {
        const int i = sys.free_dofs[fi];
        double b = rhs[i];
        for (int kk = k.row_ptr[i]; kk < k.row_ptr[i + 1]; ++kk) {
            const int j = k.cols[kk];
            if (free_index[j] == -1) {
                b -= k.vals[kk] * sys.full_values[j];
            } else {
                sys.k.cols.push_back(free_index[j]);
                sys.k.vals.push_back(k.vals[kk]);
            }
        }
        sys.k.row_ptr[fi + 1] = static_cast<int>(sys.k.cols.size());
        sys.rhs[fi] = b;
    }
    return sys;
}

namespace {

double mode_dot(std::span<const double> rhs, const std::vector<double>& mode) {
    return kernels::dot(rhs, std::span<const double>(mode));
}

void check_equilibrium(std::span<const double> rhs, const std::vector<std::vector<double>>& modes) {
    const double rn = kernels::nrm2(rhs);
    for (const auto& m : modes) {
        const double mn = kernels::nrm2(m);
        if (std::abs(mode_dot(rhs, m)) > 1e-8 * std::max(rn * mn, 1e-300))
            throw EquilibriumError(
                "pure-Neumann load is not self-equilibrated (rigid-mode component "
                "exceeds 1e-8 relative)");
    }
}

std::vector<std::vector<double>> rigid_modes(Physics physics, std::span<const Vec3> pos, int dim) {
    const long n = static_cast<long>(pos.size());
    std::vector<std::vector<double>> modes;
    if (physics == Physics::thermal) {
        modes.emplace_back(n, 1.0);
        return modes;
    }
    const int d = dim;
    for (int c = 0; c < d; ++c) {
        std::vector<double> t(n * d, 0.0);
        for (long i = 0; i < n; ++i) t[i * d + c] = 1.0;
        modes.push_back(std::move(t));
    }
    if (d == 2) {
        std::vector<double> r(n * 2);
        for (long i = 0; i < n; ++i) {
            r[i * 2] = -pos[i][1];
            r[i * 2 + 1] = pos[i][0];
        }
        modes.push_back(std::move(r));
    } else {
        const int axes[3][2] = {{1, 2}, {2, 0}, {0, 1}}; // rotation about x, y, z
        for (const auto& ax : axes) {
            std::vector<double> r(n * 3, 0.0);
            for (long i = 0; i < n; ++i) {
                r[i * 3 + ax[0]] = -pos[i][ax[1]];
                r[i * 3 + ax[1]] = pos[i][ax[0]];
            }
            modes.push_back(std::move(r));
        }
    }
    return modes;
}

} // namespace

DirichletBC pin_rigid_modes_points(std::span<const double> rhs, Physics physics,
                                   std::span<const Vec3> positions, int dim) {
    check_equilibrium(rhs, rigid_modes(physics, positions, dim));

    DirichletBC bc;
    if (physics == Physics::thermal) {
        bc.add(0, 0.0);
        return bc;
    }
    const long n = static_cast<long>(positions.size());
    const long a = 0;
    long b = 0;
    double best = -1.0;
    for (long i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double dd = positions[i][c] - positions[a][c];
            d2 += dd * dd;
        }
        if (d2 > best) {
            best = d2;
            b = i;
        }
    }
    Vec3 ab{0, 0, 0};
    for (int c = 0; c < dim; ++c) ab[c] = positions[b][c] - positions[a][c];

    for (int c = 0; c < dim; ++c) bc.add(static_cast<int>(a) * dim + c, 0.0);
    if (dim == 2) {
        // block rotation about A: fix B's component across AB
        const int c = std::abs(ab[0]) >= std::abs(ab[1]) ? 1 : 0;
        bc.add(static_cast<int>(b) * 2 + c, 0.0);
    } else {
        // fix B's two components least aligned with AB, then one at C
        int order[3] = {0, 1, 2};
        std::sort(order, order + 3, [&](int x, int y) { return std::abs(ab[x]) < std::abs(ab[y]); });
        bc.add(static_cast<int>(b) * 3 + order[0], 0.0);
        bc.add(static_cast<int>(b) * 3 + order[1], 0.0);

        long cnode = 0;
        double bestc = -1.0;
        Vec3 w_best{0, 0, 0};
        for (long i = 0; i < n; ++i) {
            Vec3 ac{positions[i][0] - positions[a][0], positions[i][1] - positions[a][1],
                    positions[i][2] - positions[a][2]};
            const Vec3 w{ab[1] * ac[2] - ab[2] * ac[1], ab[2] * ac[0] - ab[0] * ac[2],
                         ab[0] * ac[1] - ab[1] * ac[0]};
            const double wn = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
            if (wn > bestc) {
                bestc = wn;
                cnode = i;
                w_best = w;
            }
        }
        int wc = 0;
        for (int c = 1; c < 3; ++c)
            if (std::abs(w_best[c]) > std::abs(w_best[wc])) wc = c;
        bc.add(static_cast<int>(cnode) * 3 + wc, 0.0);
    }
    return bc;
}

DirichletBC pin_rigid_modes(std::span<const double> rhs, Physics physics,
                            const StructuredGrid& grid) {
    std::vector<Vec3> pos(grid.node_count());
    for (long i = 0; i < grid.node_count(); ++i) pos[i] = grid.node_position(i);
    return pin_rigid_modes_points(rhs, physics, pos, grid.dim());
}

void remove_rigid_best_fit(std::span<double> u, Physics physics, std::span<const Vec3> positions,
                           int dim) {
    const auto modes = rigid_modes(physics, positions, dim);
    const int m = static_cast<int>(modes.size());
    DenseMatrix gram(m, m);
    std::vector<double> proj(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j)
            gram(i, j) = kernels::dot(modes[i], modes[j]);
        proj[i] = kernels::dot(std::span<const double>(u.data(), u.size()), modes[i]);
    }
    const std::vector<double> coef = dense_solve(gram, proj);
    for (int i = 0; i < m; ++i) kernels::axpy(-coef[i], modes[i], u);
}

// ---------------------------------------------------------------------------
// incomplete Cholesky, zero fill

Ic0 ic0_factor(const CsrMatrix& a) {
    const int n = a.n_rows;
    Ic0 f;
    f.lower.n_rows = f.lower.n_cols = n;
    f.lower.row_ptr.assign(n + 1, 0);

    // lower-triangular pattern of A (diagonal included)
    for (int i = 0; i < n; ++i) {
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1] && a.cols[k] <= i; ++k) {
            f.lower.cols.push_back(a.cols[k]);
            f.lower.vals.push_back(a.vals[k]);
        }
        f.lower.row_ptr[i + 1] = static_cast<int>(f.lower.cols.size());
        if (f.lower.row_ptr[i + 1] == f.lower.row_ptr[i] ||
            f.lower.cols[f.lower.row_ptr[i + 1] - 1] != i)
            return f; // structurally missing diagonal
    }

    CsrMatrix& L = f.lower;
    for (int i = 0; i < n; ++i) {
        const int row_begin = L.row_ptr[i], row_end = L.row_ptr[i + 1];
        for (int ki = row_begin; ki < row_end; ++ki) {
            const int j = L.cols[ki];
            // sparse dot of rows i and j over columns < j
            double s = 0.0;
            int pi = row_begin, pj = L.row_ptr[j];
            const int ei = ki, ej = L.row_ptr[j + 1] - 1; // exclude col j / diag j
            while (pi < ei && pj < ej) {
                const int ci = L.cols[pi], cj = L.cols[pj];
                if (ci == cj) {
                    s += L.vals[pi++] * L.vals[pj++];
                } else if (ci < cj) {
                    ++pi;
                } else {
                    ++pj;
                }
            }
            if (j < i) {
                const double djj = L.vals[L.row_ptr[j + 1] - 1];
                if (djj == 0.0) return f;
                L.vals[ki] = (L.vals[ki] - s) / djj;
            } else {
                const double d = L.vals[ki] - s;
                if (!(d > 0.0)) return f; // breakdown
                L.vals[ki] = std::sqrt(d);
            }
        }
    }
    f.upper = csr_transpose(f.lower);
    f.ok = true;
    return f;
}

void Ic0::apply(std::span<const double> r, std::span<double> z) const {
    const int n = lower.n_rows;
    // forward: L y = r
    for (int i = 0; i < n; ++i) {
        double s = r[i];
        const int end = lower.row_ptr[i + 1] - 1;
        for (int k = lower.row_ptr[i]; k < end; ++k) s -= lower.vals[k] * z[lower.cols[k]];
        z[i] = s / lower.vals[end];
    }
    // backward: L^T z = y  (rows of upper hold columns of L)
    for (int i = n - 1; i >= 0; --i) {
        double s = z[i];
        const int begin = upper.row_ptr[i] + 1;
        for (int k = begin; k < upper.row_ptr[i + 1]; ++k) s -= upper.vals[k] * z[upper.cols[k]];
        z[i] = s / upper.vals[upper.row_ptr[i]];
    }
}

std::string SolveReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{ \"iterations\": " << iterations << ", \"residual\": " << rel_residual
       << ", \"seconds\": " << seconds << ", \"solver\": \"" << solver
       << "\", \"preconditioner\": \"" << preconditioner << "\""
       << (fallback ? ", \"fallback\": true" : "") << " }";
    return os.str();
}

SolveResult solve_cg(const CsrMatrix& k, std::span<const double> rhs, const CgOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(opts.tol > 0.0)) throw ValidationError("solve_cg: tol must be > 0");
    const int n = k.n_rows;
    if (k.n_cols != n || static_cast<int>(rhs.size()) != n)
        throw ValidationError("solve_cg: dimension mismatch");

    SolveResult res;
    res.x.assign(n, 0.0);

    const double rhs_norm = kernels::nrm2(rhs);
    if (rhs_norm == 0.0) {
        res.converged = true;
        res.report.preconditioner =
            opts.preconditioner == Preconditioner::ic0
                ? "ic0"
                : (opts.preconditioner == Preconditioner::jacobi ? "jacobi" : "none");
        return res;
    }

    Ic0 ic;
    std::vector<double> diag_inv;
    Preconditioner precond = opts.preconditioner;
    if (precond == Preconditioner::ic0) {
        ic = ic0_factor(k);
        if (ic.ok) {
            res.report.preconditioner = "ic0";
        } else {
            precond = Preconditioner::jacobi;
            res.report.fallback = true;
            res.report.preconditioner = "ic0->jacobi";
        }
    }
    if (precond == Preconditioner::jacobi) {
        diag_inv.assign(n, 1.0);
        for (int i = 0; i < n; ++i) {
            const double d = k.get(i, i);
            if (d > 0.0) diag_inv[i] = 1.0 / d;
        }
        if (res.report.preconditioner.empty()) res.report.preconditioner = "jacobi";
    }
    if (precond == Preconditioner::none) res.report.preconditioner = "none";

    const auto apply_precond = [&](std::span<const double> r, std::span<double> z) {
        switch (precond) {
            case Preconditioner::ic0:
                ic.apply(r, z);
                break;
            case Preconditioner::jacobi:
                for (int i = 0; i < n; ++i) z[i] = r[i] * diag_inv[i];
                break;
            case Preconditioner::none:
                std::copy(r.begin(), r.end(), z.begin());
                break;
        }
    };

    const long max_iter =
        opts.max_iter > 0 ? opts.max_iter
                          : static_cast<long>(20.0 * std::sqrt(static_cast<double>(n))) + 1000;

    std::vector<double> r(rhs.begin(), rhs.end());
    std::vector<double> z(n), p(n), q(n);
    apply_precond(r, z);
    std::copy(z.begin(), z.end(), p.begin());
    double rz = kernels::dot(r, z);

    std::vector<double> best_x = res.x;
    double best_rel = 1.0;

    for (long it = 1; it <= max_iter; ++it) {
        k.multiply(p, q);
        const double pq = kernels::dot(p, q);
        if (!(pq > 0.0)) break; // lost positive-definiteness; keep best iterate
        const double alpha = rz / pq;
        kernels::axpy(alpha, p, res.x);
        kernels::axpy(-alpha, q, r);

        const double rel = kernels::nrm2(r) / rhs_norm;
        res.report.iterations = it;
        if (rel < best_rel) {
            best_rel = rel;
            best_x = res.x;
        }
        if (rel <= opts.tol) {
            res.converged = true;
            break;
        }

        apply_precond(r, z);
        const double rz_new = kernels::dot(r, z);
        kernels::axpby(1.0, z, rz_new / rz, p);
        rz = rz_new;
    }

    if (!res.converged) res.x = best_x;
    res.report.rel_residual = res.converged ? kernels::nrm2(r) / rhs_norm : best_rel;
    res.report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace pdfem
