// pdfem command-line front end.
//
// Exit codes: 0 success, 1 numerical failure (non-convergence, equilibrium),
// 2 input/config error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pdfem/compare.hpp"
#include "pdfem/config.hpp"
#include "pdfem/msh_io.hpp"
#include "pdfem/vtk_io.hpp"

using namespace pdfem;
using nlohmann::json;

namespace {

struct PhaseTimer {
    using clock = std::chrono::steady_clock;
    clock::time_point mark = clock::now();
    std::map<std::string, double> phases;

    void lap(const std::string& name) {
        const auto now = clock::now();
        phases[name] += std::chrono::duration<double>(now - mark).count();
        mark = now;
    }

    json to_json() const {
        json j;
        for (const auto& [k, v] : phases) j[k] = v;
        return j;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << text;
}

int resolve_threads(const ProblemConfig& cfg, int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("PDFEM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return cfg.threads;
}

json tensor_json_with_bounds(const HomogenizeResult& result, const PdfemProblem& problem) {
    json j = json::parse(result.tensor.to_json());
    const double f = result.tensor.volume_fraction;
    if (f > 0.0) {
        const auto [reuss, voigt] = voigt_reuss_bounds(f, problem.coef_mat, problem.coef_inc);
        const BoundsCheck bc = check_bounds(result.tensor.matrix, reuss, voigt);
        json b;
        b["inside"] = bc.inside;
        b["min_eig_above_reuss"] = bc.min_eig_above_reuss;
        b["min_eig_below_voigt"] = bc.min_eig_below_voigt;
        j["bounds"] = b;
    }
    j["symmetry_error_rel"] = result.tensor.sym_error_rel();
    json reports = json::array();
    for (const auto& r : result.reports) reports.push_back(json::parse(r.to_json()));
    j["cases"] = reports;
    j["dofs_reduced"] = 0;
    return j;
}

int cmd_solve(const std::string& config_path, int cli_threads, bool dump_config) {
    ProblemConfig cfg = load_config(config_path);
    set_max_threads(resolve_threads(cfg, cli_threads));
    if (dump_config) {
        std::cout << cfg.to_effective_json().dump(2) << "\n";
        return 0;
    }
    PhaseTimer timer;
    PdfemProblem problem = cfg.build_problem();
    timer.lap("mesh");

    PdfemSystem sys(problem);
    timer.phases["substitution"] = sys.build_timings().substitution;
    timer.phases["assembly"] = sys.build_timings().assembly;
    timer.mark = PhaseTimer::clock::now();

    CaseSolution sol;
    if (cfg.bc_explicit) {
        // explicit Dirichlet/Neumann segments + body source on the grid
        const DofMap& dofmap = sys.dofmap();
        const int d = dofmap.dofs_per_node;
        NeumannSpec spec;
        for (const auto& s : cfg.explicit_bc.neumann)
            spec.sides.push_back({s.axis, s.max_side, s.value});
        BodySource body;
        if (cfg.explicit_bc.body_source != 0.0) {
            const double f0 = cfg.explicit_bc.body_source;
            body = [f0](const Vec3&, std::span<double> out) { out[0] = f0; };
        }
        std::vector<double> load = assemble_load(problem.grid, body, spec, dofmap);
        DirichletBC bc;
        std::vector<bool> seen(dofmap.dof_count(), false);
        for (const auto& s : cfg.explicit_bc.dirichlet) {
            const auto& n = problem.grid.resolution();
            for (long node = 0; node < problem.grid.node_count(); ++node) {
                const auto c = problem.grid.node_coords(node);
                if (c[s.axis] != (s.max_side ? n[s.axis] : 0)) continue;
                for (int comp = 0; comp < d; ++comp) {
                    const int dof = dofmap.reduced_dof(node, comp);
                    if (seen[dof]) continue;
                    seen[dof] = true;
                    bc.add(dof, s.value[comp]);
                }
            }
        }
        if (bc.dofs.empty())
            throw ValidationError("explicit bc: at least one dirichlet side is required");
        ReducedSystem rsys = apply_dirichlet(sys.matrix(), load, bc);
        SolveResult r = solve_cg(rsys.k, rsys.rhs, problem.solver);
        if (!r.converged)
            throw Error("solve did not converge: residual " + std::to_string(r.report.rel_residual));
        sol.u_full = rsys.recover(r.x);
        sol.report = r.report;
        if (sys.substitution().scalar.n_rows > 0) sol.v_inc = sys.substitution().apply(sol.u_full);
    } else {
        if (cfg.macro.empty())
            throw ConfigError("/bc", "solve needs macro data (gradient/flux/strain/stress)");
        LoadCase lc{cfg.bc_kind, cfg.macro};
        sol = sys.solve_case(lc);
    }
    timer.lap("solve");

    if (!cfg.out_vtk.empty()) {
        VtkField field;
        field.name = problem.physics == Physics::thermal ? "temperature" : "displacement";
        field.components = sys.dofmap().dofs_per_node;
        field.values = sol.u_full;
        write_vtk_grid(cfg.out_vtk, problem.grid, {field});
    }
    if (!cfg.out_mesh_vtk.empty() && !sol.v_inc.empty()) {
        VtkField field;
        field.name = problem.physics == Physics::thermal ? "temperature" : "displacement";
        field.components = sys.dofmap().dofs_per_node;
        field.values = sol.v_inc;
        write_vtk_mesh(cfg.out_mesh_vtk, problem.inclusion, {field});
    }
    timer.lap("post");

    json out = json::parse(sol.report.to_json());
    out["phases"] = timer.to_json();
    out["dofs_reduced"] = sys.dofmap().dof_count();
    out["dofs_full"] = sys.dofmap().full_dof_count();
    if (!cfg.out_json.empty()) write_text(cfg.out_json, out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_homogenize(const std::string& config_path, int cli_threads) {
    ProblemConfig cfg = load_config(config_path);
    set_max_threads(resolve_threads(cfg, cli_threads));
    PhaseTimer timer;
    PdfemProblem problem = cfg.build_problem();
    timer.lap("mesh");

    HomogenizeResult result = run_battery(problem, cfg.bc_kind);
    timer.lap("solve");

    json out = tensor_json_with_bounds(result, problem);
    out["dofs_reduced"] = (problem.periodic ? periodic_dofmap(problem.grid, problem.physics)
                                            : make_dofmap(problem.grid, problem.physics))
                              .dof_count();
    out["dofs_full"] = make_dofmap(problem.grid, problem.physics).full_dof_count();
    out["phases"] = timer.to_json();
    if (!cfg.out_json.empty()) write_text(cfg.out_json, out.dump(2) + "\n");
    if (!cfg.out_csv.empty()) write_text(cfg.out_csv, result.tensor.to_csv());
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& conformal_path,
                int cli_threads) {
    ProblemConfig cfg = load_config(config_path);
    set_max_threads(resolve_threads(cfg, cli_threads));
    if (cfg.macro.empty())
        throw ConfigError("/bc", "compare needs macro data (gradient/flux/strain/stress)");

    PdfemProblem problem = cfg.build_problem();
    if (problem.periodic)
        throw ConfigError("/bc/kind", "compare supports kubc and subc batteries");
    PdfemSystem sys(problem);
    const LoadCase lc{cfg.bc_kind, cfg.macro};
    const CaseSolution sol = sys.solve_case(lc);

    ConformalProblem ref;
    ref.mesh = read_msh_file(conformal_path);
    ref.physics = problem.physics;
    ref.coef_mat = problem.coef_mat;
    ref.coef_inc = problem.coef_inc;
    ref.solver = problem.solver;
    std::vector<double> u_fem = solve_conformal(ref, lc);
    std::vector<double> u_proj = project_pdfem(problem.grid, ref.mesh, sol.u_full, problem.physics);

    const CsrMatrix m_scalar = assemble_mass_mesh(ref.mesh, 1);
    const std::map<int, DenseMatrix> unit{{1, DenseMatrix::identity(ref.mesh.dim)},
                                          {2, DenseMatrix::identity(ref.mesh.dim)}};
    const CsrMatrix k_scalar = assemble_unstructured(ref.mesh, unit, Physics::thermal);
    if (cfg.bc_kind == BcKind::subc) {
        remove_gauge(u_fem, ref.mesh, m_scalar, problem.physics);
        remove_gauge(u_proj, ref.mesh, m_scalar, problem.physics);
    }

    const int d = dofs_per_node(problem.physics, problem.dim());
    DifferenceReport rep = relative_difference(u_fem, u_proj, m_scalar, k_scalar, d);
    rep.n = problem.grid.resolution()[0];
    rep.h = problem.grid.h_max();

    const auto [max_rel, node] = max_nodal_discrepancy(u_fem, u_proj, d);
    json out = json::parse(rep.to_json());
    out["max_nodal_rel"] = max_rel;
    out["max_nodal_node"] = node;

    if (!cfg.out_vtk.empty()) {
        VtkField diff;
        diff.name = "difference";
        diff.components = d;
        diff.values.resize(u_fem.size());
        for (size_t i = 0; i < u_fem.size(); ++i) diff.values[i] = u_fem[i] - u_proj[i];
        VtkField fem;
        fem.name = "reference";
        fem.components = d;
        fem.values = u_fem;
        write_vtk_mesh(cfg.out_vtk, ref.mesh, {diff, fem});
    }
    if (!cfg.out_json.empty()) write_text(cfg.out_json, out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_converge(const std::string& config_path, std::vector<int> resolutions,
                 const std::vector<std::string>& conformal_refs, const std::string& mode,
                 int reference_n, int cli_threads) {
    ProblemConfig cfg = load_config(config_path);
    set_max_threads(resolve_threads(cfg, cli_threads));

    if (mode == "effective") {
        const auto problem_for = [&cfg](int n) {
            ProblemConfig c = cfg;
            c.resolution = {n, n, n};
            for (auto& ic : c.inclusions) {
                // keep inclusion meshes finer than the grid
                if (ic.shape == "disk" || ic.shape == "square")
                    ic.target_h = 0.5 / n;
                else if (ic.shape == "fiber") {
                    ic.fiber.axial_subdivisions = std::max(ic.fiber.axial_subdivisions, 3 * n);
                    ic.fiber.circumferential_subdivisions =
                        std::max(ic.fiber.circumferential_subdivisions,
                                 static_cast<int>(std::ceil(2 * M_PI * ic.fiber.radius * 2 * n)));
                }
            }
            return c.build_problem();
        };
        const EffectiveConvergenceTable table =
            effective_convergence(problem_for, cfg.bc_kind, resolutions, reference_n);
        if (!cfg.out_csv.empty()) write_text(cfg.out_csv, table.to_csv());
        std::cout << table.to_csv();
        return 0;
    }

    if (conformal_refs.size() != resolutions.size())
        throw ValidationError("converge: need one conformal reference mesh per resolution");
    if (cfg.macro.empty())
        throw ConfigError("/bc", "converge needs macro data (gradient/flux/strain/stress)");
    if (cfg.inclusions.size() != 1 || cfg.inclusions[0].shape != "disk")
        throw ValidationError("converge field mode expects a single generated disk inclusion");

    std::map<int, std::string> ref_by_n;
    for (size_t i = 0; i < resolutions.size(); ++i) ref_by_n[resolutions[i]] = conformal_refs[i];

    ConvergenceFixture fixture;
    fixture.physics = cfg.physics;
    fixture.coef_mat = cfg.coef_mat();
    fixture.coef_inc = cfg.coef_inc();
    fixture.bc = LoadCase{cfg.bc_kind, cfg.macro};
    fixture.solver = cfg.solver;
    const InclusionConfig ic = cfg.inclusions[0];
    fixture.inclusion_for = [ic](int n) {
        return gen_disk_mesh(ic.center, ic.diameter, 0.5 / n);
    };
    fixture.conformal_for = [&ref_by_n](int n) { return read_msh_file(ref_by_n.at(n)); };

    const ConvergenceTable table = convergence_study(fixture, resolutions);
    if (!cfg.out_csv.empty()) write_text(cfg.out_csv, table.to_csv());
    std::cout << table.to_csv();
    return 0;
}

int cmd_check_pixelization(const std::string& config_path, int samples) {
    ProblemConfig cfg = load_config(config_path);
    PdfemProblem problem = cfg.build_problem();
    if (problem.inclusion.node_count() == 0)
        throw ValidationError("check-pixelization: config has no inclusions");

    const PixelizationReport rep =
        check_enveloping(problem.grid, problem.inclusion, samples, problem.periodic);
    if (!cfg.out_json.empty()) write_text(cfg.out_json, rep.to_json());
    if (!cfg.out_vtk.empty()) {
        VtkField mask;
        mask.name = "pixel_mask";
        mask.components = 1;
        mask.values.assign(problem.grid.cell_count(), 0.0);
        for (long c : rep.covered_cells) mask.values[c] = 1.0;
        for (long c : rep.gap_cells) mask.values[c] = -1.0;
        write_vtk_grid(cfg.out_vtk, problem.grid, {}, {mask});
    }
    std::cout << rep.to_json();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phantom-domain finite element solver and homogenization toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker cap (default: PDFEM_THREADS or config)");

    std::string config_path, conformal_path, out_path, mode = "field";
    std::vector<int> resolutions;
    std::vector<std::string> conformal_refs;
    int reference_n = 0, samples = 10;
    bool dump_config = false;

    auto* solve = app.add_subcommand("solve", "solve one boundary value problem");
    solve->add_option("config", config_path)->required();
    solve->add_flag("--dump-effective-config", dump_config,
                    "print the resolved config with defaults and exit");

    auto* homog = app.add_subcommand("homogenize", "run a load-case battery, report the tensor");
    homog->add_option("config", config_path)->required();

    auto* compare = app.add_subcommand("compare", "compare against a conformal reference solve");
    compare->add_option("config", config_path)->required();
    compare->add_option("conformal_mesh", conformal_path)->required();

    auto* converge = app.add_subcommand("converge", "field or effective-coefficient convergence");
    converge->add_option("config", config_path)->required();
    converge->add_option("--resolutions", resolutions)->required()->expected(-1);
    converge->add_option("--conformal", conformal_refs, "one MSH file per resolution");
    converge->add_option("--mode", mode, "field (default) or effective");
    converge->add_option("--reference-n", reference_n, "reference resolution (effective mode)");

    auto* mesh = app.add_subcommand("mesh", "inclusion mesh generators");
    mesh->require_subcommand(1);
    std::vector<double> center{0.5, 0.5, 0.5};
    double diameter = 0.3, side = 0.3, target_h = 0.02, radius = 0.1;
    int axial = 30, circumferential = 24;
    bool wrap = false;
    std::vector<std::vector<double>> control_points;

    auto* gdisk = mesh->add_subcommand("gen-disk");
    gdisk->add_option("--center", center)->expected(2);
    gdisk->add_option("--diameter", diameter);
    gdisk->add_option("--target-h", target_h);
    gdisk->add_option("-o,--output", out_path)->required();

    auto* gsquare = mesh->add_subcommand("gen-square");
    gsquare->add_option("--center", center)->expected(2);
    gsquare->add_option("--side", side);
    gsquare->add_option("--target-h", target_h);
    gsquare->add_option("-o,--output", out_path)->required();

    auto* gfiber = mesh->add_subcommand("gen-fiber");
    gfiber->add_option("--point", control_points, "control point x y z (repeatable)")
        ->expected(3)
        ->required();
    gfiber->add_option("--radius", radius);
    gfiber->add_option("--axial", axial);
    gfiber->add_option("--circumferential", circumferential);
    gfiber->add_flag("--periodic-wrap", wrap);
    gfiber->add_option("-o,--output", out_path)->required();

    auto* checkpix = app.add_subcommand("check-pixelization", "pixelization / enveloping report");
    checkpix->add_option("config", config_path)->required();
    checkpix->add_option("--samples", samples, "interior sample points per inclusion element");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return cmd_solve(config_path, threads, dump_config);
        if (*homog) return cmd_homogenize(config_path, threads);
        if (*compare) return cmd_compare(config_path, conformal_path, threads);
        if (*converge)
            return cmd_converge(config_path, resolutions, conformal_refs, mode, reference_n,
                                threads);
        if (*checkpix) return cmd_check_pixelization(config_path, samples);
        if (*gdisk) {
            write_msh_file(out_path, gen_disk_mesh({center[0], center[1], 0}, diameter, target_h));
            std::cout << "wrote " << out_path << "\n";
            return 0;
        }
        if (*gsquare) {
            write_msh_file(out_path, gen_square_mesh({center[0], center[1], 0}, side, target_h));
            std::cout << "wrote " << out_path << "\n";
            return 0;
        }
        if (*gfiber) {
            FiberSpec spec;
            for (const auto& p : control_points) spec.control_points.push_back({p[0], p[1], p[2]});
            spec.radius = radius;
            spec.axial_subdivisions = axial;
            spec.circumferential_subdivisions = circumferential;
            spec.periodic_wrap = wrap;
            write_msh_file(out_path, gen_fiber_mesh(spec));
            std::cout << "wrote " << out_path << "\n";
            return 0;
        }
    } catch (const EquilibriumError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const LocationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        // numerical failures (non-convergence and friends)
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
