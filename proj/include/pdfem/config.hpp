#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pdfem/homogenize.hpp"

namespace pdfem {

/// Config mistake with a JSON-pointer-style path to the offending entry.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& path, const std::string& msg)
        : ValidationError(path + ": " + msg), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct InclusionConfig {
    std::string shape; // "disk", "square", "fiber", or "" when mesh_file set
    std::string mesh_file;
    Vec3 center{0.5, 0.5, 0.5};
    double diameter = 0.0, side = 0.0, target_h = 0.0;
    FiberSpec fiber;
};

struct ExplicitBc {
    struct Side {
        int axis = 0;
        bool max_side = false;
        std::vector<double> value; // dirichlet value or neumann flux/traction
    };
    std::vector<Side> dirichlet;
    std::vector<Side> neumann;
    double body_source = 0.0;
};

/// One declarative run: physics + grid + materials + inclusions + boundary
/// battery + solver + outputs. A config file fully reproduces a run.
struct ProblemConfig {
    Physics physics = Physics::thermal;
    int dimension = 2;
    std::array<int, 3> resolution{1, 1, 1};
    Vec3 origin{0, 0, 0};
    Vec3 side_lengths{1, 1, 1};

    // matrix phase coefficients
    double lambda_mat = 1.0;
    double bulk_mat = 1.0;
    double poisson = 0.3;
    // inclusion phase: explicit coefficient or contrast (mutually exclusive)
    std::optional<double> lambda_inc;
    std::optional<double> bulk_inc;
    std::optional<double> contrast;

    std::vector<InclusionConfig> inclusions;

    BcKind bc_kind = BcKind::kubc;
    bool bc_explicit = false;
    ExplicitBc explicit_bc;
    std::vector<double> macro; // for single-case solve; battery runs ignore it

    CgOptions solver;
    int threads = 1;

    std::string out_vtk, out_json, out_csv, out_mesh_vtk;

    static ProblemConfig from_json(const nlohmann::json& j);
    nlohmann::json to_effective_json() const;

    DenseMatrix coef_mat() const;
    DenseMatrix coef_inc() const;
    UnstructuredMesh build_inclusion_mesh() const; // merged; empty if none
    PdfemProblem build_problem() const;
};

ProblemConfig load_config(const std::string& path);

} // namespace pdfem
