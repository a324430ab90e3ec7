#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvl/evolve.hpp"
#include "pvl/identities.hpp"
#include "pvl/meridional.hpp"
#include "pvl/report.hpp"

namespace pvl {

struct GridBlock {
    int dim = 2;
    int points = 256;
    double half_width = 4.0;

    friend bool operator==(const GridBlock&, const GridBlock&) = default;
};

/// Generators: zero, radial_vortex, generic, anisotropic, blobs,
/// taylor_green, axisymmetric (meridional block), axisymmetric_3d.
struct GeneratorBlock {
    std::string name = "radial_vortex";
    std::map<std::string, double> params;
    bool symmetrize = false;
    std::uint64_t seed = 1;

    friend bool operator==(const GeneratorBlock&, const GeneratorBlock&) = default;
};

struct PressureBlock {
    std::string solver = "truncated"; // or "cell_average"
    double meridional_tolerance = 1e-10;

    friend bool operator==(const PressureBlock&, const PressureBlock&) = default;
};

/// identity: hyperplane, global, sphere_formula, sign_sweep,
/// axisymmetric_decay, weak_form. Scalars are stored as one-element lists.
struct CheckBlock {
    std::string identity;
    std::map<std::string, std::vector<double>> params;
    std::optional<double> tolerance;

    friend bool operator==(const CheckBlock&, const CheckBlock&) = default;
};

struct EvolveBlock {
    double viscosity = 0.01;
    double t_end = 0.5;
    std::optional<double> dt; // upper bound on the step; CFL-limited otherwise
    double window = 2.0;
    int snapshots = 5;
    bool symmetrize = false;

    friend bool operator==(const EvolveBlock&, const EvolveBlock&) = default;
};

struct MeridionalBlock {
    int ambient_dim = 3;
    int n_rho = 1024;
    int n_z = 1024;
    double rho_max = 12.0;
    double z_half = 12.0;
    bool periodic_z = false;
    std::vector<MeridionalBump> bumps{{1.5, 0.0, 0.75, 1.0}};

    friend bool operator==(const MeridionalBlock& a, const MeridionalBlock& b);
};

struct OutputBlock {
    std::string directory = "pvl-out";
    std::string format = "both"; // json, csv or both
    bool write_fields = true;

    friend bool operator==(const OutputBlock&, const OutputBlock&) = default;
};

struct RunConfig {
    GridBlock grid;
    GeneratorBlock generator;
    PressureBlock pressure;
    std::vector<CheckBlock> checks;
    std::optional<EvolveBlock> evolve;
    std::optional<MeridionalBlock> meridional;
    OutputBlock output;

    /// Throws Error(Config) with line and column for malformed JSON, and for
    /// unknown keys, generators or identities.
    static RunConfig parse(std::string_view text);
    static RunConfig load(const std::filesystem::path& path);
    [[nodiscard]] std::string to_json() const;
    /// Throws Error(Config) for out-of-range parameters.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct RunResult {
    std::vector<IdentityReport> reports;
    ReportSummary summary;
    std::map<std::string, std::string> metadata;
    /// 0 iff every report that is not hypothesis-violated passes.
    int exit_code = 0;
};

/// Fields produced by a generator; exactly one of the members is set.
struct GeneratedField {
    std::optional<VectorField> velocity;
    std::optional<MeridionalField> meridional;
};

GeneratedField synthesize(const RunConfig& config);

/// Runs the configured checks on given fields. Computes the pressure when it
/// is absent.
RunResult check_fields(const RunConfig& config, const VectorField& v, std::optional<ScalarField> p = std::nullopt);
RunResult check_fields(const RunConfig& config, MeridionalField mf);

/// synth -> pressure -> checks (-> evolve). Writes fields, reports and a
/// summary to out_dir; on error leaves a FAILED marker next to the partial
/// artifacts and rethrows.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir);

inline constexpr double kDivergenceGate = 5e-4;

/// Checks externally produced PVLF fields. Velocity files must be divergence
/// free, relative_divergence(v) <= kDivergenceGate, else Error(Divergence).
RunResult verify_external(const std::filesystem::path& velocity_file,
                          const std::optional<std::filesystem::path>& pressure_file, const RunConfig& config);

/// Weak relative divergence: max_c |int v . grad g_c| / max_c int |v_j d_j g_c|
/// over Gaussians g_c of width L/8 centred on a 9^dim lattice in [-L/2, L/2]^dim
/// (0 for v = 0). Only low wavenumbers enter, so aliasing in under-resolved
/// but solenoidal samples is not mistaken for divergence.
double relative_divergence(const VectorField& v);

/// Writes reports.json and/or reports.csv according to `format`.
void write_reports(const std::filesystem::path& dir, const RunResult& result, std::string_view format);

} // namespace pvl
