#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvl/grid.hpp"
#include "pvl/meridional.hpp"
#include "pvl/quad.hpp"

namespace pvl {

enum class Status { Pass, Fail, HypothesisViolated };

std::string_view to_string(Status status) noexcept;

struct HypothesisDiagnostics {
    double moment_isotropy = 0.0; // trace-free second moments / trace
    double support_margin = 0.0;  // L/2 minus the support radius of v
    double tail_fraction = 0.0;   // |tail| / max(|lhs|, |rhs|, scale_floor)
};

struct IdentityReport {
    std::string identity;
    std::map<std::string, double> params;
    std::map<std::string, std::string> notes;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual_abs = 0.0;
    double residual_rel = 0.0;
    double scale_floor = 0.0;
    HypothesisDiagnostics hypothesis;
    Status status = Status::Pass;
    double tolerance = 0.0;
};

struct CheckOptions {
    double tolerance = 1e-3;
    double isotropy_bound = 1e-6; // gate on moment anisotropy
    double tail_budget = 0.1;     // sign-sweep gate: tail_fraction <= tail_budget * tolerance
};

/// Fills residual_abs, residual_rel and the pass/fail part of status from
/// lhs, rhs, scale_floor and tolerance. A report already marked
/// HypothesisViolated keeps that status.
void finalize(IdentityReport& report);

/// Radius of the smallest origin-centred ball holding all nonzero samples of v.
double support_radius(const VectorField& v);

/// 1e-12 (||v||_2^2 + ||p||_1).
double scale_floor(const VectorField& v, const ScalarField& p);

/// int_plane p = -int_plane (v . xi)^2. 2D planes take the pressure tail from
/// the exterior multipole expansion of v.
IdentityReport check_hyperplane(const VectorField& v, const ScalarField& p, const PlaneSpec& plane,
                                const CheckOptions& options = {});
IdentityReport check_hyperplane(const VectorField& v, const ScalarField& p, const PlaneSpec& plane,
                                const PressureMultipole& far, const CheckOptions& options = {});

/// int p = -int v_j^2 for every j, followed by the pairwise equalities
/// int v_j^2 = int v_k^2 (j < k).
std::vector<IdentityReport> check_global(const VectorField& v, const ScalarField& p,
                                         const CheckOptions& options = {});

/// (N-1) int_{|x|>R} p/|x| + int_{|x|=R} p = -int_{|x|=R} (v^r)^2 - int_{|x|>R} |v^tau|^2/|x|.
IdentityReport check_sphere_formula(const VectorField& v, const ScalarField& p, double radius,
                                    const CheckOptions& options = {});

struct SignSweep {
    std::vector<IdentityReport> reports;
    std::string verdict;
    bool contradiction = false;
};

/// int_{|x|>R} p/|x| <= 0 for every R, with the equality case checked
/// against the field beyond R.
SignSweep check_sign_sweep(const VectorField& v, const ScalarField& p, std::span<const double> radii,
                           const CheckOptions& options = {});

/// R = 0 followed by `count` log-spaced radii in [h, L/2].
std::vector<double> default_sweep_radii(const GridSpec& grid, int count = 31);

/// int p Laplace(h) = -sum_jk int v_j v_k d_j d_k h. residual_rel is the
/// weak-form residual divided by weak_form_scale.
IdentityReport check_weak_form(const VectorField& v, const ScalarField& p, const ScalarField& h,
                               const CheckOptions& options = {.tolerance = 1e-6});

/// `count` test functions: every third one is a ramp phi_{R1,R2,eps} with
/// random radii satisfying 0 < eps < min(R1, (R2 - R1)/2), the rest are random
/// bump sums inside the box.
std::vector<ScalarField> weak_form_test_functions(const GridSpec& grid, int count, std::uint64_t seed);

/// I(rho2) - I(rho1) = -(N-2) int_{rho1}^{rho2} int (v^rho)^2/rho dz drho, plus
/// monotonicity of I over `sweep_points` radii in [rho1, rho2].
IdentityReport check_axisymmetric_decay(const MeridionalField& mf, double rho1, double rho2,
                                        const CheckOptions& options = {.tolerance = 1e-2},
                                        int sweep_points = 64);

} // namespace pvl
