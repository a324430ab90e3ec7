#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pvl {

/// Uniform grid on the meridional half-plane rho in [0, P], z in [-Z, Z].
/// Non-periodic: n_z nodes including both ends z = -Z and z = Z.
/// Periodic: n_z nodes z_j = -Z + j * 2Z / n_z, period 2Z.
struct MeridionalGrid {
    int n_rho = 0;
    int n_z = 0;
    double rho_max = 0.0;
    double z_half = 0.0;
    bool periodic_z = false;

    [[nodiscard]] double h_rho() const noexcept { return rho_max / (n_rho - 1); }
    [[nodiscard]] double h_z() const noexcept { return periodic_z ? 2.0 * z_half / n_z : 2.0 * z_half / (n_z - 1); }
    [[nodiscard]] double rho(int i) const noexcept { return i * h_rho(); }
    [[nodiscard]] double z(int j) const noexcept { return -z_half + j * h_z(); }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(n_rho) * n_z; }
    [[nodiscard]] std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(i) * n_z + j; }
    [[nodiscard]] double period() const noexcept { return 2.0 * z_half; }

    /// Throws Error(InvalidField) for degenerate sizes or extents.
    void validate() const;

    friend bool operator==(const MeridionalGrid&, const MeridionalGrid&) = default;
};

/// Swirl-free axisymmetric field in R^N reduced to the (rho, x_N) half-plane.
/// Arrays are indexed [i * n_z + j] with i along rho and j along z.
struct MeridionalField {
    int ambient_dim = 3;
    MeridionalGrid grid;
    std::vector<double> v_rho;
    std::vector<double> v_z;
    std::vector<double> p; // empty until a pressure has been computed

    [[nodiscard]] bool has_pressure() const noexcept { return !p.empty(); }
    [[nodiscard]] int weight_exponent() const noexcept { return ambient_dim - 2; }

    /// Checks array sizes, finiteness and the axis row v_rho(0, z) = 0.
    void validate() const;
};

/// Analytic stream-function bump Psi(rho, z) = amplitude * exp(1/(s^2 - 1)),
/// s = |(rho, z) - center| / radius.
struct MeridionalBump {
    double rho_center = 1.5;
    double z_center = 0.0;
    double radius = 0.5;
    double amplitude = 1.0;
};

/// Discrete Stokes stream function construction: v_rho = -rho^{-(N-2)} dPsi/dz,
/// v_z = rho^{-(N-2)} dPsi/drho with second-order centred differences.
/// Throws Error(AxisRegularity) if Psi does not vanish on the first two rho rows.
MeridionalField meridional_streamfunction(int ambient_dim, const MeridionalGrid& grid, std::span<const double> psi);

/// Same construction with exact derivatives of a bump sum.
MeridionalField meridional_from_bumps(int ambient_dim, const MeridionalGrid& grid,
                                      std::span<const MeridionalBump> bumps);

/// Samples a bump sum of Psi on the grid.
std::vector<double> sample_meridional_bumps(const MeridionalGrid& grid, std::span<const MeridionalBump> bumps);

/// Second-order discrete axisymmetric divergence rho^{-m} D_rho(rho^m v_rho) + D_z v_z
/// (centred differences, zero on boundary rows).
std::vector<double> meridional_divergence(const MeridionalField& mf);

struct MeridionalSolveInfo {
    std::vector<double> residual_history; // relative max-norm residual after each pass
};

/// Solves rho^{-m} d_rho(rho^m d_rho p) + d_zz p = rhs with d_rho p = 0 on the
/// axis, p = 0 at rho = P and (non-periodic) at |z| = Z. Sine/Fourier transform
/// in z and a tridiagonal solve per mode in rho; refines until the relative
/// residual is <= tolerance or throws Error(SolverFailure).
std::vector<double> solve_meridional_poisson(int ambient_dim, const MeridionalGrid& grid,
                                             std::span<const double> rhs, double tolerance = 1e-10,
                                             MeridionalSolveInfo* info = nullptr);

/// Applies the discrete operator used by solve_meridional_poisson (for residuals
/// and manufactured tests). Boundary rows are returned as zero.
std::vector<double> apply_meridional_laplacian(int ambient_dim, const MeridionalGrid& grid,
                                               std::span<const double> p);

/// Right-hand side -div div(v (x) v) in the meridional reduction.
std::vector<double> meridional_pressure_source(const MeridionalField& mf);

/// Fills mf.p. Throws Error(Axis) if v_rho is nonzero on the axis row.
MeridionalField pressure_meridional(MeridionalField mf, double tolerance = 1e-10,
                                    MeridionalSolveInfo* info = nullptr);

} // namespace pvl
