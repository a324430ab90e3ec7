#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pvl/grid.hpp"
#include "pvl/meridional.hpp"
#include "pvl/special.hpp"

namespace pvl {

/// amplitude * exp(1 / (|x - center|^2 / radius^2 - 1)) inside the ball, zero outside.
struct BumpSpec {
    Point center{0.0, 0.0, 0.0};
    double radius = 1.0;
    double amplitude = 1.0;
};

double bump_value(const BumpSpec& spec, const Point& x, int dim);

/// Throws Error(Margin) unless the ball lies inside [-L/2, L/2]^dim.
ScalarField bump(const BumpSpec& spec, const GridSpec& grid);
ScalarField bump_sum(std::span<const BumpSpec> specs, const GridSpec& grid);

/// A function of one radial variable together with a composite Gauss-Legendre
/// tabulation on [0, support]. The function vanishes beyond `support`.
class RadialProfile {
public:
    RadialProfile() = default;
    RadialProfile(std::function<double(double)> f, double support, int panels = 64, int order = 16);

    [[nodiscard]] double operator()(double r) const { return r >= support_ ? 0.0 : f_(r); }
    [[nodiscard]] double support() const noexcept { return support_; }
    [[nodiscard]] std::span<const double> nodes() const noexcept { return rule_.nodes; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return rule_.weights; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Quadrature of g(r) * f(r) over [0, support] on the tabulation nodes.
    [[nodiscard]] double integrate(const std::function<double(double r, double f)>& g) const;

private:
    std::function<double(double)> f_ = [](double) { return 0.0; };
    double support_ = 0.0;
    QuadratureRule rule_;
    std::vector<double> values_;
};

/// f(r) = amplitude * r * exp(1 / (r^2 / a^2 - 1)) for r < a.
RadialProfile default_vortex_profile(double a, double amplitude = 1.0);

struct RadialVortex {
    VectorField velocity;
    ScalarField pressure;
    RadialProfile pressure_profile; // p(r) = -int_r^inf f(s)^2 / s ds
};

/// v = f(r) e_theta about the origin with its exact pressure. Throws
/// Error(SingularAxis) if f(0) != 0 and Error(Margin) if the support exceeds L/2.
RadialVortex radial_vortex_2d(const RadialProfile& f, const GridSpec& grid);

/// dim 2: one scalar potential psi, v = (d2 psi, -d1 psi).
/// dim 3: three potential components A, v = curl A.
/// Throws Error(Arity) for any other number of potential components.
VectorField curl_potential(std::span<const ScalarField> potential, const GridSpec& grid);

/// Averages v over the proper rotations mapping the coordinate axes to
/// themselves (4 in 2D, 24 in 3D). Throws Error(GridCompatibility) if M % 4 != 0.
VectorField symmetrize(const VectorField& v);

class SecondMomentMatrix {
public:
    SecondMomentMatrix(int dim, std::array<double, 9> entries) : dim_(dim), m_(entries) {}

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] double operator()(int j, int k) const noexcept { return m_[3 * j + k]; }
    [[nodiscard]] double trace() const noexcept;
    /// Frobenius norm of the trace-free part.
    [[nodiscard]] double deviation() const noexcept;
    /// deviation() / trace(), or 0 for a zero matrix.
    [[nodiscard]] double anisotropy() const noexcept;

private:
    int dim_;
    std::array<double, 9> m_;
};

SecondMomentMatrix second_moments(const VectorField& v);

/// Deterministic 64-bit generator (splitmix64) with portable uniform draws.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() noexcept;
    double uniform() noexcept; // [0, 1)
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

struct GenericFieldSpec {
    int bumps = 4;
    double support_fraction = 0.25; // support radius as a fraction of L
    std::uint64_t seed = 1;
};

/// Random bump-sum potentials around the origin (one list per potential
/// component) supported within support_fraction * L.
std::vector<std::vector<BumpSpec>> random_potential_bumps(const GridSpec& grid, const GenericFieldSpec& spec);
std::vector<ScalarField> random_potential(const GridSpec& grid, const GenericFieldSpec& spec);

/// Curl of bump-sum potentials with exact derivatives, so the field vanishes
/// identically outside the bumps. Same arity rules as curl_potential.
VectorField curl_of_bumps(const GridSpec& grid, std::span<const std::vector<BumpSpec>> potential);

/// curl_of_bumps(random_potential_bumps(grid, spec)).
VectorField generic_field(const GridSpec& grid, const GenericFieldSpec& spec);

/// Negative control: curl of two overlapping bumps of opposite sign offset
/// along x_1 (a dipole). Divergence free with anisotropic second moments, so
/// its pressure is not integrable.
VectorField anisotropic_control(const GridSpec& grid, double support_fraction = 0.2);

/// Samples the N = 3 swirl-free axisymmetric field with Stokes stream function
/// given by meridional bumps onto a 3D grid (axis along x_3).
VectorField axisymmetric_field_3d(const GridSpec& grid, std::span<const MeridionalBump> bumps);

} // namespace pvl
