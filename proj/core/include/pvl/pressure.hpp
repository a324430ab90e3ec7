#pragma once

#include "pvl/grid.hpp"

namespace pvl {

/// Green's kernel used by the free-space solvers.
///  - Truncated: analytic Fourier transform of the kernel cut off beyond the
///    largest source-target distance (spectrally accurate).
///  - SampledCellAverage: kernel sampled on the doubled grid with the origin
///    cell replaced by its analytic cell average (second order).
enum class GreenKernel { Truncated, SampledCellAverage };

struct PressureOptions {
    GreenKernel kernel = GreenKernel::Truncated;
    bool check_support = true;
};

/// max |v| outside the ball of radius L/2 divided by max |v| (0 for v = 0).
double support_leakage(const VectorField& v);

/// -sum_jk d_j d_k (v_j v_k), spectral.
ScalarField pressure_source(const VectorField& v);

/// Decaying free-space solution of Laplace(p) = -sum_jk d_j d_k (v_j v_k),
/// evaluated on the grid of v. Throws Error(NotCompactlySupported) when
/// support_leakage(v) > 1e-12 and the check is enabled.
ScalarField pressure_freespace(const VectorField& v, const PressureOptions& options = {});

/// Decaying free-space solution of Laplace(u) = rhs for rhs supported in the
/// ball of radius L/2.
ScalarField free_space_poisson(const ScalarField& rhs, GreenKernel kernel = GreenKernel::Truncated);

/// int p Laplace(h) dx + sum_jk int v_j v_k d_j d_k h dx.
double weak_form_residual(const VectorField& v, const ScalarField& p, const ScalarField& h);

/// ||p||_1 ||Laplace h||_inf + ||v||_2^2 ||D^2 h||_inf.
double weak_form_scale(const VectorField& v, const ScalarField& p, const ScalarField& h);

/// phi(r) = int_0^r int_0^s (eta_eps(u - R1) - eta_eps(u - R2)) du ds.
/// Throws Error(Parameter) unless 0 < eps < min(R1, (R2 - R1) / 2).
class RampFunction {
public:
    RampFunction(double r1, double r2, double eps);

    [[nodiscard]] double r1() const noexcept { return r1_; }
    [[nodiscard]] double r2() const noexcept { return r2_; }
    [[nodiscard]] double eps() const noexcept { return eps_; }

    [[nodiscard]] double value(double r) const;
    [[nodiscard]] double derivative(double r) const;
    [[nodiscard]] double second_derivative(double r) const;

private:
    double r1_, r2_, eps_;
};

/// phi(|x|) sampled on the grid.
ScalarField ramp_test_function(double r1, double r2, double eps, const GridSpec& grid);

} // namespace pvl
