#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pvl {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (cached, thread-safe).
const QuadratureRule& gauss_legendre(int n);

/// Composite Gauss-Legendre rule on [a, b] with equal panels.
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order);

double integrate(const std::function<double(double)>& f, double a, double b, int panels = 16, int order = 16);

/// Bessel functions of the first kind J0, J1, J2 and the running integral
/// int_0^x J0(t) dt, from one Miller backward recurrence.
struct BesselValues {
    double j0 = 1.0;
    double j1 = 0.0;
    double j2 = 0.0;
    double int_j0 = 0.0;
};
BesselValues bessel_j012(double x);

/// Spherical Bessel j0, j1, j2 (stable for small arguments).
struct SphericalBesselValues {
    double j0 = 1.0;
    double j1 = 0.0;
    double j2 = 0.0;
};
SphericalBesselValues spherical_bessel_j012(double x);

/// Integral of exp(1/(|x|^2 - 1)) over the unit ball of R^dim (dim = 1, 2, 3).
double unit_bump_integral(int dim);

/// Constant c making c * exp(1/(|x|^2 - 1)) integrate to one over R^dim.
double mollifier_normalizer(int dim);

/// One-dimensional mollifier eta_eps(x) = eta(x / eps) / eps with unit mass.
double mollifier(double x, double eps);
/// int_{-inf}^t eta_eps.
double mollifier_cdf(double t, double eps);
/// int_{-inf}^t mollifier_cdf(u, eps) du.
double mollifier_cdf_integral(double t, double eps);

} // namespace pvl
