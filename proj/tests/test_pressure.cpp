#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numbers>

#include "pvl/error.hpp"
#include "pvl/identities.hpp"
#include "pvl/pressure.hpp"
#include "pvl/special.hpp"
#include "pvl/synth.hpp"

using namespace pvl;

namespace {

constexpr double kPi = std::numbers::pi;

// Decaying solution of Laplace(u) = exp(-r^2 / s^2).
double gaussian_potential(double r, int dim, double s)
{
    if (dim == 2) {
        const double w = r * r / (s * s);
        const double core = w == 0.0 ? -std::numbers::egamma : std::log(w) + boost::math::expint(1, w);
        return 0.25 * s * s * core + 0.5 * s * s * std::log(s);
    }
    const double mass = std::pow(kPi, 1.5) * s * s * s;
    if (r == 0.0)
        return -mass / (4 * kPi) * 2.0 / (s * std::sqrt(kPi));
    return -mass / (4 * kPi * r) * boost::math::erf(r / s);
}

ScalarField gaussian(const GridSpec& g, double s)
{
    return ScalarField::from_function(g, [&](const Point& x) {
        double r2 = 0.0;
        for (int k = 0; k < g.dim(); ++k)
            r2 += x[k] * x[k];
        return std::exp(-r2 / (s * s));
    });
}

double max_error(const ScalarField& u, int dim, double s, double radius)
{
    const auto& g = u.grid();
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.node(i);
        double r2 = 0.0;
        for (int k = 0; k < dim; ++k)
            r2 += x[k] * x[k];
        if (r2 <= radius * radius)
            err = std::max(err, std::abs(u[i] - gaussian_potential(std::sqrt(r2), dim, s)));
    }
    return err;
}

} // namespace

TEST(FreeSpacePoisson, ManufacturedGaussian2d)
{
    const GridSpec g(2, 256, 4.0);
    const double s = 0.3;
    const auto u = free_space_poisson(gaussian(g, s));
    EXPECT_LT(max_error(u, 2, s, 2.0), 1e-8);
}

TEST(FreeSpacePoisson, ManufacturedGaussian3d)
{
    const GridSpec g(3, 64, 4.0);
    const double s = 0.4;
    const auto u = free_space_poisson(gaussian(g, s));
    EXPECT_LT(max_error(u, 3, s, 2.0), 1e-8);
}

TEST(FreeSpacePoisson, CellAverageKernelIsSecondOrder)
{
    const double s = 0.4;
    double prev = 0.0;
    for (int m : {64, 128, 256}) {
        const GridSpec g(2, m, 4.0);
        const double err = max_error(free_space_poisson(gaussian(g, s), GreenKernel::SampledCellAverage), 2, s, 2.0);
        if (prev > 0.0) {
            EXPECT_NEAR(std::log2(prev / err), 2.0, 0.3);
        }
        prev = err;
    }
}

TEST(PressureFreespace, RadialVortexMatchesClosedForm)
{
    const GridSpec g(2, 256, 4.0);
    const auto rv = radial_vortex_2d(default_vortex_profile(1.8), g);
    const auto p = pressure_freespace(rv.velocity);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(p[i] - rv.pressure[i]));
    EXPECT_LT(err / rv.pressure.max_abs(), 1e-6);
}

TEST(PressureFreespace, ZeroFieldGivesZeroPressure)
{
    const GridSpec g(3, 32, 2.0);
    EXPECT_EQ(pressure_freespace(VectorField(g)).max_abs(), 0.0);
}

TEST(PressureFreespace, RejectsFieldsLeavingTheHalfBox)
{
    const GridSpec g(2, 64, 2.0);
    const auto c = ScalarField::from_function(g, [](const Point& x) { return std::cos(x[1]); });
    const VectorField v(g, {c, ScalarField(g)});
    try {
        pressure_freespace(v);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotCompactlySupported);
    }
    EXPECT_GT(support_leakage(v), 0.5);
}

TEST(PressureSource, MatchesDivergenceOfTensor)
{
    const GridSpec g(2, 128, 4.0);
    const auto rv = radial_vortex_2d(default_vortex_profile(1.5), g);
    const auto src = pressure_source(rv.velocity);
    // for a radial vortex -d_j d_k (v_j v_k) = (1/r) d_r (f^2)
    EXPECT_NEAR(src.integral(), 0.0, 1e-10);
    EXPECT_GT(src.max_abs(), 0.1);
}

TEST(WeakForm, VortexAndRampTestFunctions)
{
    const GridSpec g(2, 256, 4.0);
    const auto rv = radial_vortex_2d(default_vortex_profile(1.0), g);
    const auto p = pressure_freespace(rv.velocity);
    for (const auto& h : weak_form_test_functions(g, 12, 3)) {
        const double scale = weak_form_scale(rv.velocity, p, h);
        EXPECT_LE(std::abs(weak_form_residual(rv.velocity, p, h)), 1e-6 * scale);
    }
}

TEST(WeakForm, ResidualIsLinearInPressure)
{
    const GridSpec g(2, 128, 4.0);
    const auto v = generic_field(g, GenericFieldSpec{3, 0.25, 5});
    const auto p = pressure_freespace(v);
    const auto h = bump(BumpSpec{{0.2, 0.1, 0.0}, 1.0, 1.0}, g);
    const auto blip = bump(BumpSpec{{-0.4, 0.3, 0.0}, 0.6, 1e-3}, g);
    const double shift = pointwise_product(blip, laplacian(h)).integral();
    const double delta = weak_form_residual(v, p + blip, h) - weak_form_residual(v, p, h);
    EXPECT_NEAR(delta, shift, 1e-8 * std::abs(shift) + 1e-15);
}

TEST(RampFunction, ConstraintAndDerivatives)
{
    EXPECT_THROW(RampFunction(1.0, 2.0, 0.6), Error);
    EXPECT_THROW(RampFunction(0.2, 2.0, 0.3), Error);
    const RampFunction phi(0.5, 1.5, 0.2);
    using boost::math::quadrature::gauss_kronrod;
    for (double r : {0.2, 0.6, 1.0, 1.6, 2.5}) {
        const double d = gauss_kronrod<double, 61>::integrate(
            [&](double t) { return phi.second_derivative(t); }, 0.0, r, 10, 1e-14);
        EXPECT_NEAR(phi.derivative(r), d, 1e-12);
        const double v = gauss_kronrod<double, 61>::integrate(
            [&](double t) { return phi.derivative(t); }, 0.0, r, 10, 1e-14);
        EXPECT_NEAR(phi.value(r), v, 1e-12);
    }
    EXPECT_DOUBLE_EQ(phi.derivative(0.2), 0.0);
    EXPECT_DOUBLE_EQ(phi.derivative(2.0), 0.0);
    EXPECT_NEAR(phi.value(2.0), 1.0, 1e-14);
}
