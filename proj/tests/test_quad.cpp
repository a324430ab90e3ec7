#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "pvl/error.hpp"
#include "pvl/pressure.hpp"
#include "pvl/quad.hpp"
#include "pvl/special.hpp"
#include "pvl/synth.hpp"

using namespace pvl;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

double gk(const std::function<double(double)>& f, double a, double b)
{
    return gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-14);
}

struct VortexCase {
    GridSpec grid{2, 256, 4.0};
    RadialVortex rv = radial_vortex_2d(default_vortex_profile(1.0), grid);
    ScalarField p = pressure_freespace(rv.velocity);
};

const VortexCase& vortex()
{
    static const VortexCase c;
    return c;
}

} // namespace

TEST(RadialSpectrum, SphereAndShellIntegralsOfVortexPressure)
{
    const auto& c = vortex();
    const auto& prof = c.rv.pressure_profile;
    const RadialSpectrum sp(c.p);
    for (double r : {0.25, 0.5, 0.9, 1.5}) {
        const double sphere = 2 * kPi * r * prof(r);
        EXPECT_NEAR(sp.sphere(r), sphere, 1e-6 * std::abs(prof(0.0)) * 2 * kPi * r);
        EXPECT_NEAR(sphere_integral(c.p, r), sphere, 1e-6 * std::abs(prof(0.0)) * 2 * kPi * r);
        const double ball = 2 * kPi * gk([&](double s) { return s * prof(s); }, 0.0, r);
        EXPECT_NEAR(sp.ball(r), ball, 1e-6 * std::abs(ball));
    }
    const double shell = 2 * kPi * gk([&](double s) { return prof(s); }, 0.3, 1.0);
    EXPECT_NEAR(sp.shell_weighted(0.3, 1.8), shell, 1e-6 * std::abs(shell));
    const auto q = shell_weighted_integral(c.p, 0.3);
    EXPECT_NEAR(q.value, shell, 1e-6 * std::abs(shell));
}

TEST(SphereIntegral, NodeRuleAgreesOffCentre)
{
    const auto& c = vortex();
    const Point centre{0.2, -0.1, 0.0};
    const auto rule = SphereRule::make(2, 0.7, c.grid.spacing(), centre);
    EXPECT_NEAR(rule.area(), 2 * kPi * 0.7, 1e-12);
    EXPECT_NEAR(sphere_integral(c.p, 0.7, centre), sphere_integral(c.p, rule), 1e-10);
    EXPECT_THROW(sphere_integral(c.p, 1.95, centre), Error);
}

TEST(SphereRule, IntegratesPolynomialsOnTheSphere)
{
    const auto rule = SphereRule::make(3, 1.0, 0.05);
    double area = 0.0, z2 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        area += rule.weights[i];
        z2 += rule.weights[i] * rule.nodes[i][2] * rule.nodes[i][2];
    }
    EXPECT_NEAR(area, 4 * kPi, 1e-12);
    EXPECT_NEAR(z2, 4 * kPi / 3, 1e-12);
}

TEST(PlaneIntegral, GaussianLinesAndPlanes)
{
    const double s = 0.4;
    const GridSpec g2(2, 128, 4.0);
    const auto f2 = ScalarField::from_function(g2, [&](const Point& x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (s * s));
    });
    const double d = 0.35;
    const PlaneSpec line{{0.6, 0.8, 0.0}, {0.6 * d, 0.8 * d, 0.0}};
    EXPECT_NEAR(plane_integral(f2, line).value, std::sqrt(kPi) * s * std::exp(-d * d / (s * s)), 1e-10);

    const GridSpec g3(3, 64, 4.0);
    const auto f3 = ScalarField::from_function(g3, [&](const Point& x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (s * s));
    });
    const PlaneSpec plane{{0.0, 0.6, 0.8}, {0.0, 0.6 * d, 0.8 * d}};
    EXPECT_NEAR(plane_integral(f3, plane).value, kPi * s * s * std::exp(-d * d / (s * s)), 1e-10);
    EXPECT_THROW(PlaneSpec({{1.0, 1.0, 0.0}, {}}).validate(2), Error);
}

TEST(PlaneIntegral, MissingPlaneIsFlagged)
{
    const GridSpec g(2, 32, 1.0);
    const PlaneSpec far{{1.0, 0.0, 0.0}, {5.0, 0.0, 0.0}};
    const auto q = plane_integral(ScalarField(g), far);
    EXPECT_FALSE(q.intersects);
    EXPECT_EQ(q.value, 0.0);
}

TEST(VolumeIntegral, CompactIntegrandHasNoTail)
{
    const GridSpec g(2, 256, 4.0);
    const auto q = volume_integral(bump(BumpSpec{{0.0, 0.0, 0.0}, 0.9, 1.0}, g));
    EXPECT_NEAR(q.value, 0.81 * unit_bump_integral(2), 1e-6);
    EXPECT_LT(std::abs(q.tail), 1e-6);
}

TEST(PressureMultipole, MatchesSolverAndRayQuadrature)
{
    const GridSpec g(2, 512, 2.0);
    const auto v = generic_field(g, GenericFieldSpec{4, 0.25, 21});
    const auto p = pressure_freespace(v);
    const PressureMultipole far(v);
    EXPECT_GT(far.radius(), 0.0);
    EXPECT_LE(far.radius(), 1.0 + 2 * g.spacing());
    EXPECT_GE(far.leading_exponent(), 2.0);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 13) {
        const auto x = g.node(i);
        if (std::hypot(x[0], x[1]) > 1.5 * far.radius())
            err = std::max(err, std::abs(p[i] - far.value(x)));
    }
    EXPECT_LT(err, 2e-4 * p.max_abs());

    const Point x0{1.5, 0.4, 0.0}, eta{0.0, 1.0, 0.0};
    const double t0 = 0.5;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double oracle = ts.integrate(
        [&](double t) { return far.value(Point{x0[0] + t * eta[0], x0[1] + t * eta[1], 0.0}); }, t0,
        std::numeric_limits<double>::infinity());
    EXPECT_NEAR(far.ray_integral(x0, eta, t0), oracle, 1e-10 * std::abs(oracle) + 1e-14);
    EXPECT_THROW((void)far.ray_integral(Point{0.0, 0.0, 0.0}, eta, 0.0), Error);
}

TEST(FitPowerTail, RecoversExactPowerLaw)
{
    // c t^-3 against t dt (dim 2): shells [1, 2] and [2, 4] beyond outer = 4
    const auto shell = [](double a, double b) { return 1.0 / a - 1.0 / b; };
    const auto fit = fit_power_tail(shell(1, 2), shell(2, 4), 1, 0.0, true);
    EXPECT_NEAR(fit.exponent, 3.0, 1e-12);
    EXPECT_NEAR(fit.tail, 0.25, 1e-12);
    const auto fixed = fit_power_tail(shell(1, 2), shell(2, 4), 1, 3.0, false);
    EXPECT_NEAR(fixed.tail, 0.25, 1e-12);
}
