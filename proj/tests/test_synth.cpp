#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "pvl/error.hpp"
#include "pvl/pipeline.hpp"
#include "pvl/special.hpp"
#include "pvl/pressure.hpp"
#include "pvl/synth.hpp"

using namespace pvl;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

namespace {

double raw_bump(double r2) { return r2 >= 1.0 ? 0.0 : std::exp(1.0 / (r2 - 1.0)); }

} // namespace

TEST(Special, UnitBumpIntegralMatchesQuadrature)
{
    tanh_sinh<double> ts;
    const double i1 = ts.integrate([](double x) { return raw_bump(x * x); }, -1.0, 1.0);
    const double i2 = 2 * std::numbers::pi * ts.integrate([](double r) { return r * raw_bump(r * r); }, 0.0, 1.0);
    const double i3 = 4 * std::numbers::pi * ts.integrate([](double r) { return r * r * raw_bump(r * r); }, 0.0, 1.0);
    EXPECT_NEAR(unit_bump_integral(1), i1, 1e-13);
    EXPECT_NEAR(unit_bump_integral(2), i2, 1e-13);
    EXPECT_NEAR(unit_bump_integral(3), i3, 1e-13);
    EXPECT_NEAR(mollifier_normalizer(2) * i2, 1.0, 1e-13);
}

TEST(Special, MollifierHasUnitMass)
{
    for (double eps : {0.1, 0.5, 2.0}) {
        const double mass =
            gauss_kronrod<double, 61>::integrate([eps](double x) { return mollifier(x, eps); }, -eps, eps, 8, 1e-14);
        EXPECT_NEAR(mass, 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(mollifier_cdf(-eps, eps), 0.0);
        EXPECT_DOUBLE_EQ(mollifier_cdf(eps, eps), 1.0);
        const double t = 0.3 * eps;
        const double cdf =
            gauss_kronrod<double, 61>::integrate([eps](double x) { return mollifier(x, eps); }, -eps, t, 8, 1e-14);
        EXPECT_NEAR(mollifier_cdf(t, eps), cdf, 1e-12);
        EXPECT_NEAR(mollifier_cdf_integral(2 * eps, eps), 2 * eps, 1e-12);
    }
}

TEST(Special, GaussLegendreIntegratesPolynomials)
{
    EXPECT_NEAR(integrate([](double x) { return std::pow(x, 9) - x * x; }, 0.0, 2.0, 1, 8), 1024.0 / 10 - 8.0 / 3, 1e-12);
}

TEST(Bump, IntegralAndMargin)
{
    const GridSpec g(2, 256, 4.0);
    const BumpSpec b{{0.3, -0.2, 0.0}, 1.2, 2.0};
    EXPECT_NEAR(bump(b, g).integral(), 2.0 * 1.44 * unit_bump_integral(2), 1e-8);
    EXPECT_THROW(bump(BumpSpec{{1.5, 0.0, 0.0}, 1.0, 1.0}, g), Error);
}

TEST(SplitMix64, ReferenceSequence)
{
    SplitMix64 rng(0);
    EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
    const double u = SplitMix64(5).uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
}

TEST(RadialVortex, PressureProfileMatchesQuadrature)
{
    const auto f = default_vortex_profile(1.0, 1.5);
    const GridSpec g(2, 128, 4.0);
    const auto rv = radial_vortex_2d(f, g);
    for (double r : {0.0, 0.3, 0.8}) {
        const double oracle = -gauss_kronrod<double, 61>::integrate(
            [&](double s) { return s == 0.0 ? 0.0 : f(s) * f(s) / s; }, r, 1.0, 10, 1e-14);
        EXPECT_NEAR(rv.pressure_profile(r), oracle, 1e-12);
    }
    EXPECT_DOUBLE_EQ(rv.pressure_profile(1.5), 0.0);
    EXPECT_LT(relative_divergence(rv.velocity), 1e-4);
}

TEST(RadialVortex, RejectsSingularAxisAndWideSupport)
{
    const GridSpec g(2, 64, 4.0);
    try {
        radial_vortex_2d(RadialProfile([](double) { return 1.0; }, 1.0), g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularAxis);
    }
    try {
        radial_vortex_2d(default_vortex_profile(2.5), g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Margin);
    }
}

TEST(CurlPotential, ArityAndDivergence)
{
    const GridSpec g(2, 64, 4.0);
    const ScalarField psi = bump(BumpSpec{{0.0, 0.0, 0.0}, 1.5, 1.0}, g);
    std::vector<ScalarField> two{psi, psi};
    try {
        curl_potential(two, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Arity);
    }
    std::vector<ScalarField> one{psi};
    EXPECT_LT(divergence(curl_potential(one, g)).max_abs(), 1e-10);
}

TEST(GenericField, DeterministicAndSolenoidal)
{
    const GridSpec g(2, 256, 4.0);
    const GenericFieldSpec spec{4, 0.25, 9};
    const auto a = generic_field(g, spec);
    const auto b = generic_field(g, spec);
    EXPECT_TRUE(std::ranges::equal(a[0].values(), b[0].values()));
    const auto c = generic_field(g, GenericFieldSpec{4, 0.25, 10});
    EXPECT_FALSE(std::ranges::equal(a[0].values(), c[0].values()));
    EXPECT_LT(relative_divergence(a), kDivergenceGate);
    EXPECT_LE(support_leakage(a), 0.0);
}

TEST(GenericField, ThreeDimensional)
{
    const GridSpec g(3, 32, 4.0);
    const auto v = generic_field(g, GenericFieldSpec{3, 0.4, 2});
    EXPECT_EQ(v.dim(), 3);
    EXPECT_GT(v.energy(), 0.0);
}

TEST(Symmetrize, MakesSecondMomentsIsotropic)
{
    const GridSpec g(2, 128, 4.0);
    const auto v = generic_field(g, GenericFieldSpec{4, 0.25, 3});
    EXPECT_GT(second_moments(v).anisotropy(), 1e-3);
    const auto s = symmetrize(v);
    EXPECT_LT(second_moments(s).anisotropy(), 1e-12);

    const GridSpec g3(3, 32, 4.0);
    const auto v3 = symmetrize(generic_field(g3, GenericFieldSpec{3, 0.4, 4}));
    EXPECT_LT(second_moments(v3).anisotropy(), 1e-12);
}

TEST(AnisotropicControl, IsAnisotropic)
{
    const GridSpec g(2, 256, 4.0);
    const auto v = anisotropic_control(g);
    EXPECT_GT(second_moments(v).anisotropy(), 1e-3);
    EXPECT_LT(relative_divergence(v), kDivergenceGate);
}

TEST(Axisymmetric3d, MatchesMeridionalReduction)
{
    const GridSpec g(3, 128, 4.0);
    const std::vector<MeridionalBump> bumps{{0.8, 0.0, 0.6, 1.0}};
    const auto v = axisymmetric_field_3d(g, bumps);
    EXPECT_LT(relative_divergence(v), kDivergenceGate);
    // swirl free: x v_y - y v_x = 0
    double swirl = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.node(i);
        swirl = std::max(swirl, std::abs(x[0] * v[1][i] - x[1] * v[0][i]));
    }
    EXPECT_LT(swirl, 1e-12 * v.max_abs());
}
