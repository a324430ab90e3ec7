#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pvl/error.hpp"
#include "pvl/meridional.hpp"
#include "pvl/quad.hpp"

using namespace pvl;

namespace {

// p = exp(-(rho^2 + z^2)) solves rho^-m (rho^m p_rho)_rho + p_zz = (4 (rho^2 + z^2) - 2 (m + 2)) p.
double manufactured_error(int ambient_dim, int n, bool periodic)
{
    const MeridionalGrid g{n, n, 8.0, 8.0, periodic};
    const int m = ambient_dim - 2;
    std::vector<double> rhs(g.size()), exact(g.size());
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            const double r2 = g.rho(i) * g.rho(i) + g.z(j) * g.z(j);
            exact[g.index(i, j)] = std::exp(-r2);
            rhs[g.index(i, j)] = (4 * r2 - 2 * (m + 2)) * std::exp(-r2);
        }
    const auto p = solve_meridional_poisson(ambient_dim, g, rhs, 1e-12);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        err = std::max(err, std::abs(p[k] - exact[k]));
    return err;
}

} // namespace

TEST(MeridionalPoisson, SecondOrderConvergence)
{
    for (int dim : {3, 4, 5}) {
        const double e1 = manufactured_error(dim, 128, false);
        const double e2 = manufactured_error(dim, 256, false);
        const double e3 = manufactured_error(dim, 512, false);
        EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.3) << "N = " << dim;
        EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.3) << "N = " << dim;
    }
}

TEST(MeridionalPoisson, PeriodicVariantConverges)
{
    const double e1 = manufactured_error(3, 128, true);
    const double e2 = manufactured_error(3, 256, true);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.3);
}

TEST(MeridionalPoisson, ResidualOfDiscreteOperator)
{
    const MeridionalGrid g{64, 64, 4.0, 4.0, false};
    std::vector<double> rhs(g.size(), 0.0);
    for (int i = 1; i < g.n_rho - 1; ++i)
        for (int j = 1; j < g.n_z - 1; ++j)
            rhs[g.index(i, j)] = std::exp(-(std::pow(g.rho(i) - 1.0, 2) + g.z(j) * g.z(j)) * 4.0);
    MeridionalSolveInfo info;
    const auto p = solve_meridional_poisson(4, g, rhs, 1e-12, &info);
    const auto back = apply_meridional_laplacian(4, g, p);
    double err = 0.0, mx = 0.0;
    for (int i = 0; i < g.n_rho - 1; ++i)
        for (int j = 1; j < g.n_z - 1; ++j) {
            err = std::max(err, std::abs(back[g.index(i, j)] - rhs[g.index(i, j)]));
            mx = std::max(mx, std::abs(rhs[g.index(i, j)]));
        }
    EXPECT_LT(err, 1e-10 * mx);
    ASSERT_FALSE(info.residual_history.empty());
    EXPECT_LE(info.residual_history.back(), 1e-12);
}

TEST(MeridionalField, BumpsAreDiscretelySolenoidalToSecondOrder)
{
    const MeridionalBump b{1.5, 0.0, 0.75, 1.0};
    double prev = 0.0;
    for (int n : {512, 1024}) {
        const MeridionalGrid g{n, n, 4.0, 4.0, false};
        const auto mf = meridional_from_bumps(3, g, std::span<const MeridionalBump>(&b, 1));
        double div = 0.0;
        for (double d : meridional_divergence(mf))
            div = std::max(div, std::abs(d));
        if (prev > 0.0) {
            EXPECT_GT(prev / div, 3.0);
        }
        prev = div;
    }
}

TEST(MeridionalField, AxisChecks)
{
    const MeridionalGrid g{32, 32, 4.0, 4.0, false};
    const MeridionalBump touching{0.3, 0.0, 0.5, 1.0};
    const auto psi = sample_meridional_bumps(g, std::span<const MeridionalBump>(&touching, 1));
    try {
        meridional_streamfunction(3, g, psi);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AxisRegularity);
    }

    const MeridionalBump ok{2.0, 0.0, 1.0, 1.0};
    auto mf = meridional_from_bumps(3, g, std::span<const MeridionalBump>(&ok, 1));
    mf.v_rho[g.index(0, 16)] = 1e-3;
    try {
        pressure_meridional(mf);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Axis);
    }
}

TEST(MeridionalLineIntegral, PeriodicLineMatchesQuadrature)
{
    MeridionalField mf;
    mf.ambient_dim = 3;
    mf.grid = {16, 64, 2.0, 1.0, true};
    mf.v_rho.assign(mf.grid.size(), 0.0);
    mf.v_z.assign(mf.grid.size(), 0.0);
    mf.p.assign(mf.grid.size(), 0.0);
    for (int i = 0; i < mf.grid.n_rho; ++i)
        for (int j = 0; j < mf.grid.n_z; ++j)
            mf.p[mf.grid.index(i, j)] = 1.0 + std::cos(std::numbers::pi * mf.grid.z(j)) * mf.grid.rho(i);
    const auto q = meridional_line_integral(mf, MeridionalIntegrand::Pressure, mf.grid.rho(5));
    EXPECT_NEAR(q.value, 2.0, 1e-12);
    EXPECT_DOUBLE_EQ(q.tail, 0.0);
}
