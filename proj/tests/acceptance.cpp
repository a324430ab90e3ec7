// Acceptance driver: one PASS/FAIL line per criterion.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "pvl/evolve.hpp"
#include "pvl/identities.hpp"
#include "pvl/meridional.hpp"
#include "pvl/pipeline.hpp"
#include "pvl/pressure.hpp"
#include "pvl/quad.hpp"
#include "pvl/synth.hpp"

using namespace pvl;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfWidth = 4.0;
constexpr double kVortexRadius = 1.8;

int failures = 0;

void verdict(int n, bool ok, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double gk(const std::function<double(double)>& f, double a, double b)
{
    if (b <= a)
        return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

double gaussian_potential_2d(double r, double s)
{
    const double w = r * r / (s * s);
    const double core = w == 0.0 ? -std::numbers::egamma : std::log(w) + boost::math::expint(1, w);
    return 0.25 * s * s * core + 0.5 * s * s * std::log(s);
}

double manufactured_meridional(int ambient_dim, int n)
{
    const MeridionalGrid g{n, n, 8.0, 8.0, false};
    const int m = ambient_dim - 2;
    std::vector<double> rhs(g.size()), exact(g.size());
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            const double r2 = g.rho(i) * g.rho(i) + g.z(j) * g.z(j);
            exact[g.index(i, j)] = std::exp(-r2);
            rhs[g.index(i, j)] = (4 * r2 - 2 * (m + 2)) * std::exp(-r2);
        }
    const auto p = solve_meridional_poisson(ambient_dim, g, rhs);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        err = std::max(err, std::abs(p[k] - exact[k]));
    return err;
}

// Radial vortex with its pressure and quadrature oracles built from the
// velocity profile alone.
struct Vortex {
    GridSpec grid{2, 256, kHalfWidth};
    RadialProfile f = default_vortex_profile(kVortexRadius);
    VectorField v = radial_vortex_2d(f, grid).velocity;
    ScalarField p = pressure_freespace(v);

    double pressure(double r) const
    {
        return -gk([&](double s) { return f(s) * f(s) / s; }, r, kVortexRadius);
    }
};

const Vortex& vortex()
{
    static const Vortex c;
    return c;
}

void criterion1()
{
    const double s = 0.3;
    const GridSpec g(2, 256, kHalfWidth);
    const auto rhs = ScalarField::from_function(g, [&](const Point& x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (s * s));
    });
    auto t0 = std::chrono::steady_clock::now();
    const auto u = free_space_poisson(rhs);
    const double spectral_time = seconds_since(t0);
    double spectral = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.node(i);
        const double r = std::hypot(x[0], x[1]);
        if (r <= kHalfWidth / 2)
            spectral = std::max(spectral, std::abs(u[i] - gaussian_potential_2d(r, s)));
    }

    double worst_order = 0.0;
    std::string orders;
    for (int dim : {3, 4, 5}) {
        const double e1 = manufactured_meridional(dim, 256);
        const double e2 = manufactured_meridional(dim, 512);
        const double e3 = manufactured_meridional(dim, 1024);
        for (double q : {std::log2(e1 / e2), std::log2(e2 / e3)}) {
            worst_order = std::max(worst_order, std::abs(q - 2.0));
            orders += fmt(" %.2f", q);
        }
    }

    t0 = std::chrono::steady_clock::now();
    const MeridionalGrid mg{1024, 1024, 12.0, 12.0, false};
    const MeridionalBump b{1.5, 0.0, 0.75, 1.0};
    (void)pressure_meridional(meridional_from_bumps(3, mg, std::span<const MeridionalBump>(&b, 1)));
    const double meridional_time = seconds_since(t0);

    const bool ok = spectral <= 1e-8 && worst_order <= 0.3 && spectral_time < 60 && meridional_time < 60;
    verdict(1, ok,
            fmt("spectral max error %.2e (M=256); meridional orders%s; runtime %.2fs (M=256), %.2fs (1024^2)",
                spectral, orders.c_str(), spectral_time, meridional_time));
}

void criterion2()
{
    const auto& c = vortex();
    const double pmax = std::abs(c.pressure(0.0));
    double perr = 0.0;
    for (std::size_t i = 0; i < c.grid.size(); i += 7) {
        const auto x = c.grid.node(i);
        const double r = std::hypot(x[0], x[1]);
        perr = std::max(perr, std::abs(c.p[i] - (r < kVortexRadius ? c.pressure(r) : 0.0)));
    }
    perr /= pmax;

    double worst = 0.0;
    auto against = [&](const IdentityReport& r, double lhs, double rhs, double scale) {
        if (r.status != Status::Pass)
            worst = std::max(worst, 1.0);
        worst = std::max({worst, std::abs(r.lhs - lhs) / scale, std::abs(r.rhs - rhs) / scale});
    };

    // Line at distance d with normal xi: (v . xi)^2 = f(r)^2 t^2 / r^2.
    for (double d : {0.0, 0.4, 1.1, 1.6}) {
        const double th = 0.3 + d;
        const PlaneSpec plane{{std::cos(th), std::sin(th), 0.0}, {d * std::cos(th), d * std::sin(th), 0.0}};
        const auto r = check_hyperplane(c.v, c.p, plane);
        const double t_max = std::sqrt(std::max(0.0, kVortexRadius * kVortexRadius - d * d));
        const double lhs = 2 * gk([&](double t) { return c.pressure(std::hypot(d, t)); }, 0.0, t_max);
        const double rhs = -2 * gk(
                                    [&](double t) {
                                        const double rr = std::hypot(d, t);
                                        return rr == 0.0 ? 0.0 : c.f(rr) * c.f(rr) * t * t / (rr * rr);
                                    },
                                    0.0, t_max);
        worst = std::max(worst, r.residual_rel);
        against(r, lhs, rhs, std::max(std::abs(lhs), 1e-300));
    }

    const double energy = kPi * gk([&](double r) { return c.f(r) * c.f(r) * r; }, 0.0, kVortexRadius);
    const double pint = 2 * kPi * gk([&](double r) { return c.pressure(r) * r; }, 0.0, kVortexRadius);
    for (const auto& r : check_global(c.v, c.p)) {
        worst = std::max(worst, r.residual_rel);
        if (r.identity == "component_energy")
            against(r, energy, energy, energy);
        else
            against(r, pint, -energy, energy);
    }

    const double shell0 = 2 * kPi * gk([&](double r) { return c.pressure(r); }, 0.0, kVortexRadius);
    for (double radius : {0.0, 0.5, 1.0, 1.5}) {
        const auto r = check_sphere_formula(c.v, c.p, radius);
        const double lhs = 2 * kPi * gk([&](double s) { return c.pressure(s); }, radius, kVortexRadius) +
                           2 * kPi * radius * c.pressure(radius);
        const double rhs = -2 * kPi * gk([&](double s) { return c.f(s) * c.f(s); }, radius, kVortexRadius);
        worst = std::max(worst, r.residual_rel);
        against(r, lhs, rhs, std::abs(shell0));
    }

    const auto radii = default_sweep_radii(c.grid);
    const auto sweep = check_sign_sweep(c.v, c.p, radii);
    for (const auto& r : sweep.reports) {
        const double radius = r.params.at("R");
        const double value = 2 * kPi * gk([&](double s) { return c.pressure(s); }, radius, kVortexRadius);
        against(r, value, 0.0, std::abs(shell0));
    }
    if (sweep.contradiction)
        worst = 1.0;

    verdict(2, perr <= 1e-6 && worst <= 1e-4,
            fmt("pressure vs profile %.2e (rel max, M=256, a=%.2f); worst identity deviation %.2e over "
                "4 lines, global, 4 spheres, %zu sweep radii",
                perr, kVortexRadius, worst, radii.size()));
}

RunConfig generic_config(int points, std::uint64_t seed, int planes)
{
    RunConfig c;
    c.grid = {2, points, kHalfWidth / 2};
    c.generator.name = "generic";
    c.generator.params = {{"support_fraction", 0.25}};
    c.generator.symmetrize = true;
    c.generator.seed = seed;
    c.checks.push_back({"hyperplane", {{"count", {static_cast<double>(planes)}}, {"seed", {7}}}, std::nullopt});
    return c;
}

double worst_residual(const RunResult& r)
{
    double w = 0.0;
    for (const auto& x : r.reports)
        w = std::max(w, x.status == Status::Pass ? x.residual_rel : 1.0);
    return w;
}

void criterion3()
{
    const auto c1 = generic_config(512, 3, 20);
    const auto c2 = generic_config(1024, 3, 20);
    const auto r1 = check_fields(c1, *synthesize(c1).velocity);
    const auto r2 = check_fields(c2, *synthesize(c2).velocity);
    const double w1 = worst_residual(r1), w2 = worst_residual(r2);
    verdict(3, r1.reports.size() >= 20 && w1 <= 1e-3 && w1 >= 4 * w2,
            fmt("%zu planes, worst residual %.2e (M=512) -> %.2e (M=1024), shrink %.1fx", r1.reports.size(), w1, w2,
                w1 / w2));
}

void criterion4()
{
    double worst = 0.0;
    auto measure = [&](const VectorField& v) {
        const auto p = pressure_freespace(v);
        const double total = v.energy();
        std::vector<double> comp;
        for (int k = 0; k < v.dim(); ++k)
            comp.push_back(pointwise_product(v[k], v[k]).integral());
        const double pint = volume_integral(RadialSpectrum(p), v.grid().half_width(), support_radius(v)).value;
        for (int j = 0; j < v.dim(); ++j) {
            worst = std::max(worst, std::abs(pint + comp[j]) / total);
            for (int k = j + 1; k < v.dim(); ++k)
                worst = std::max(worst, std::abs(comp[j] - comp[k]) / total);
        }
    };
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        measure(symmetrize(generic_field(GridSpec(2, 256, kHalfWidth / 2), {4, 0.25, seed})));
    measure(symmetrize(generic_field(GridSpec(3, 128, kHalfWidth / 2), {3, 0.25, 11})));
    verdict(4, worst <= 1e-3,
            fmt("worst |int v_j^2 - int v_k^2| and |int p + int v_j^2| relative to int |v|^2: %.2e "
                "(5 fields 2D M=256, 1 field 3D M=128)",
                worst));
}

void criterion5()
{
    double worst = -1e300;
    bool contradiction = false;
    int values = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto v = symmetrize(generic_field(GridSpec(2, 256, kHalfWidth / 2), {4, 0.25, seed}));
        const auto p = pressure_freespace(v);
        const auto sweep = check_sign_sweep(v, p, default_sweep_radii(v.grid()));
        contradiction |= sweep.contradiction;
        for (const auto& r : sweep.reports) {
            worst = std::max(worst, r.lhs / r.params.at("scale"));
            ++values;
        }
    }
    const GridSpec g(2, 256, kHalfWidth / 2);
    const VectorField zero(g);
    const auto zero_sweep = check_sign_sweep(zero, pressure_freespace(zero), default_sweep_radii(g));
    bool exact = zero_sweep.verdict == "v = 0 confirmed";
    for (const auto& r : zero_sweep.reports)
        exact &= r.lhs == 0.0;
    verdict(5, worst <= 1e-3 && !contradiction && exact,
            fmt("%d shell values, max value/scale %.2e; zero field exact and \"%s\"", values, worst,
                zero_sweep.verdict.c_str()));
}

void criterion6()
{
    const MeridionalBump b{1.5, 0.0, 0.75, 1.0};
    double worst = 0.0, mono = 0.0;
    bool ok = true;
    std::string detail;
    for (bool periodic : {false, true})
        for (int dim : {3, 4, 5}) {
            const MeridionalGrid g{1024, 1024, 12.0, 12.0, periodic};
            const auto mf = pressure_meridional(meridional_from_bumps(dim, g, std::span<const MeridionalBump>(&b, 1)));
            const auto r = check_axisymmetric_decay(mf, 0.375, 4.5);
            ok &= r.status == Status::Pass && r.residual_rel <= 1e-2 &&
                  r.params.at("monotonicity_violation") <= 1e-1 * 1e-2;
            worst = std::max(worst, r.residual_rel);
            mono = std::max(mono, r.params.at("monotonicity_violation"));
            detail += fmt(" N=%d%s %.1e", dim, periodic ? "p" : "", r.residual_rel);
        }
    verdict(6, ok, fmt("residuals%s; worst %.2e, monotonicity excess %.2e (1024^2, 64-point sweep)", detail.c_str(),
                       worst, mono));
}

void criterion7()
{
    const auto& c = vortex();
    const auto tests = weak_form_test_functions(c.grid, 50, 2024);
    double worst = 0.0;
    for (const auto& h : tests)
        worst = std::max(worst, check_weak_form(c.v, c.p, h).residual_rel);

    // Radial perturbation against radial ramps: int delta Laplace(phi) = 2 pi int delta (phi'' + phi'/r) r dr.
    const BumpSpec blip{{0.0, 0.0, 0.0}, 0.9, 0.05 * c.p.max_abs()};
    const auto corrupted = c.p + bump(blip, c.grid);
    double recover = 0.0;
    for (auto [r1, r2, eps] : {std::array{0.3, 0.8, 0.1}, std::array{0.5, 1.2, 0.2}, std::array{0.2, 0.9, 0.15}}) {
        const RampFunction phi(r1, r2, eps);
        const auto h = ramp_test_function(r1, r2, eps, c.grid);
        const double seen = weak_form_residual(c.v, corrupted, h) - weak_form_residual(c.v, c.p, h);
        const double expected = 2 * kPi * gk(
                                               [&](double r) {
                                                   const double d = bump_value(blip, Point{r, 0.0, 0.0}, 2);
                                                   return d * (phi.second_derivative(r) * r + phi.derivative(r));
                                               },
                                               0.0, blip.radius);
        recover = std::max(recover, std::abs(seen - expected));
    }
    verdict(7, worst <= 1e-6 && recover <= 1e-8,
            fmt("50 test functions (16 ramps), worst scaled residual %.2e; perturbation functional recovered to %.2e",
                worst, recover));
}

void criterion8()
{
    const GridSpec g(2, 256, kHalfWidth);
    const auto v = anisotropic_control(g);
    const auto p = pressure_freespace(v);
    const double aniso = second_moments(v).anisotropy();
    double worst = 0.0;
    bool flagged = true;
    for (const auto& r : check_global(v, p)) {
        flagged &= r.status == Status::HypothesisViolated;
        worst = std::max(worst, r.residual_rel / r.tolerance);
    }
    verdict(8, aniso > 1e-3 && worst > 10 && flagged,
            fmt("moment anisotropy %.2e; worst residual %.1fx tolerance; all global reports hypothesis-violated",
                aniso, worst));
}

double tracked_worst(int points, double half_width, double window)
{
    TrackOptions options;
    options.t_end = 0.5;
    options.snapshots = 5;
    double worst = 0.0;
    for (const auto& s : track_identities(blob_state(GridSpec(2, points, half_width), 0.01), window, options))
        for (const auto& r : s.reports)
            worst = std::max(worst, r.residual_rel);
    return worst;
}

void criterion9()
{
    auto state = advance(taylor_green_state(128, 0.01), 1.0);
    const auto exact = taylor_green_velocity(state.grid, 0.01, 1.0);
    const auto v = velocity(state);
    double tg = 0.0;
    for (int k = 0; k < 2; ++k)
        tg = std::max(tg, (v[k] - exact[k]).max_abs());
    const double small = tracked_worst(256, 4.0, 2.0);
    const double large = tracked_worst(512, 8.0, 4.0);
    verdict(9, tg <= 1e-6 && small <= 1e-2 && large <= 0.5 * small,
            fmt("Taylor-Green error %.2e at t=1; tracked worst residual %.2e (L=4, R=2) -> %.2e (L=8, R=4)", tg, small,
                large));
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion10()
{
    auto config = generic_config(256, 42, 8);
    config.checks.push_back({"global", {}, std::nullopt});
    config.checks.push_back({"sign_sweep", {}, std::nullopt});
    config.checks.push_back({"weak_form", {{"count", {6}}}, std::nullopt});
    const auto base = fs::temp_directory_path() / "pvl-acceptance";
    fs::remove_all(base);
    run(config, base / "a");
    run(config, base / "b");
    bool same = true;
    for (const char* f : {"reports.json", "reports.csv", "summary.json"})
        same &= slurp(base / "a" / f) == slurp(base / "b" / f) && !slurp(base / "a" / f).empty();
    fs::remove_all(base);
    verdict(10, same, "two runs with seed 42: reports.json, reports.csv, summary.json byte-identical");
}

} // namespace

int main()
{
    const std::array criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                              criterion6, criterion7, criterion8, criterion9, criterion10};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            verdict(static_cast<int>(i + 1), false, fmt("error: %s", e.what()));
        }
    }
    std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
