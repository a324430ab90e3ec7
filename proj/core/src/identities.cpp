#include "pvl/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pvl/error.hpp"
#include "pvl/pressure.hpp"
#include "pvl/synth.hpp"

namespace pvl {
namespace {

HypothesisDiagnostics diagnostics(const VectorField& v)
{
    HypothesisDiagnostics d;
    d.moment_isotropy = second_moments(v).anisotropy();
    d.support_margin = 0.5 * v.grid().half_width() - support_radius(v);
    return d;
}

bool admissible(const HypothesisDiagnostics& d, const CheckOptions& options)
{
    return d.moment_isotropy <= options.isotropy_bound && d.support_margin >= 0.0;
}

void set_tail_fraction(IdentityReport& r, double tail)
{
    const double denom = std::max({std::abs(r.lhs), std::abs(r.rhs), r.scale_floor});
    r.hypothesis.tail_fraction = denom > 0.0 ? std::abs(tail) / denom : 0.0;
}

double max_outside(const VectorField& v, double radius)
{
    const auto& g = v.grid();
    double out = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.node(i);
        double r2 = 0.0, m2 = 0.0;
        for (int k = 0; k < g.dim(); ++k) {
            r2 += x[k] * x[k];
            m2 += v[k][i] * v[k][i];
        }
        if (r2 >= radius * radius)
            out = std::max(out, m2);
    }
    return std::sqrt(out);
}

double box_rms(const VectorField& v)
{
    const auto& g = v.grid();
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k)
        for (double x : v[k].values())
            s += x * x;
    return std::sqrt(s / static_cast<double>(g.size()));
}

ScalarField tangential_squared(const VectorField& v)
{
    const auto& g = v.grid();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.node(i);
        double r2 = 0.0, vr = 0.0, m2 = 0.0;
        for (int k = 0; k < g.dim(); ++k) {
            r2 += x[k] * x[k];
            vr += v[k][i] * x[k];
            m2 += v[k][i] * v[k][i];
        }
        out[i] = r2 > 0.0 ? std::max(0.0, m2 - vr * vr / r2) : m2;
    }
    return ScalarField(g, std::move(out));
}

IdentityReport hyperplane_report(const VectorField& v, const ScalarField& p, const PlaneSpec& plane,
                                 const QuadResult& lhs, const CheckOptions& options)
{
    IdentityReport r;
    r.identity = "hyperplane";
    r.tolerance = options.tolerance;
    r.scale_floor = scale_floor(v, p);
    r.hypothesis = diagnostics(v);
    for (int k = 0; k < v.dim(); ++k) {
        r.params["xi_" + std::to_string(k)] = plane.xi[k];
        r.params["x0_" + std::to_string(k)] = plane.x0[k];
    }
    const auto rhs = plane_integral(v.normal_component_squared(plane.xi), plane);
    r.lhs = lhs.value;
    r.rhs = -rhs.in_box;
    r.params["tail"] = lhs.tail;
    r.params["tail_exponent"] = lhs.tail_exponent;
    set_tail_fraction(r, lhs.tail);
    if (!admissible(r.hypothesis, options))
        r.status = Status::HypothesisViolated;
    finalize(r);
    const double bound = options.tolerance * std::max({std::abs(r.lhs), std::abs(r.rhs), r.scale_floor});
    const bool nonpositive = r.lhs <= bound;
    r.notes["lhs_nonpositive"] = nonpositive ? "true" : "false";
    r.notes["pressure_nonpositive_somewhere_on_plane"] = nonpositive ? "true" : "undetermined";
    if (!nonpositive && r.status == Status::Pass)
        r.status = Status::Fail;
    return r;
}

} // namespace

std::string_view to_string(Status status) noexcept
{
    switch (status) {
    case Status::Pass:
        return "pass";
    case Status::Fail:
        return "fail";
    case Status::HypothesisViolated:
        return "hypothesis-violated";
    }
    return "unknown";
}

void finalize(IdentityReport& report)
{
    report.residual_abs = std::abs(report.lhs - report.rhs);
    const double denom = std::max({std::abs(report.lhs), std::abs(report.rhs), report.scale_floor});
    report.residual_rel = denom > 0.0 ? report.residual_abs / denom : 0.0;
    if (report.status != Status::HypothesisViolated)
        report.status = report.residual_rel <= report.tolerance ? Status::Pass : Status::Fail;
}

double support_radius(const VectorField& v)
{
    const auto& g = v.grid();
    double r2max = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        bool nonzero = false;
        for (int k = 0; k < g.dim(); ++k)
            nonzero = nonzero || v[k][i] != 0.0;
        if (!nonzero)
            continue;
        const auto x = g.node(i);
        double r2 = 0.0;
        for (int k = 0; k < g.dim(); ++k)
            r2 += x[k] * x[k];
        r2max = std::max(r2max, r2);
    }
    return std::sqrt(r2max);
}

double scale_floor(const VectorField& v, const ScalarField& p)
{
    return 1e-12 * (v.energy() + p.l1_norm());
}

IdentityReport check_hyperplane(const VectorField& v, const ScalarField& p, const PlaneSpec& plane,
                                const CheckOptions& options)
{
    require(p.grid() == v.grid(), ErrorCode::GridCompatibility, "pressure and velocity grids differ");
    if (v.dim() == 2)
        return check_hyperplane(v, p, plane, PressureMultipole(v), options);
    return hyperplane_report(v, p, plane, plane_integral(p, plane), options);
}

IdentityReport check_hyperplane(const VectorField& v, const ScalarField& p, const PlaneSpec& plane,
                                const PressureMultipole& far, const CheckOptions& options)
{
    require(p.grid() == v.grid(), ErrorCode::GridCompatibility, "pressure and velocity grids differ");
    require(v.dim() == 2, ErrorCode::Parameter, "multipole tails are two-dimensional");
    return hyperplane_report(v, p, plane, plane_integral(p, plane, far), options);
}

std::vector<IdentityReport> check_global(const VectorField& v, const ScalarField& p, const CheckOptions& options)
{
    require(p.grid() == v.grid(), ErrorCode::GridCompatibility, "pressure and velocity grids differ");
    const int dim = v.dim();
    const auto hyp = diagnostics(v);
    const double floor = scale_floor(v, p);
    const auto total = volume_integral(RadialSpectrum(p), v.grid().half_width(), support_radius(v));

    std::vector<double> energy(dim);
    for (int j = 0; j < dim; ++j)
        energy[j] = pointwise_product(v[j], v[j]).integral();

    std::vector<IdentityReport> out;
    for (int j = 0; j < dim; ++j) {
        IdentityReport r;
        r.identity = "global";
        r.params["component"] = j;
        r.params["tail"] = total.tail;
        r.lhs = total.value;
        r.rhs = -energy[j];
        r.tolerance = options.tolerance;
        r.scale_floor = floor;
        r.hypothesis = hyp;
        set_tail_fraction(r, total.tail);
        if (!admissible(hyp, options))
            r.status = Status::HypothesisViolated;
        finalize(r);
        out.push_back(std::move(r));
    }
    for (int j = 0; j < dim; ++j)
        for (int k = j + 1; k < dim; ++k) {
            IdentityReport r;
            r.identity = "component_energy";
            r.params["component_a"] = j;
            r.params["component_b"] = k;
            r.lhs = energy[j];
            r.rhs = energy[k];
            r.tolerance = options.tolerance;
            r.scale_floor = floor;
            r.hypothesis = hyp;
            if (!admissible(hyp, options))
                r.status = Status::HypothesisViolated;
            finalize(r);
            out.push_back(std::move(r));
        }
    return out;
}

IdentityReport check_sphere_formula(const VectorField& v, const ScalarField& p, double radius,
                                    const CheckOptions& options)
{
    const auto& g = v.grid();
    require(p.grid() == g, ErrorCode::GridCompatibility, "pressure and velocity grids differ");
    const double l = g.half_width();
    require(radius >= 0.0 && radius < 0.5 * l, ErrorCode::OutOfDomain, "sphere radius must lie in [0, L/2)");
    const int dim = g.dim();

    const RadialSpectrum sp(p);
    const auto snn = RadialSpectrum::normal_normal(v);
    const RadialSpectrum stt(tangential_squared(v));

    const auto shell_p = shell_weighted_integral(sp, radius, l, support_radius(v));
    const double sphere_p = sp.sphere(radius);
    const double sphere_nn = snn.sphere(radius);
    const double shell_tt = shell_weighted_integral(stt, radius, l).in_box;

    IdentityReport r;
    r.identity = "sphere_formula";
    r.params["R"] = radius;
    r.params["tail"] = shell_p.tail;
    r.lhs = (dim - 1) * shell_p.value + sphere_p;
    r.rhs = -sphere_nn - shell_tt;
    r.tolerance = options.tolerance;
    r.scale_floor = scale_floor(v, p);
    r.hypothesis = diagnostics(v);
    set_tail_fraction(r, (dim - 1) * shell_p.tail);
    if (radius == 0.0)
        r.notes["degenerate_sphere"] = "true";
    if (!admissible(r.hypothesis, options))
        r.status = Status::HypothesisViolated;
    finalize(r);
    return r;
}

std::vector<double> default_sweep_radii(const GridSpec& grid, int count)
{
    require(count >= 2, ErrorCode::Parameter, "sweep needs at least two radii");
    const double lo = grid.spacing();
    const double hi = 0.5 * grid.half_width() * (1.0 - 1e-9);
    std::vector<double> out{0.0};
    for (int i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return out;
}

SignSweep check_sign_sweep(const VectorField& v, const ScalarField& p, std::span<const double> radii,
                           const CheckOptions& options)
{
    const auto& g = v.grid();
    require(p.grid() == g, ErrorCode::GridCompatibility, "pressure and velocity grids differ");
    const double l = g.half_width();
    const auto hyp = diagnostics(v);
    const double floor = scale_floor(v, p);

    const RadialSpectrum sp(p);
    const RadialSpectrum stt(tangential_squared(v));
    const RadialSpectrum se(v.magnitude_squared());
    const double scale = std::max(shell_weighted_integral(se, 0.0, l).in_box, floor);
    const double vanish_threshold = 1e-8 * box_rms(v);
    const double vmax = v.max_abs();
    const double support = support_radius(v);

    SignSweep out;
    bool all_zero_confirmed = true;
    bool any_vanishing = false;
    for (double radius : radii) {
        require(radius >= 0.0 && radius < 0.5 * l, ErrorCode::OutOfDomain, "sweep radius must lie in [0, L/2)");
        const auto value = shell_weighted_integral(sp, radius, l, support);
        IdentityReport r;
        r.identity = "sign_sweep";
        r.params["R"] = radius;
        r.params["tail"] = value.tail;
        r.params["scale"] = scale;
        r.lhs = value.value;
        r.rhs = 0.0;
        r.tolerance = options.tolerance;
        r.scale_floor = floor;
        r.hypothesis = hyp;
        r.hypothesis.tail_fraction = std::abs(value.tail) / scale;
        r.residual_abs = std::max(0.0, r.lhs);
        r.residual_rel = r.residual_abs / scale;
        if (!admissible(hyp, options) || r.hypothesis.tail_fraction > options.tail_budget * options.tolerance)
            r.status = Status::HypothesisViolated;
        else
            r.status = r.lhs <= options.tolerance * scale ? Status::Pass : Status::Fail;

        if (r.lhs >= -options.tolerance * scale) {
            any_vanishing = true;
            const double beyond = max_outside(v, radius);
            const double tangential = shell_weighted_integral(stt, radius, l).in_box;
            if (beyond <= vanish_threshold) {
                r.notes["vanishing"] = radius == 0.0 || vmax <= vanish_threshold ? "v = 0 confirmed"
                                                                                  : "v = 0 beyond R";
            } else if (tangential > 10.0 * options.tolerance * scale) {
                r.notes["vanishing"] = "contradiction: shell value vanishes but v does not";
                out.contradiction = true;
                if (r.status == Status::Pass)
                    r.status = Status::Fail;
            } else {
                r.notes["vanishing"] = "v negligible beyond R";
            }
        }
        if (!(vmax <= vanish_threshold))
            all_zero_confirmed = false;
        out.reports.push_back(std::move(r));
    }

    if (out.contradiction)
        out.verdict = "contradiction";
    else if (any_vanishing && all_zero_confirmed)
        out.verdict = "v = 0 confirmed";
    else if (any_vanishing)
        out.verdict = "vanishing only beyond the support";
    else
        out.verdict = "strictly negative";
    return out;
}

IdentityReport check_weak_form(const VectorField& v, const ScalarField& p, const ScalarField& h,
                               const CheckOptions& options)
{
    const auto& g = v.grid();
    require(p.grid() == g && h.grid() == g, ErrorCode::GridCompatibility, "fields live on different grids");
    IdentityReport r;
    r.identity = "weak_form";
    r.lhs = pointwise_product(p, laplacian(h)).integral();
    r.rhs = r.lhs - weak_form_residual(v, p, h);
    r.tolerance = options.tolerance;
    r.hypothesis = diagnostics(v);
    r.residual_abs = std::abs(r.lhs - r.rhs);
    const double scale = weak_form_scale(v, p, h);
    r.scale_floor = scale;
    r.params["scale"] = scale;
    r.residual_rel = scale > 0.0 ? r.residual_abs / scale : 0.0;
    r.status = r.residual_rel <= r.tolerance ? Status::Pass : Status::Fail;
    return r;
}

std::vector<ScalarField> weak_form_test_functions(const GridSpec& grid, int count, std::uint64_t seed)
{
    require(count >= 0, ErrorCode::Parameter, "negative test function count");
    const double l = grid.half_width();
    SplitMix64 rng(seed);
    std::vector<ScalarField> out;
    for (int i = 0; i < count; ++i) {
        if (i % 3 == 2) {
            const double r1 = rng.uniform(0.1, 0.3) * l;
            const double r2 = r1 + rng.uniform(0.1, 0.3) * l;
            const double eps = rng.uniform(0.2, 0.9) * std::min(r1, 0.5 * (r2 - r1));
            out.push_back(ramp_test_function(r1, r2, eps, grid));
            continue;
        }
        const int bumps = 1 + static_cast<int>(rng.next() % 3);
        std::vector<BumpSpec> specs;
        for (int b = 0; b < bumps; ++b) {
            BumpSpec s;
            s.radius = rng.uniform(0.1, 0.2) * l;
            for (int k = 0; k < grid.dim(); ++k)
                s.center[k] = rng.uniform(-1.0, 1.0) * (0.5 * l - s.radius);
            s.amplitude = rng.uniform(-1.0, 1.0);
            specs.push_back(s);
        }
        out.push_back(bump_sum(specs, grid));
    }
    return out;
}

IdentityReport check_axisymmetric_decay(const MeridionalField& mf, double rho1, double rho2,
                                        const CheckOptions& options, int sweep_points)
{
    mf.validate();
    require(mf.has_pressure(), ErrorCode::InvalidField, "pressure has not been computed");
    const auto& g = mf.grid;
    require(rho1 >= 0.0 && rho1 < rho2 && rho2 <= g.rho_max * (1.0 + 1e-12), ErrorCode::OutOfDomain,
            "need 0 <= rho1 < rho2 <= P");
    require(sweep_points >= 2, ErrorCode::Parameter, "sweep needs at least two points");

    // g(rho_i) = int (v_rho)^2 / rho dz on every node row.
    std::vector<double> rho(g.n_rho), row(g.n_rho, 0.0);
    for (int i = 0; i < g.n_rho; ++i) {
        rho[i] = g.rho(i);
        if (i == 0)
            continue;
        double s = 0.0;
        for (int j = 0; j < g.n_z; ++j) {
            const double w = !g.periodic_z && (j == 0 || j == g.n_z - 1) ? 0.5 : 1.0;
            const double vr = mf.v_rho[g.index(i, j)];
            s += w * vr * vr;
        }
        row[i] = s * g.h_z() / rho[i];
    }
    double integral = 0.0;
    for (int i = 0; i + 1 < g.n_rho; ++i) {
        const double lo = std::max(rho1, rho[i]);
        const double hi = std::min(rho2, rho[i + 1]);
        if (hi <= lo)
            continue;
        auto at = [&](double x) { return row[i] + (row[i + 1] - row[i]) * (x - rho[i]) / g.h_rho(); };
        integral += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }

    const auto i1 = meridional_line_integral(mf, MeridionalIntegrand::Sum, rho1);
    const auto i2 = meridional_line_integral(mf, MeridionalIntegrand::Sum, rho2);

    IdentityReport r;
    r.identity = "axisymmetric_decay";
    r.params["N"] = mf.ambient_dim;
    r.params["rho1"] = rho1;
    r.params["rho2"] = rho2;
    r.params["periodic_z"] = g.periodic_z ? 1.0 : 0.0;
    r.params["tail"] = i2.tail - i1.tail;
    r.lhs = i2.value - i1.value;
    r.rhs = -(mf.ambient_dim - 2) * integral;
    r.tolerance = options.tolerance;

    double energy = 0.0, pl1 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        energy += mf.v_rho[k] * mf.v_rho[k] + mf.v_z[k] * mf.v_z[k];
        pl1 += std::abs(mf.p[k]);
    }
    r.scale_floor = 1e-12 * (energy + pl1) * g.h_rho() * g.h_z();
    set_tail_fraction(r, i2.tail - i1.tail);

    // Monotonicity of I over the sweep, measured against the largest |I|.
    std::vector<double> values(sweep_points);
    double biggest = 0.0;
    for (int s = 0; s < sweep_points; ++s) {
        const double x = rho1 + (rho2 - rho1) * s / (sweep_points - 1);
        values[s] = meridional_line_integral(mf, MeridionalIntegrand::Sum, x).value;
        biggest = std::max(biggest, std::abs(values[s]));
    }
    double increase = 0.0;
    for (int s = 1; s < sweep_points; ++s)
        increase = std::max(increase, values[s] - values[s - 1]);
    const double monotone_rel = biggest > 0.0 ? increase / biggest : 0.0;
    r.params["monotonicity_violation"] = monotone_rel;
    r.params["I_rho1"] = i1.value;
    r.params["I_rho2"] = i2.value;
    const bool monotone = monotone_rel <= 0.1 * options.tolerance;
    r.notes["monotone"] = monotone ? "true" : "false";
    if (rho1 == 0.0 && rho2 >= g.rho_max * (1.0 - 1e-12))
        r.notes["limit_formula"] = "int p(0, z) dz = (N-2) int int (v_rho)^2 / rho";

    finalize(r);
    if (!monotone && r.status == Status::Pass)
        r.status = Status::Fail;
    return r;
}

} // namespace pvl
