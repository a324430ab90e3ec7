#include "pvl/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pvl/error.hpp"
#include "pvl/pressure.hpp"
#include "pvl/special.hpp"
#include "pvl/synth.hpp"

namespace pvl {
namespace {

using Spectrum = std::vector<Complex>;

// Wavenumbers and masks of the 2D periodic grid in FFT order.
struct Modes {
    int m;
    std::vector<double> k;    // k[i] for slot i
    std::vector<double> k_d;  // first-derivative wavenumber (Nyquist removed)
    std::vector<char> keep;   // 2/3 rule

    explicit Modes(const GridSpec& g) : m(g.points()), k(m), k_d(m), keep(m)
    {
        for (int i = 0; i < m; ++i) {
            const int n = g.mode_index(i);
            k[i] = g.wavenumber(n);
            k_d[i] = 2 * std::abs(n) == m ? 0.0 : k[i];
            keep[i] = 3 * std::abs(n) <= m;
        }
    }
    [[nodiscard]] std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * m + j; }
    [[nodiscard]] double k2(int i, int j) const { return k[i] * k[i] + k[j] * k[j]; }
};

Spectrum to_hat(std::span<const double> x, int m)
{
    Spectrum out(x.begin(), x.end());
    fft_forward(out, 2, m);
    return out;
}

std::vector<double> to_real(Spectrum hat, int m)
{
    fft_inverse(hat, 2, m);
    std::vector<double> out(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i)
        out[i] = hat[i].real();
    return out;
}

void dealias(Spectrum& hat, const Modes& md)
{
    for (int i = 0; i < md.m; ++i)
        for (int j = 0; j < md.m; ++j)
            if (!md.keep[i] || !md.keep[j])
                hat[md.at(i, j)] = 0.0;
}

void velocity_hat(const Spectrum& w, const Modes& md, Spectrum& v1, Spectrum& v2)
{
    const Complex I(0.0, 1.0);
    v1.assign(w.size(), 0.0);
    v2.assign(w.size(), 0.0);
    for (int i = 0; i < md.m; ++i)
        for (int j = 0; j < md.m; ++j) {
            const double k2 = md.k2(i, j);
            if (k2 == 0.0)
                continue;
            const Complex psi = w[md.at(i, j)] / k2;
            v1[md.at(i, j)] = I * md.k_d[j] * psi;
            v2[md.at(i, j)] = -I * md.k_d[i] * psi;
        }
}

// -P(v . grad omega); the viscous part is integrated exactly.
Spectrum advection(const Spectrum& w, const Modes& md)
{
    const Complex I(0.0, 1.0);
    const int m = md.m;
    Spectrum v1, v2;
    velocity_hat(w, md, v1, v2);
    Spectrum wx(w.size()), wy(w.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            wx[md.at(i, j)] = I * md.k_d[i] * w[md.at(i, j)];
            wy[md.at(i, j)] = I * md.k_d[j] * w[md.at(i, j)];
        }
    const auto a = to_real(std::move(v1), m);
    const auto b = to_real(std::move(v2), m);
    const auto c = to_real(std::move(wx), m);
    const auto d = to_real(std::move(wy), m);
    std::vector<double> adv(a.size());
    for (std::size_t n = 0; n < adv.size(); ++n)
        adv[n] = -(a[n] * c[n] + b[n] * d[n]);
    auto out = to_hat(adv, m);
    dealias(out, md);
    return out;
}

Spectrum vorticity_hat(const EvolveState& s)
{
    return to_hat(s.vorticity.values(), s.grid.points());
}

EvolveState from_hat(const EvolveState& like, Spectrum w, double time)
{
    const Modes md(like.grid);
    dealias(w, md);
    w[0] = 0.0;
    EvolveState out{like.grid, ScalarField(like.grid, to_real(std::move(w), md.m)), time, like.viscosity};
    return out;
}

VectorField velocity_from_hat(const GridSpec& g, const Spectrum& w)
{
    const Modes md(g);
    Spectrum v1, v2;
    velocity_hat(w, md, v1, v2);
    std::vector<ScalarField> comps;
    comps.emplace_back(g, to_real(std::move(v1), md.m));
    comps.emplace_back(g, to_real(std::move(v2), md.m));
    return VectorField(g, std::move(comps), true);
}

void require_planar(const GridSpec& g)
{
    require(g.dim() == 2, ErrorCode::Parameter, "the evolver is two-dimensional");
}

double vorticity_radius(const EvolveState& s, double threshold)
{
    const auto& g = s.grid;
    const double level = threshold * s.vorticity.max_abs();
    double r = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(s.vorticity[i]) > level) {
            const auto x = g.node(i);
            r = std::max(r, std::hypot(x[0], x[1]));
        }
    return r;
}

std::vector<PlaneSpec> default_planes()
{
    const double angles[] = {0.0, 0.3, 0.9, 1.3};
    const double offsets[] = {0.0, 0.1, -0.2, 0.15};
    std::vector<PlaneSpec> out;
    for (int i = 0; i < 4; ++i) {
        const Point xi{std::cos(angles[i]), std::sin(angles[i]), 0.0};
        out.push_back({xi, {offsets[i] * xi[0], offsets[i] * xi[1], 0.0}});
    }
    return out;
}

} // namespace

EvolveState make_state(const VectorField& v, double viscosity, double time)
{
    const auto& g = v.grid();
    require_planar(g);
    require(viscosity >= 0.0, ErrorCode::Parameter, "viscosity must be nonnegative");
    const Modes md(g);
    const Complex I(0.0, 1.0);
    const auto a = to_hat(v[0].values(), md.m);
    const auto b = to_hat(v[1].values(), md.m);
    Spectrum w(a.size());
    for (int i = 0; i < md.m; ++i)
        for (int j = 0; j < md.m; ++j)
            w[md.at(i, j)] = I * md.k_d[i] * b[md.at(i, j)] - I * md.k_d[j] * a[md.at(i, j)];
    EvolveState like{g, ScalarField(g), time, viscosity};
    return from_hat(like, std::move(w), time);
}

VectorField taylor_green_velocity(const GridSpec& grid, double viscosity, double time)
{
    require_planar(grid);
    const double decay = std::exp(-2.0 * viscosity * time);
    auto v1 = ScalarField::from_function(grid, [&](const Point& x) { return decay * std::sin(x[0]) * std::cos(x[1]); });
    auto v2 = ScalarField::from_function(grid, [&](const Point& x) { return -decay * std::cos(x[0]) * std::sin(x[1]); });
    std::vector<ScalarField> comps{std::move(v1), std::move(v2)};
    return VectorField(grid, std::move(comps), true);
}

EvolveState taylor_green_state(int points, double viscosity)
{
    const GridSpec g(2, points, std::numbers::pi);
    return make_state(taylor_green_velocity(g, viscosity, 0.0), viscosity);
}

ScalarField blob_vorticity(const GridSpec& grid, const BlobSpec& spec)
{
    require_planar(grid);
    require(spec.sigma > 0.0 && spec.distance >= 0.0, ErrorCode::Parameter, "blob parameters out of range");
    const double s2 = spec.sigma * spec.sigma;
    const double d = spec.distance;
    const std::array<std::array<double, 2>, 4> centres{{{d, 0.0}, {0.0, d}, {-d, 0.0}, {0.0, -d}}};
    return ScalarField::from_function(grid, [&](const Point& x) {
        double w = -4.0 * std::exp(-(x[0] * x[0] + x[1] * x[1]) / s2);
        for (const auto& c : centres) {
            const double dx = x[0] - c[0], dy = x[1] - c[1];
            w += std::exp(-(dx * dx + dy * dy) / s2);
        }
        return spec.amplitude * w;
    });
}

EvolveState blob_state(const GridSpec& grid, double viscosity, const BlobSpec& spec)
{
    require(viscosity >= 0.0, ErrorCode::Parameter, "viscosity must be nonnegative");
    EvolveState like{grid, ScalarField(grid), 0.0, viscosity};
    const auto w = blob_vorticity(grid, spec);
    return from_hat(like, to_hat(w.values(), grid.points()), 0.0);
}

VectorField velocity(const EvolveState& state)
{
    require_planar(state.grid);
    return velocity_from_hat(state.grid, vorticity_hat(state));
}

ScalarField torus_pressure(const VectorField& v)
{
    const auto& g = v.grid();
    const int dim = g.dim();
    const int m = g.points();
    std::vector<double> k(m), kd(m);
    for (int i = 0; i < m; ++i) {
        k[i] = g.wavenumber(g.mode_index(i));
        kd[i] = 2 * std::abs(g.mode_index(i)) == m ? 0.0 : k[i];
    }
    Spectrum acc(g.size(), Complex(0.0));
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            const auto t = to_hat(pointwise_product(v[a], v[b]).values(), m);
            Spectrum hat(t.begin(), t.end());
            for (std::size_t n = 0; n < g.size(); ++n) {
                const auto idx = g.unflatten(n);
                const double ka = a == b ? k[idx[a]] : kd[idx[a]];
                const double kb = a == b ? k[idx[b]] : kd[idx[b]];
                acc[n] += (a == b ? 1.0 : 2.0) * ka * kb * hat[n];
            }
        }
    // Laplace(p) = -d_a d_b T_ab  <=>  -|k|^2 p = k_a k_b T_ab
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto idx = g.unflatten(n);
        double k2 = 0.0;
        for (int a = 0; a < dim; ++a)
            k2 += k[idx[a]] * k[idx[a]];
        acc[n] = k2 == 0.0 ? Complex(0.0) : -acc[n] / k2;
    }
    fft_inverse(acc, dim, m);
    std::vector<double> out(g.size());
    for (std::size_t n = 0; n < g.size(); ++n)
        out[n] = acc[n].real();
    return ScalarField(g, std::move(out));
}

double kinetic_energy(const EvolveState& state)
{
    return 0.5 * velocity(state).energy();
}

double max_stable_step(const EvolveState& state)
{
    const double vmax = velocity(state).max_abs();
    return vmax == 0.0 ? std::numeric_limits<double>::infinity() : kCfl * state.grid.spacing() / vmax;
}

EvolveState step(const EvolveState& state, double dt)
{
    require_planar(state.grid);
    require(std::isfinite(dt) && std::abs(dt) <= max_stable_step(state) * (1.0 + 1e-12), ErrorCode::StepSize,
            "time step violates the CFL bound");
    const Modes md(state.grid);
    const double nu = state.viscosity;
    const auto w0 = vorticity_hat(state);
    const std::size_t size = w0.size();
    // Integrating factors exp(-nu |k|^2 tau) for tau = dt / 2 and dt.
    std::vector<double> half(size), full(size);
    for (int i = 0; i < md.m; ++i)
        for (int j = 0; j < md.m; ++j) {
            half[md.at(i, j)] = std::exp(-0.5 * nu * md.k2(i, j) * dt);
            full[md.at(i, j)] = half[md.at(i, j)] * half[md.at(i, j)];
        }
    Spectrum u(size);
    const auto k1 = advection(w0, md);
    for (std::size_t i = 0; i < size; ++i)
        u[i] = half[i] * (w0[i] + 0.5 * dt * k1[i]);
    const auto k2 = advection(u, md);
    for (std::size_t i = 0; i < size; ++i)
        u[i] = half[i] * w0[i] + 0.5 * dt * k2[i];
    const auto k3 = advection(u, md);
    for (std::size_t i = 0; i < size; ++i)
        u[i] = full[i] * w0[i] + dt * half[i] * k3[i];
    const auto k4 = advection(u, md);
    Spectrum w(size);
    for (std::size_t i = 0; i < size; ++i)
        w[i] = full[i] * w0[i] + dt / 6.0 * (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) + k4[i]);
    return from_hat(state, std::move(w), state.time + dt);
}

EvolveState advance(EvolveState state, double t_end, double max_dt)
{
    require(max_dt > 0.0, ErrorCode::StepSize, "max_dt must be positive");
    while (state.time < t_end) {
        const double remaining = t_end - state.time;
        const double dt = std::min({max_dt, max_stable_step(state), remaining});
        if (dt <= 1e-14 * std::max(1.0, std::abs(t_end)))
            break;
        state = step(state, dt);
        if (remaining - dt <= 1e-14 * std::max(1.0, std::abs(t_end)))
            state.time = t_end;
    }
    return state;
}

double momentum_residual(const EvolveState& state, double dt_probe)
{
    require_planar(state.grid);
    require(dt_probe > 0.0, ErrorCode::StepSize, "probe step must be positive");
    const auto& g = state.grid;
    const Modes md(g);
    const int m = md.m;
    const Complex I(0.0, 1.0);

    const auto vp = velocity(step(state, dt_probe));
    const auto vm = velocity(step(state, -dt_probe));
    const auto v = velocity(state);

    // A = P((v . grad) v); its divergence-free part equals -grad p - (v . grad) v.
    std::array<Spectrum, 2> vh{to_hat(v[0].values(), m), to_hat(v[1].values(), m)};
    std::array<Spectrum, 2> a;
    for (int c = 0; c < 2; ++c) {
        Spectrum dx(vh[c].size()), dy(vh[c].size());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                dx[md.at(i, j)] = I * md.k_d[i] * vh[c][md.at(i, j)];
                dy[md.at(i, j)] = I * md.k_d[j] * vh[c][md.at(i, j)];
            }
        const auto gx = to_real(std::move(dx), m);
        const auto gy = to_real(std::move(dy), m);
        std::vector<double> adv(gx.size());
        for (std::size_t n = 0; n < adv.size(); ++n)
            adv[n] = v[0][n] * gx[n] + v[1][n] * gy[n];
        a[c] = to_hat(adv, m);
        dealias(a[c], md);
    }

    double worst = 0.0;
    std::array<Spectrum, 2> rest;
    for (int c = 0; c < 2; ++c)
        rest[c].assign(vh[c].size(), 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const std::size_t n = md.at(i, j);
            const double k2 = md.k2(i, j);
            // grad p = -k (k . A) / |k|^2 in Fourier space
            const Complex kdota = md.k[i] * a[0][n] + md.k[j] * a[1][n];
            const Complex gp0 = k2 == 0.0 ? Complex(0.0) : -md.k[i] * kdota / k2;
            const Complex gp1 = k2 == 0.0 ? Complex(0.0) : -md.k[j] * kdota / k2;
            rest[0][n] = a[0][n] + gp0 + state.viscosity * k2 * vh[0][n];
            rest[1][n] = a[1][n] + gp1 + state.viscosity * k2 * vh[1][n];
        }
    for (int c = 0; c < 2; ++c) {
        const auto r = to_real(std::move(rest[c]), m);
        for (std::size_t n = 0; n < r.size(); ++n) {
            const double dvdt = (vp[c][n] - vm[c][n]) / (2.0 * dt_probe);
            worst = std::max(worst, std::abs(dvdt + r[n]));
        }
    }
    return worst;
}

ScalarField window_function(const GridSpec& grid, double radius)
{
    require(radius > 0.0, ErrorCode::Parameter, "window radius must be positive");
    return ScalarField::from_function(grid, [&](const Point& x) {
        double r2 = 0.0;
        for (int k = 0; k < grid.dim(); ++k)
            r2 += x[k] * x[k];
        return 1.0 - mollifier_cdf(std::sqrt(r2) - 0.75 * radius, 0.25 * radius);
    });
}

std::vector<TrackedSnapshot> track_identities(EvolveState state, double window_radius, const TrackOptions& options)
{
    const auto& g = state.grid;
    require_planar(g);
    require(window_radius > 0.0 && window_radius <= 0.5 * g.half_width() * (1.0 + 1e-12), ErrorCode::Parameter,
            "window radius must lie in (0, L/2]");
    require(options.snapshots >= 0 && options.t_end >= 0.0, ErrorCode::Parameter, "bad snapshot schedule");
    const auto planes = options.planes.empty() ? default_planes() : options.planes;
    const auto sigma = window_function(g, window_radius);

    std::vector<TrackedSnapshot> out;
    for (int s = 0; s <= options.snapshots; ++s) {
        const double t = options.snapshots == 0 ? 0.0 : options.t_end * s / options.snapshots;
        state = advance(std::move(state), t, options.max_dt);

        TrackedSnapshot snap;
        snap.time = t;
        snap.vorticity_radius = vorticity_radius(state, options.support_threshold);
        require(snap.vorticity_radius <= window_radius, ErrorCode::WindowOverflow,
                "vorticity support left the window at t = " + std::to_string(t));

        const auto v = velocity(state);
        VectorField vw = v;
        for (int k = 0; k < 2; ++k)
            vw[k] = pointwise_product(v[k], sigma);
        if (options.symmetrize)
            vw = symmetrize(vw);
        const auto p = pressure_freespace(vw);
        const double energy = v.energy();
        double outside = 0.0;
        for (int k = 0; k < 2; ++k) {
            const auto d = v[k] - vw[k];
            outside += pointwise_product(d, d).integral();
        }
        snap.window_error = energy > 0.0 ? outside / energy : 0.0;
        snap.moment_isotropy = second_moments(vw).anisotropy();
        if (options.on_snapshot)
            options.on_snapshot(state, vw, p);

        HypothesisDiagnostics hyp;
        hyp.moment_isotropy = snap.moment_isotropy;
        hyp.support_margin = 0.5 * g.half_width() - window_radius;
        const double floor = scale_floor(vw, p);

        const PressureMultipole far(vw);
        for (const auto& plane : planes) {
            IdentityReport r;
            r.identity = "hyperplane";
            r.params["t"] = t;
            r.params["window"] = window_radius;
            r.params["window_error"] = snap.window_error;
            r.params["xi_0"] = plane.xi[0];
            r.params["xi_1"] = plane.xi[1];
            r.params["x0_0"] = plane.x0[0];
            r.params["x0_1"] = plane.x0[1];
            const auto lhs = plane_integral(p, plane, far);
            r.lhs = lhs.value;
            r.rhs = -plane_integral(v.normal_component_squared(plane.xi), plane).in_box;
            r.params["tail"] = lhs.tail;
            r.tolerance = options.tolerance;
            r.scale_floor = floor;
            r.hypothesis = hyp;
            const double denom = std::max({std::abs(r.lhs), std::abs(r.rhs), floor});
            r.hypothesis.tail_fraction = denom > 0.0 ? std::abs(lhs.tail) / denom : 0.0;
            finalize(r);
            snap.reports.push_back(std::move(r));
        }
        const auto total = volume_integral(RadialSpectrum(p), g.half_width(), window_radius);
        for (int j = 0; j < 2; ++j) {
            IdentityReport r;
            r.identity = "global";
            r.params["t"] = t;
            r.params["window"] = window_radius;
            r.params["window_error"] = snap.window_error;
            r.params["component"] = j;
            r.lhs = total.value;
            r.rhs = -pointwise_product(v[j], v[j]).integral();
            r.tolerance = options.tolerance;
            r.scale_floor = floor;
            r.hypothesis = hyp;
            finalize(r);
            snap.reports.push_back(std::move(r));
        }
        out.push_back(std::move(snap));
    }
    return out;
}

} // namespace pvl
