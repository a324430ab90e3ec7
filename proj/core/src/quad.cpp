#include "pvl/quad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "pvl/error.hpp"
#include "pvl/special.hpp"

namespace pvl {
namespace {

constexpr double pi = std::numbers::pi;

// Visits the symmetric mode set; `scale` carries the Nyquist split and the
// (-1)^n phase that moves the coefficient reference from x = -L to x = 0.
template <class F>
void for_each_mode(const GridSpec& g, F&& visit)
{
    const int m = g.points();
    const int half = m / 2;
    const int dim = g.dim();
    std::array<int, 3> n{0, 0, 0};
    for (int k = 0; k < dim; ++k)
        n[k] = -half;
    while (true) {
        double scale = 1.0;
        bool odd = false;
        std::array<int, 3> slot{0, 0, 0};
        for (int k = 0; k < dim; ++k) {
            if (n[k] == half || n[k] == -half)
                scale *= 0.5;
            slot[k] = (n[k] + m) % m;
            odd ^= (n[k] & 1) != 0;
        }
        visit(n, g.flatten(slot), odd ? -scale : scale);
        int k = dim - 1;
        for (; k >= 0; --k) {
            if (++n[k] <= half)
                break;
            n[k] = -half;
        }
        if (k < 0)
            break;
    }
}

double j1_over_z(double z, double j1)
{
    return z < 1e-3 ? 1.0 / 3.0 - z * z / 30.0 : j1 / z;
}

// int_a^b exp(i q t) dt, stable for small q.
Complex segment_exp(double q, double a, double b)
{
    const double half_len = 0.5 * (b - a);
    const double x = q * half_len;
    const double sinc = std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return std::polar(b - a, q * 0.5 * (a + b)) * sinc;
}

// int_{|s| < rho} exp(i q . s) ds over a disk with |q| = q.
double disk_exp(double q, double rho)
{
    const double z = q * rho;
    if (z < 1e-6)
        return pi * rho * rho;
    return 2.0 * pi * rho * rho * bessel_j012(z).j1 / z;
}

double piecewise_linear_integral(std::span<const double> z, std::span<const double> f, double a, double b)
{
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < z.size(); ++j) {
        const double lo = std::max(a, z[j]);
        const double hi = std::min(b, z[j + 1]);
        if (hi <= lo)
            continue;
        const double span = z[j + 1] - z[j];
        auto at = [&](double x) { return f[j] + (f[j + 1] - f[j]) * (x - z[j]) / span; };
        s += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    return s;
}

} // namespace

void PlaneSpec::validate(int dim) const
{
    double n2 = 0.0;
    for (int k = 0; k < dim; ++k)
        n2 += xi[k] * xi[k];
    require(std::abs(std::sqrt(n2) - 1.0) <= 1e-12, ErrorCode::Parameter, "plane normal must be a unit vector");
}

double PlaneSpec::offset(int dim) const
{
    double s = 0.0;
    for (int k = 0; k < dim; ++k)
        s += xi[k] * x0[k];
    return s;
}

// ---------------------------------------------------------------------------

RadialSpectrum::RadialSpectrum(const ScalarField& f) : dim_(f.grid().dim())
{
    const auto& g = f.grid();
    const auto c = fourier_coefficients(f);
    std::vector<double> by_norm(static_cast<std::size_t>(g.dim()) * (g.points() / 2) * (g.points() / 2) + 1, 0.0);
    std::vector<char> used(by_norm.size(), 0);
    for_each_mode(g, [&](const std::array<int, 3>& n, std::size_t slot, double scale) {
        std::size_t n2 = 0;
        for (int k = 0; k < g.dim(); ++k)
            n2 += static_cast<std::size_t>(n[k] * n[k]);
        by_norm[n2] += scale * c[slot].real();
        used[n2] = 1;
    });
    for (std::size_t n2 = 0; n2 < by_norm.size(); ++n2)
        if (used[n2]) {
            kappa_.push_back(pi / g.half_width() * std::sqrt(static_cast<double>(n2)));
            trace_.push_back(by_norm[n2]);
        }
}

RadialSpectrum RadialSpectrum::normal_normal(const VectorField& v)
{
    const auto& g = v.grid();
    const int dim = g.dim();
    std::vector<std::vector<Complex>> t(9);
    for (int j = 0; j < dim; ++j)
        for (int k = j; k < dim; ++k)
            t[3 * j + k] = fourier_coefficients(pointwise_product(v[j], v[k]));

    const std::size_t count = static_cast<std::size_t>(dim) * (g.points() / 2) * (g.points() / 2) + 1;
    std::vector<double> tr(count, 0.0), nn(count, 0.0);
    std::vector<char> used(count, 0);
    for_each_mode(g, [&](const std::array<int, 3>& n, std::size_t slot, double scale) {
        std::size_t n2 = 0;
        for (int k = 0; k < dim; ++k)
            n2 += static_cast<std::size_t>(n[k] * n[k]);
        double trace = 0.0, proj = 0.0;
        for (int j = 0; j < dim; ++j) {
            trace += t[4 * j][slot].real();
            for (int k = j; k < dim; ++k) {
                const double w = j == k ? 1.0 : 2.0;
                proj += w * n[j] * n[k] * t[3 * j + k][slot].real();
            }
        }
        tr[n2] += scale * trace;
        if (n2 > 0)
            nn[n2] += scale * proj / static_cast<double>(n2);
        used[n2] = 1;
    });

    RadialSpectrum out;
    out.dim_ = dim;
    out.tensor_ = true;
    for (std::size_t n2 = 0; n2 < count; ++n2)
        if (used[n2]) {
            out.kappa_.push_back(pi / g.half_width() * std::sqrt(static_cast<double>(n2)));
            out.trace_.push_back(tr[n2]);
            out.nn_.push_back(nn[n2]);
        }
    return out;
}

double RadialSpectrum::sphere(double r) const
{
    if (r <= 0.0)
        return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < kappa_.size(); ++i) {
        const double z = kappa_[i] * r;
        if (dim_ == 2) {
            const auto b = bessel_j012(z);
            s += tensor_ ? pi * r * ((b.j0 + b.j2) * trace_[i] - 2.0 * b.j2 * nn_[i])
                         : 2.0 * pi * r * b.j0 * trace_[i];
        } else {
            const auto b = spherical_bessel_j012(z);
            s += tensor_ ? 4.0 * pi * r * r * (j1_over_z(z, b.j1) * trace_[i] - b.j2 * nn_[i])
                         : 4.0 * pi * r * r * b.j0 * trace_[i];
        }
    }
    return s;
}

double RadialSpectrum::ball(double r) const
{
    require(!tensor_, ErrorCode::Parameter, "ball integrals are defined for scalar spectra");
    if (r <= 0.0)
        return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < kappa_.size(); ++i) {
        const double kap = kappa_[i];
        const double z = kap * r;
        double w = 0.0;
        if (dim_ == 2) {
            w = z < 1e-8 ? pi * r * r : 2.0 * pi * r * bessel_j012(z).j1 / kap;
        } else {
            w = z < 1e-2 ? 4.0 * pi * r * r * r * (1.0 / 3.0 - z * z / 30.0)
                         : 4.0 * pi * (std::sin(z) - z * std::cos(z)) / (kap * kap * kap);
        }
        s += w * trace_[i];
    }
    return s;
}

double RadialSpectrum::shell_weighted(double r1, double r2) const
{
    if (r2 <= r1)
        return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < kappa_.size(); ++i) {
        const double kap = kappa_[i];
        if (kap == 0.0) {
            if (dim_ == 2)
                s += (tensor_ ? pi : 2.0 * pi) * (r2 - r1) * trace_[i];
            else
                s += (tensor_ ? 2.0 * pi / 3.0 : 2.0 * pi) * (r2 * r2 - r1 * r1) * trace_[i];
            continue;
        }
        const double z1 = kap * r1, z2 = kap * r2;
        if (dim_ == 2) {
            const auto b1 = bessel_j012(z1), b2 = bessel_j012(z2);
            if (!tensor_) {
                s += 2.0 * pi / kap * (b2.int_j0 - b1.int_j0) * trace_[i];
            } else {
                const double a_t = (2.0 * b2.int_j0 - 2.0 * b2.j1) - (2.0 * b1.int_j0 - 2.0 * b1.j1);
                const double a_d = (b2.int_j0 - 2.0 * b2.j1) - (b1.int_j0 - 2.0 * b1.j1);
                s += pi / kap * (a_t * trace_[i] - 2.0 * a_d * nn_[i]);
            }
        } else {
            if (!tensor_) {
                const double dc = 2.0 * std::sin(0.5 * (z1 + z2)) * std::sin(0.5 * (z2 - z1));
                s += 4.0 * pi * dc / (kap * kap) * trace_[i];
            } else {
                const auto b1 = spherical_bessel_j012(z1), b2 = spherical_bessel_j012(z2);
                const double a_t = b1.j0 - b2.j0;
                const double a_d = (-3.0 * b2.j0 + std::cos(z2)) - (-3.0 * b1.j0 + std::cos(z1));
                s += 4.0 * pi / (kap * kap) * (a_t * trace_[i] - a_d * nn_[i]);
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

SphereRule SphereRule::make(int dim, double radius, double h, const Point& center)
{
    require(dim == 2 || dim == 3, ErrorCode::Parameter, "sphere rules exist for dim 2 and 3");
    require(radius >= 0.0 && h > 0.0, ErrorCode::Parameter, "sphere radius and spacing must be non-negative");
    SphereRule rule;
    rule.radius = radius;
    rule.center = center;
    if (radius == 0.0) {
        rule.nodes.push_back(center);
        rule.weights.push_back(0.0);
        return rule;
    }
    if (dim == 2) {
        const int n = std::max(16, 4 * static_cast<int>(std::ceil(2.0 * pi * radius / h)));
        for (int i = 0; i < n; ++i) {
            const double th = 2.0 * pi * i / n;
            rule.nodes.push_back({center[0] + radius * std::cos(th), center[1] + radius * std::sin(th), 0.0});
            rule.weights.push_back(2.0 * pi * radius / n);
        }
        return rule;
    }
    const int n_theta = std::max(8, 2 * static_cast<int>(std::ceil(pi * radius / h)));
    const int n_phi = 2 * n_theta;
    const auto& gl = gauss_legendre(n_theta);
    for (int a = 0; a < n_theta; ++a) {
        const double ct = gl.nodes[a];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int b = 0; b < n_phi; ++b) {
            const double ph = 2.0 * pi * b / n_phi;
            rule.nodes.push_back({center[0] + radius * st * std::cos(ph), center[1] + radius * st * std::sin(ph),
                                  center[2] + radius * ct});
            rule.weights.push_back(radius * radius * gl.weights[a] * 2.0 * pi / n_phi);
        }
    }
    return rule;
}

double SphereRule::area() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

TailFit fit_power_tail(double inner_shell, double outer_shell, int weight_power, double exponent, bool fit_exponent)
{
    if (inner_shell == 0.0 && outer_shell == 0.0)
        return {};
    if (fit_exponent && inner_shell * outer_shell > 0.0) {
        const double ratio = inner_shell / outer_shell;
        if (ratio > 1.0 + 1e-3)
            return {outer_shell / (ratio - 1.0), weight_power + 1 + std::log2(ratio)};
    }
    const double ratio = std::exp2(exponent - weight_power - 1);
    if (ratio <= 1.0)
        return {};
    return {outer_shell / (ratio - 1.0), exponent};
}

QuadResult plane_integral(const ScalarField& f, const PlaneSpec& plane)
{
    const auto& g = f.grid();
    const int dim = g.dim();
    plane.validate(dim);
    const double l = g.half_width();
    const double offset = plane.offset(dim);
    Point c{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k)
        c[k] = offset * plane.xi[k];

    QuadResult out;
    double rho_max = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim; ++k) {
        if (std::abs(c[k]) >= l) {
            out.intersects = false;
            return out;
        }
        const double s = std::sqrt(std::max(0.0, 1.0 - plane.xi[k] * plane.xi[k]));
        if (s > 1e-14)
            rho_max = std::min(rho_max, (l - std::abs(c[k])) / s);
    }
    const double t = 0.95 * rho_max;

    const auto coeffs = fourier_coefficients(f);
    if (dim == 2) {
        const Point eta{-plane.xi[1], plane.xi[0], 0.0};
        Complex main(0.0), r1(0.0), r2(0.0), l1(0.0), l2(0.0);
        for_each_mode(g, [&](const std::array<int, 3>& n, std::size_t slot, double scale) {
            const double k0 = g.wavenumber(n[0]), k1 = g.wavenumber(n[1]);
            const Complex amp = scale * coeffs[slot] * std::polar(1.0, k0 * c[0] + k1 * c[1]);
            const double q = k0 * eta[0] + k1 * eta[1];
            main += amp * segment_exp(q, -t, t);
            r1 += amp * segment_exp(q, 0.25 * t, 0.5 * t);
            r2 += amp * segment_exp(q, 0.5 * t, t);
            l1 += amp * segment_exp(q, -0.5 * t, -0.25 * t);
            l2 += amp * segment_exp(q, -t, -0.5 * t);
        });
        const auto right = fit_power_tail(r1.real(), r2.real(), 0, dim + 1, true);
        const auto left = fit_power_tail(l1.real(), l2.real(), 0, dim + 1, true);
        out.in_box = main.real();
        out.tail = right.tail + left.tail;
        out.tail_exponent = std::abs(right.tail) >= std::abs(left.tail) ? right.exponent : left.exponent;
    } else {
        Complex main(0.0), s1(0.0), s2(0.0);
        for_each_mode(g, [&](const std::array<int, 3>& n, std::size_t slot, double scale) {
            const Point k{g.wavenumber(n[0]), g.wavenumber(n[1]), g.wavenumber(n[2])};
            const double kn = k[0] * plane.xi[0] + k[1] * plane.xi[1] + k[2] * plane.xi[2];
            const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            const double q = std::sqrt(std::max(0.0, k2 - kn * kn));
            const Complex amp = scale * coeffs[slot] * std::polar(1.0, k[0] * c[0] + k[1] * c[1] + k[2] * c[2]);
            const double d1 = disk_exp(q, 0.25 * t), d2 = disk_exp(q, 0.5 * t), d3 = disk_exp(q, t);
            main += amp * d3;
            s1 += amp * (d2 - d1);
            s2 += amp * (d3 - d2);
        });
        const auto fit = fit_power_tail(s1.real(), s2.real(), 1, dim + 1, true);
        out.in_box = main.real();
        out.tail = fit.tail;
        out.tail_exponent = fit.exponent;
    }
    out.value = out.in_box + out.tail;
    return out;
}

PressureMultipole::PressureMultipole(const VectorField& v, int order)
{
    const auto& g = v.grid();
    require(g.dim() == 2, ErrorCode::Parameter, "pressure multipoles are two-dimensional");
    require(order >= 1, ErrorCode::Parameter, "multipole order must be positive");
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        peak = std::max(peak, std::hypot(v[0][i], v[1][i]));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::hypot(v[0][i], v[1][i]) > 1e-14 * peak) {
            const auto x = g.node(i);
            radius_ = std::max(radius_, std::hypot(x[0], x[1]));
        }
    radius_ += g.spacing();

    moments_.assign(static_cast<std::size_t>(order), Complex(0.0));
    const double cell = g.cell_volume();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Complex u(v[0][i], v[1][i]);
        Complex term = u * u * cell;
        if (term == Complex(0.0))
            continue;
        const auto x = g.node(i);
        const Complex w = Complex(x[0], x[1]) / radius_;
        for (auto& q : moments_) {
            q += term;
            term *= w;
        }
    }
}

double PressureMultipole::leading_exponent() const
{
    double biggest = 0.0;
    for (const auto& q : moments_)
        biggest = std::max(biggest, std::abs(q));
    for (std::size_t m = 0; m < moments_.size(); ++m)
        if (std::abs(moments_[m]) > 1e-8 * biggest)
            return static_cast<double>(m + 2);
    return 0.0;
}

double PressureMultipole::value(const Point& x) const
{
    const Complex z(x[0], x[1]);
    require(std::abs(z) > radius_, ErrorCode::OutOfDomain, "point inside the multipole radius");
    const Complex ratio = radius_ / z;
    Complex power = ratio * ratio;
    Complex s(0.0);
    for (std::size_t m = 0; m < moments_.size(); ++m) {
        s += static_cast<double>(m + 1) * moments_[m] * power;
        power *= ratio;
    }
    return s.real() / (2.0 * pi * radius_ * radius_);
}

double PressureMultipole::ray_integral(const Point& x0, const Point& eta, double t0) const
{
    const Complex z0(x0[0], x0[1]);
    const Complex e(eta[0], eta[1]);
    const Complex z1 = z0 + t0 * e;
    const double closest = std::abs(z0 + std::max(t0, -(std::conj(e) * z0).real()) * e);
    require(closest > radius_, ErrorCode::OutOfDomain, "ray enters the multipole radius");
    // int_{t0}^inf (z0 + t e)^-(m+2) dt = z1^-(m+1) / ((m + 1) e)
    const Complex ratio = radius_ / z1;
    Complex power = ratio;
    Complex s(0.0);
    for (const auto& q : moments_) {
        s += q * power;
        power *= ratio;
    }
    return (s / e).real() / (2.0 * pi * radius_);
}

QuadResult plane_integral(const ScalarField& p, const PlaneSpec& plane, const PressureMultipole& far)
{
    const auto& g = p.grid();
    require(g.dim() == 2, ErrorCode::Parameter, "multipole tails are two-dimensional");
    plane.validate(2);
    const double l = g.half_width();
    const double offset = plane.offset(2);
    const Point c{offset * plane.xi[0], offset * plane.xi[1], 0.0};

    QuadResult out;
    double rho_max = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 2; ++k) {
        if (std::abs(c[k]) >= l) {
            out.intersects = false;
            return out;
        }
        const double s = std::sqrt(std::max(0.0, 1.0 - plane.xi[k] * plane.xi[k]));
        if (s > 1e-14)
            rho_max = std::min(rho_max, (l - std::abs(c[k])) / s);
    }
    const double t = 0.95 * rho_max;

    const auto coeffs = fourier_coefficients(p);
    const Point eta{-plane.xi[1], plane.xi[0], 0.0};
    Complex main(0.0);
    for_each_mode(g, [&](const std::array<int, 3>& n, std::size_t slot, double scale) {
        const double k0 = g.wavenumber(n[0]), k1 = g.wavenumber(n[1]);
        const Complex amp = scale * coeffs[slot] * std::polar(1.0, k0 * c[0] + k1 * c[1]);
        main += amp * segment_exp(k0 * eta[0] + k1 * eta[1], -t, t);
    });
    const Point back{-eta[0], -eta[1], 0.0};
    out.in_box = main.real();
    out.tail = far.ray_integral(c, eta, t) + far.ray_integral(c, back, t);
    out.tail_exponent = far.leading_exponent();
    out.value = out.in_box + out.tail;
    return out;
}

double sphere_integral(const ScalarField& f, double radius, const Point& center)
{
    const auto& g = f.grid();
    double c2 = 0.0;
    for (int k = 0; k < g.dim(); ++k)
        c2 += center[k] * center[k];
    require(radius >= 0.0, ErrorCode::Parameter, "sphere radius must be non-negative");
    require(std::sqrt(c2) + radius <= 0.5 * g.half_width() * (1.0 + 1e-12), ErrorCode::OutOfDomain,
            "sphere leaves the ball of radius L/2");
    if (c2 == 0.0)
        return RadialSpectrum(f).sphere(radius);
    return sphere_integral(f, SphereRule::make(g.dim(), radius, g.spacing(), center));
}

double sphere_integral(const ScalarField& f, const SphereRule& rule)
{
    const TrigInterpolant interp(f);
    const auto values = interp.evaluate(rule.nodes);
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += rule.weights[i] * values[i];
    return s;
}

namespace {

// c t^-(dim+1) against t^w dt, matched on [a, b], integrated over [b, inf).
TailFit matched_tail(double shell, double a, double b, int weight_power, int dim)
{
    const double q = dim + 1 - weight_power - 1;
    if (shell == 0.0 || a >= b * (1.0 - 1e-9))
        return {0.0, static_cast<double>(dim + 1)};
    return {shell / (std::pow(b / a, q) - 1.0), static_cast<double>(dim + 1)};
}

} // namespace

QuadResult shell_weighted_integral(const RadialSpectrum& spectrum, double radius, double half_width, double support)
{
    require(radius >= 0.0, ErrorCode::Parameter, "shell radius must be non-negative");
    const int dim = spectrum.dim();
    const double outer = 0.5 * half_width;
    QuadResult out;
    out.in_box = radius < outer ? spectrum.shell_weighted(radius, outer) : 0.0;
    const double a = std::max(0.5 * outer, support);
    const auto fit = a < outer ? matched_tail(spectrum.shell_weighted(a, outer), a, outer, dim - 2, dim) : TailFit{};
    out.tail = fit.tail;
    out.tail_exponent = fit.exponent;
    if (radius > outer && fit.tail != 0.0)
        out.tail *= std::pow(outer / radius, fit.exponent - (dim - 2) - 1);
    out.value = out.in_box + out.tail;
    return out;
}

QuadResult shell_weighted_integral(const ScalarField& f, double radius)
{
    return shell_weighted_integral(RadialSpectrum(f), radius, f.grid().half_width());
}

QuadResult volume_integral(const RadialSpectrum& spectrum, double half_width, double support)
{
    const int dim = spectrum.dim();
    const double outer = 0.5 * half_width;
    const double a = std::max(0.5 * outer, support);
    const double b3 = spectrum.ball(outer);
    QuadResult out;
    out.in_box = b3;
    const auto fit = a < outer ? matched_tail(b3 - spectrum.ball(a), a, outer, dim - 1, dim) : TailFit{};
    out.tail = fit.tail;
    out.tail_exponent = fit.exponent;
    out.value = out.in_box + out.tail;
    return out;
}

QuadResult volume_integral(const ScalarField& f)
{
    return volume_integral(RadialSpectrum(f), f.grid().half_width());
}

QuadResult meridional_line_integral(const MeridionalField& mf, MeridionalIntegrand which, double rho)
{
    const auto& g = mf.grid;
    require(rho >= 0.0 && rho <= g.rho_max * (1.0 + 1e-12), ErrorCode::OutOfDomain, "rho outside [0, P]");
    require(which == MeridionalIntegrand::VRhoSquared || mf.has_pressure(), ErrorCode::InvalidField,
            "pressure has not been computed");

    const double pos = std::min(rho / g.h_rho(), static_cast<double>(g.n_rho - 1));
    const int i0 = std::min(static_cast<int>(pos), g.n_rho - 2);
    const double theta = pos - i0;

    std::vector<double> z(g.n_z), line(g.n_z);
    for (int j = 0; j < g.n_z; ++j) {
        z[j] = g.z(j);
        double v = 0.0;
        for (int di = 0; di < 2; ++di) {
            const std::size_t id = g.index(i0 + di, j);
            double f = 0.0;
            if (which != MeridionalIntegrand::Pressure)
                f += mf.v_rho[id] * mf.v_rho[id];
            if (which != MeridionalIntegrand::VRhoSquared)
                f += mf.p[id];
            v += (di == 0 ? 1.0 - theta : theta) * f;
        }
        line[j] = v;
    }

    QuadResult out;
    if (g.periodic_z) {
        double s = 0.0;
        for (double v : line)
            s += v;
        out.in_box = s * g.h_z();
        out.value = out.in_box;
        return out;
    }
    const double zh = g.z_half;
    out.in_box = piecewise_linear_integral(z, line, -zh, zh);
    const double gamma = mf.ambient_dim + 1;
    const auto up = fit_power_tail(piecewise_linear_integral(z, line, 0.25 * zh, 0.5 * zh),
                                   piecewise_linear_integral(z, line, 0.5 * zh, zh), 0, gamma, false);
    const auto down = fit_power_tail(piecewise_linear_integral(z, line, -0.5 * zh, -0.25 * zh),
                                     piecewise_linear_integral(z, line, -zh, -0.5 * zh), 0, gamma, false);
    out.tail = up.tail + down.tail;
    out.tail_exponent = out.tail != 0.0 ? gamma : 0.0;
    out.value = out.in_box + out.tail;
    return out;
}

} // namespace pvl
