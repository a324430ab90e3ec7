#include "pvl/special.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pvl/error.hpp"

namespace pvl {

const QuadratureRule& gauss_legendre(int n)
{
    require(n >= 1 && n <= 512, ErrorCode::Parameter, "Gauss-Legendre order out of range");
    static std::mutex mutex;
    static std::map<int, QuadratureRule> rules;
    std::lock_guard lock(mutex);
    if (auto it = rules.find(n); it != rules.end())
        return it->second;

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return rules.emplace(n, std::move(rule)).first->second;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order)
{
    require(panels >= 1, ErrorCode::Parameter, "need at least one panel");
    const auto& base = gauss_legendre(order);
    QuadratureRule out;
    out.nodes.reserve(static_cast<std::size_t>(panels) * order);
    out.weights.reserve(static_cast<std::size_t>(panels) * order);
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        for (int i = 0; i < order; ++i) {
            out.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
            out.weights.push_back(0.5 * width * base.weights[i]);
        }
    }
    return out;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels, int order)
{
    if (a == b)
        return 0.0;
    const auto rule = composite_gauss_legendre(a, b, panels, order);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

BesselValues bessel_j012(double x)
{
    BesselValues out;
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        out.j0 = 1.0 - x2 / 4.0 + x2 * x2 / 64.0;
        out.j1 = x / 2.0 - x * x2 / 16.0;
        out.j2 = x2 / 8.0 - x2 * x2 / 96.0;
        out.int_j0 = x - x * x2 / 12.0;
        return out;
    }

    // Miller: recur downward from an order well above x, normalise with
    // J0 + 2 * sum J_{2k} = 1. Odd orders accumulate int_0^x J0 = 2 * sum J_{2k+1}.
    int start = static_cast<int>(ax + 30.0 + 8.0 * std::cbrt(ax));
    start += start % 2;
    double jp = 0.0, j = 1e-300;
    double even_sum = 0.0, odd_sum = 0.0;
    double j0 = 0, j1 = 0, j2 = 0;
    for (int n = start; n > 0; --n) {
        const double jm = 2.0 * n / ax * j - jp;
        jp = j;
        j = jm; // J_{n-1}
        const int order = n - 1;
        if (order == 2)
            j2 = j;
        if (order == 1)
            j1 = j;
        if (order == 0)
            j0 = j;
        if (order > 0) {
            if (order % 2 == 0)
                even_sum += j;
            else
                odd_sum += j;
        }
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp *= 1e-250;
            even_sum *= 1e-250;
            odd_sum *= 1e-250;
            j0 *= 1e-250;
            j1 *= 1e-250;
            j2 *= 1e-250;
        }
    }
    const double norm = j0 + 2.0 * even_sum;
    out.j0 = j0 / norm;
    out.j1 = j1 / norm;
    out.j2 = j2 / norm;
    out.int_j0 = 2.0 * odd_sum / norm;
    if (x < 0.0) {
        out.j1 = -out.j1;
        out.int_j0 = -out.int_j0;
    }
    return out;
}

SphericalBesselValues spherical_bessel_j012(double x)
{
    SphericalBesselValues out;
    const double ax = std::abs(x);
    if (ax < 1e-2) {
        const double x2 = x * x;
        out.j0 = 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
        out.j1 = x / 3.0 * (1.0 - x2 / 10.0 + x2 * x2 / 280.0);
        out.j2 = x2 / 15.0 * (1.0 - x2 / 14.0 + x2 * x2 / 504.0);
        return out;
    }
    const double s = std::sin(x), c = std::cos(x);
    out.j0 = s / x;
    out.j1 = s / (x * x) - c / x;
    out.j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
    if (ax < 0.5) {
        // The closed form for j2 cancels badly for small arguments.
        const double x2 = x * x;
        double term = x2 / 15.0, sum = term;
        for (int k = 1; k < 12; ++k) {
            term *= -x2 / (2.0 * k * (2.0 * k + 5.0));
            sum += term;
        }
        out.j2 = sum;
    }
    return out;
}

double unit_bump_integral(int dim)
{
    require(dim >= 1 && dim <= 3, ErrorCode::Parameter, "bump integral available for dim 1..3");
    static const double values[3] = {
        integrate([](double r) { return 2.0 * std::exp(1.0 / (r * r - 1.0)); }, 0.0, 1.0, 64, 20),
        integrate([](double r) { return 2.0 * std::numbers::pi * r * std::exp(1.0 / (r * r - 1.0)); }, 0.0, 1.0, 64,
                  20),
        integrate([](double r) { return 4.0 * std::numbers::pi * r * r * std::exp(1.0 / (r * r - 1.0)); }, 0.0, 1.0,
                  64, 20),
    };
    return values[dim - 1];
}

double mollifier_normalizer(int dim) { return 1.0 / unit_bump_integral(dim); }

double mollifier(double x, double eps)
{
    const double u = x / eps;
    if (std::abs(u) >= 1.0)
        return 0.0;
    return mollifier_normalizer(1) * std::exp(1.0 / (u * u - 1.0)) / eps;
}

double mollifier_cdf(double t, double eps)
{
    if (t <= -eps)
        return 0.0;
    if (t >= eps)
        return 1.0;
    return integrate([eps](double s) { return mollifier(s, eps); }, -eps, t, 8, 20);
}

double mollifier_cdf_integral(double t, double eps)
{
    if (t <= -eps)
        return 0.0;
    if (t >= eps)
        return t;
    const double first_moment = integrate([eps](double s) { return s * mollifier(s, eps); }, -eps, t, 8, 20);
    return t * mollifier_cdf(t, eps) - first_moment;
}

} // namespace pvl
