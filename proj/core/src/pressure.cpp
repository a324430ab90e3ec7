#include "pvl/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "pvl/error.hpp"
#include "pvl/special.hpp"

namespace pvl {
namespace {

constexpr double pi = std::numbers::pi;

// Doubled grid: 2M points per axis with the original spacing, covering [-2L, 2L).
struct PaddedGrid {
    int dim;
    int n;     // 2M
    int shift; // M / 2: padded index of original index 0
    double h;
    double period; // 4L

    explicit PaddedGrid(const GridSpec& g)
        : dim(g.dim()), n(2 * g.points()), shift(g.points() / 2), h(g.spacing()), period(4.0 * g.half_width())
    {
    }

    [[nodiscard]] std::size_t size() const
    {
        std::size_t total = 1;
        for (int k = 0; k < dim; ++k)
            total *= static_cast<std::size_t>(n);
        return total;
    }
    [[nodiscard]] int signed_index(int i) const { return i < n / 2 ? i : i - n; }
    [[nodiscard]] double wavenumber(int i) const { return 2.0 * pi * signed_index(i) / period; }
    [[nodiscard]] std::size_t from_coarse(const std::array<int, 3>& idx) const
    {
        std::size_t flat = 0;
        for (int k = 0; k < dim; ++k)
            flat = flat * n + static_cast<std::size_t>(idx[k] + shift);
        return flat;
    }
};

template <class F>
void for_each_padded(const PaddedGrid& pg, F&& visit)
{
    const std::size_t total = pg.size();
    std::array<int, 3> idx{0, 0, 0};
    for (std::size_t flat = 0; flat < total; ++flat) {
        visit(flat, idx);
        for (int k = pg.dim - 1; k >= 0; --k) {
            if (++idx[k] < pg.n)
                break;
            idx[k] = 0;
        }
    }
}

std::vector<Complex> pad(const GridSpec& g, const PaddedGrid& pg, std::span<const double> samples)
{
    std::vector<Complex> out(pg.size(), Complex(0.0));
    for (std::size_t i = 0; i < g.size(); ++i)
        out[pg.from_coarse(g.unflatten(i))] = samples[i];
    return out;
}

ScalarField restrict_to_grid(const GridSpec& g, const PaddedGrid& pg, std::span<const Complex> padded)
{
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = padded[pg.from_coarse(g.unflatten(i))].real();
    return ScalarField(g, std::move(out));
}

// Largest source-target distance: targets fill the box, sources lie within L/2.
double truncation_radius(const GridSpec& g)
{
    return (std::sqrt(static_cast<double>(g.dim())) + 0.5) * g.half_width() * 1.001;
}

double truncated_green_hat(int dim, double k, double d)
{
    if (dim == 3) {
        if (k == 0.0)
            return -0.5 * d * d;
        const double s = std::sin(0.5 * k * d);
        return -2.0 * s * s / (k * k);
    }
    if (k == 0.0)
        return 0.5 * d * d * std::log(d) - 0.25 * d * d;
    const auto b = bessel_j012(k * d);
    return d * std::log(d) * b.j1 / k + (b.j0 - 1.0) / (k * k);
}

// Fourier multiplier of the kernel on the padded grid, cached per grid and kernel.
using KernelKey = std::tuple<int, int, double, int>;

std::shared_ptr<const std::vector<double>> kernel_multiplier(const GridSpec& g, GreenKernel kernel)
{
    static std::mutex mutex;
    static std::map<KernelKey, std::shared_ptr<const std::vector<double>>> cache;
    const KernelKey key{g.dim(), g.points(), g.half_width(), static_cast<int>(kernel)};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }

    const PaddedGrid pg(g);
    auto out = std::make_shared<std::vector<double>>(pg.size());
    if (kernel == GreenKernel::Truncated) {
        const double d = truncation_radius(g);
        // Radial kernel: tabulate once per integer |n|^2.
        std::vector<double> by_norm;
        std::vector<char> have;
        const double dk = 2.0 * pi / pg.period;
        for_each_padded(pg, [&](std::size_t flat, const std::array<int, 3>& idx) {
            std::size_t n2 = 0;
            for (int k = 0; k < pg.dim; ++k) {
                const auto s = static_cast<std::size_t>(std::abs(pg.signed_index(idx[k])));
                n2 += s * s;
            }
            if (n2 >= by_norm.size()) {
                by_norm.resize(n2 + 1, 0.0);
                have.resize(n2 + 1, 0);
            }
            if (!have[n2]) {
                by_norm[n2] = truncated_green_hat(pg.dim, dk * std::sqrt(static_cast<double>(n2)), d);
                have[n2] = 1;
            }
            (*out)[flat] = by_norm[n2];
        });
    } else {
        const double h = pg.h;
        const double a = 0.5 * h;
        std::vector<Complex> samples(pg.size());
        for_each_padded(pg, [&](std::size_t flat, const std::array<int, 3>& idx) {
            double r2 = 0.0;
            for (int k = 0; k < pg.dim; ++k) {
                const double x = pg.signed_index(idx[k]) * h;
                r2 += x * x;
            }
            double value = 0.0;
            if (pg.dim == 2) {
                value = r2 == 0.0 ? (std::log(a) + 0.5 * std::log(2.0) - 1.5 + 0.25 * pi) / (2.0 * pi)
                                  : std::log(r2) / (4.0 * pi);
            } else {
                value = r2 == 0.0 ? -1.1900386819897766 / (4.0 * pi * a) : -1.0 / (4.0 * pi * std::sqrt(r2));
            }
            samples[flat] = value * std::pow(h, pg.dim);
        });
        fft_forward(samples, pg.dim, pg.n);
        for (std::size_t i = 0; i < samples.size(); ++i)
            (*out)[i] = samples[i].real();
    }

    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.emplace(key, std::move(out));
    return it->second;
}

ScalarField convolve_green(const GridSpec& g, const PaddedGrid& pg, std::vector<Complex> padded_hat, GreenKernel kernel)
{
    const auto mult = kernel_multiplier(g, kernel);
    for (std::size_t i = 0; i < padded_hat.size(); ++i)
        padded_hat[i] *= (*mult)[i];
    fft_inverse(padded_hat, pg.dim, pg.n);
    return restrict_to_grid(g, pg, padded_hat);
}

} // namespace

double support_leakage(const VectorField& v)
{
    const auto& g = v.grid();
    const double limit = 0.5 * g.half_width();
    double inside = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.node(i);
        double r2 = 0.0;
        for (int k = 0; k < g.dim(); ++k)
            r2 += x[k] * x[k];
        double m2 = 0.0;
        for (int k = 0; k < g.dim(); ++k)
            m2 += v[k][i] * v[k][i];
        if (r2 > limit * limit)
            outside = std::max(outside, m2);
        else
            inside = std::max(inside, m2);
    }
    const double scale = std::max(inside, outside);
    return scale == 0.0 ? 0.0 : std::sqrt(outside / scale);
}

ScalarField pressure_source(const VectorField& v)
{
    const auto& g = v.grid();
    ScalarField out(g);
    for (int j = 0; j < g.dim(); ++j)
        for (int k = j; k < g.dim(); ++k) {
            auto t = mixed_derivative(pointwise_product(v[j], v[k]), j, k);
            t *= j == k ? -1.0 : -2.0;
            out += t;
        }
    return out;
}

ScalarField pressure_freespace(const VectorField& v, const PressureOptions& options)
{
    const auto& g = v.grid();
    for (int k = 0; k < g.dim(); ++k)
        require(v[k].all_finite(), ErrorCode::InvalidField, "velocity contains non-finite samples");
    if (options.check_support)
        require(support_leakage(v) <= 1e-12, ErrorCode::NotCompactlySupported,
                "velocity is not supported within radius L/2");

    if (options.kernel == GreenKernel::SampledCellAverage) {
        const PaddedGrid pg(g);
        auto hat = pad(g, pg, pressure_source(v).values());
        fft_forward(hat, pg.dim, pg.n);
        return convolve_green(g, pg, std::move(hat), options.kernel);
    }

    // Laplace(p) = -d_j d_k T_jk  <=>  p_hat = G_hat * k_j k_k T_hat_jk.
    const PaddedGrid pg(g);
    const int nyquist = -pg.n / 2;
    std::vector<Complex> acc(pg.size(), Complex(0.0));
    for (int j = 0; j < g.dim(); ++j)
        for (int k = j; k < g.dim(); ++k) {
            auto t = pad(g, pg, pointwise_product(v[j], v[k]).values());
            fft_forward(t, pg.dim, pg.n);
            const double sym = j == k ? 1.0 : 2.0;
            for_each_padded(pg, [&](std::size_t flat, const std::array<int, 3>& idx) {
                if (j != k && (pg.signed_index(idx[j]) == nyquist || pg.signed_index(idx[k]) == nyquist))
                    return;
                acc[flat] += sym * pg.wavenumber(idx[j]) * pg.wavenumber(idx[k]) * t[flat];
            });
        }
    return convolve_green(g, pg, std::move(acc), options.kernel);
}

ScalarField free_space_poisson(const ScalarField& rhs, GreenKernel kernel)
{
    const auto& g = rhs.grid();
    require(rhs.all_finite(), ErrorCode::InvalidField, "right-hand side contains non-finite samples");
    const PaddedGrid pg(g);
    auto hat = pad(g, pg, rhs.values());
    fft_forward(hat, pg.dim, pg.n);
    return convolve_green(g, pg, std::move(hat), kernel);
}

double weak_form_residual(const VectorField& v, const ScalarField& p, const ScalarField& h)
{
    const auto& g = v.grid();
    require(p.grid() == g && h.grid() == g, ErrorCode::GridCompatibility, "fields live on different grids");
    double s = pointwise_product(p, laplacian(h)).integral();
    for (int j = 0; j < g.dim(); ++j)
        for (int k = j; k < g.dim(); ++k) {
            const double w = j == k ? 1.0 : 2.0;
            s += w * pointwise_product(pointwise_product(v[j], v[k]), mixed_derivative(h, j, k)).integral();
        }
    return s;
}

double weak_form_scale(const VectorField& v, const ScalarField& p, const ScalarField& h)
{
    const auto& g = v.grid();
    double hess = 0.0;
    for (int j = 0; j < g.dim(); ++j)
        for (int k = j; k < g.dim(); ++k)
            hess = std::max(hess, mixed_derivative(h, j, k).max_abs());
    return p.l1_norm() * laplacian(h).max_abs() + v.energy() * hess;
}

// ---------------------------------------------------------------------------

RampFunction::RampFunction(double r1, double r2, double eps) : r1_(r1), r2_(r2), eps_(eps)
{
    require(eps > 0.0 && eps < std::min(r1, 0.5 * (r2 - r1)), ErrorCode::Parameter,
            "ramp needs 0 < eps < min(R1, (R2 - R1) / 2)");
}

double RampFunction::value(double r) const
{
    return mollifier_cdf_integral(r - r1_, eps_) - mollifier_cdf_integral(r - r2_, eps_);
}

double RampFunction::derivative(double r) const
{
    return mollifier_cdf(r - r1_, eps_) - mollifier_cdf(r - r2_, eps_);
}

double RampFunction::second_derivative(double r) const
{
    return mollifier(r - r1_, eps_) - mollifier(r - r2_, eps_);
}

ScalarField ramp_test_function(double r1, double r2, double eps, const GridSpec& grid)
{
    const RampFunction phi(r1, r2, eps);
    return ScalarField::from_function(grid, [&](const Point& x) {
        double r2sum = 0.0;
        for (int k = 0; k < grid.dim(); ++k)
            r2sum += x[k] * x[k];
        return phi.value(std::sqrt(r2sum));
    });
}

} // namespace pvl
