#include "pvl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pvl/error.hpp"

namespace pvl {
namespace {

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

void check_same_grid(const GridSpec& a, const GridSpec& b)
{
    require(a == b, ErrorCode::GridCompatibility, "fields live on different grids");
}

std::vector<Complex> to_complex(std::span<const double> x)
{
    std::vector<Complex> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return Complex(v, 0.0); });
    return out;
}

// Multiplies each coefficient by a per-mode factor computed from the signed
// mode indices.
template <class Factor>
ScalarField spectral_multiply(const ScalarField& f, Factor factor)
{
    const auto& g = f.grid();
    auto c = to_complex(f.values());
    fft_forward(c, g.dim(), g.points());
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto idx = g.unflatten(i);
        std::array<int, 3> n{0, 0, 0};
        for (int k = 0; k < g.dim(); ++k)
            n[k] = g.mode_index(idx[k]);
        c[i] *= factor(n);
    }
    fft_inverse(c, g.dim(), g.points());
    std::vector<double> out(c.size());
    std::transform(c.begin(), c.end(), out.begin(), [](const Complex& z) { return z.real(); });
    return ScalarField(g, std::move(out));
}

} // namespace

// ---------------------------------------------------------------------------
// GridSpec

GridSpec::GridSpec(int dim, int points_per_axis, double half_width)
    : dim_(dim), m_(points_per_axis), l_(half_width)
{
    require(dim == 2 || dim == 3, ErrorCode::InvalidField, "grid dimension must be 2 or 3");
    require(is_power_of_two(points_per_axis) && points_per_axis >= 16, ErrorCode::InvalidField,
            "points per axis must be a power of two >= 16, got " + std::to_string(points_per_axis));
    require(std::isfinite(half_width) && half_width > 0.0, ErrorCode::InvalidField,
            "half width must be positive");
}

double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

std::size_t GridSpec::size() const noexcept
{
    std::size_t n = 1;
    for (int k = 0; k < dim_; ++k)
        n *= static_cast<std::size_t>(m_);
    return n;
}

double GridSpec::wavenumber(int n) const noexcept { return std::numbers::pi * n / l_; }

std::array<int, 3> GridSpec::unflatten(std::size_t flat) const noexcept
{
    std::array<int, 3> idx{0, 0, 0};
    for (int k = dim_ - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(flat % m_);
        flat /= m_;
    }
    return idx;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& idx) const noexcept
{
    std::size_t flat = 0;
    for (int k = 0; k < dim_; ++k)
        flat = flat * m_ + static_cast<std::size_t>(idx[k]);
    return flat;
}

Point GridSpec::node(std::size_t flat) const noexcept
{
    auto idx = unflatten(flat);
    Point x{0.0, 0.0, 0.0};
    for (int k = 0; k < dim_; ++k)
        x[k] = coord(idx[k]);
    return x;
}

bool GridSpec::contains(const Point& x) const noexcept
{
    for (int k = 0; k < dim_; ++k)
        if (!(x[k] >= -l_ && x[k] < l_))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(const GridSpec& grid) : grid_(grid), samples_(grid.size(), 0.0) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples))
{
    require(samples_.size() == grid_.size(), ErrorCode::InvalidField,
            "sample count " + std::to_string(samples_.size()) + " does not match grid size " +
                std::to_string(grid_.size()));
    require(all_finite(), ErrorCode::InvalidField, "field contains non-finite samples");
}

ScalarField ScalarField::from_function(const GridSpec& grid, const std::function<double(const Point&)>& f)
{
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = f(grid.node(i));
    return ScalarField(grid, std::move(s));
}

double ScalarField::max_abs() const noexcept
{
    double m = 0.0;
    for (double v : samples_)
        m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::integral() const noexcept
{
    double s = 0.0;
    for (double v : samples_)
        s += v;
    return s * grid_.cell_volume();
}

double ScalarField::l1_norm() const noexcept
{
    double s = 0.0;
    for (double v : samples_)
        s += std::abs(v);
    return s * grid_.cell_volume();
}

bool ScalarField::all_finite() const noexcept
{
    return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other)
{
    check_same_grid(grid_, other.grid_);
    for (std::size_t i = 0; i < samples_.size(); ++i)
        samples_[i] += other.samples_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other)
{
    check_same_grid(grid_, other.grid_);
    for (std::size_t i = 0; i < samples_.size(); ++i)
        samples_[i] -= other.samples_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) noexcept
{
    for (double& v : samples_)
        v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b)
{
    check_same_grid(a.grid(), b.grid());
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = a[i] * b[i];
    return ScalarField(a.grid(), std::move(out));
}

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(const GridSpec& grid) : grid_(grid)
{
    components_.assign(grid.dim(), ScalarField(grid));
}

VectorField::VectorField(const GridSpec& grid, std::vector<ScalarField> components, bool solenoidal)
    : grid_(grid), components_(std::move(components)), solenoidal_(solenoidal)
{
    require(static_cast<int>(components_.size()) == grid.dim(), ErrorCode::Arity,
            "vector field needs exactly dim components");
    for (const auto& c : components_)
        check_same_grid(grid_, c.grid());
}

double VectorField::max_abs() const noexcept
{
    double m = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        double s = 0.0;
        for (const auto& c : components_)
            s += c[i] * c[i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double VectorField::energy() const noexcept { return magnitude_squared().integral(); }

ScalarField VectorField::magnitude_squared() const
{
    std::vector<double> out(grid_.size(), 0.0);
    for (const auto& c : components_)
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += c[i] * c[i];
    return ScalarField(grid_, std::move(out));
}

ScalarField VectorField::normal_component_squared(const Point& xi) const
{
    std::vector<double> out(grid_.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double d = 0.0;
        for (int k = 0; k < grid_.dim(); ++k)
            d += xi[k] * components_[k][i];
        out[i] = d * d;
    }
    return ScalarField(grid_, std::move(out));
}

VectorField& VectorField::operator*=(double s) noexcept
{
    for (auto& c : components_)
        c *= s;
    return *this;
}

// ---------------------------------------------------------------------------
// Spectral operations

std::vector<Complex> fourier_coefficients(const ScalarField& f)
{
    auto c = to_complex(f.values());
    fft_forward(c, f.grid().dim(), f.grid().points());
    const double scale = 1.0 / static_cast<double>(c.size());
    for (auto& z : c)
        z *= scale;
    return c;
}

ScalarField from_fourier_coefficients(const GridSpec& grid, std::vector<Complex> coeffs)
{
    require(coeffs.size() == grid.size(), ErrorCode::InvalidField, "coefficient count mismatch");
    fft_forward(coeffs, grid.dim(), grid.points());
    // A forward transform of conj-symmetric data is the unnormalized inverse up to
    // the sign of the exponent; undo it by reading the reflected index.
    std::vector<double> out(grid.size());
    const int m = grid.points();
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto idx = grid.unflatten(i);
        for (int k = 0; k < grid.dim(); ++k)
            idx[k] = (m - idx[k]) % m;
        out[i] = coeffs[grid.flatten(idx)].real();
    }
    return ScalarField(grid, std::move(out));
}

void for_each_symmetric_mode(const GridSpec& grid, std::span<const Complex> coeffs,
                             const std::function<void(const Point& k, Complex amplitude)>& visit)
{
    const int m = grid.points();
    const int half = m / 2;
    const int dim = grid.dim();
    const int ext = m + 1;
    std::size_t total = 1;
    for (int k = 0; k < dim; ++k)
        total *= static_cast<std::size_t>(ext);

    for (std::size_t e = 0; e < total; ++e) {
        std::size_t rem = e;
        std::array<int, 3> n{0, 0, 0};
        for (int k = dim - 1; k >= 0; --k) {
            n[k] = static_cast<int>(rem % ext) - half;
            rem /= ext;
        }
        double weight = 1.0;
        bool odd = false;
        std::array<int, 3> slot{0, 0, 0};
        Point kvec{0.0, 0.0, 0.0};
        for (int k = 0; k < dim; ++k) {
            if (n[k] == half || n[k] == -half)
                weight *= 0.5;
            slot[k] = (n[k] + m) % m;
            kvec[k] = grid.wavenumber(n[k]);
            odd ^= (n[k] & 1) != 0;
        }
        // exp(i k_n L) = (-1)^n moves the phase reference from x = -L to x = 0.
        const Complex a = coeffs[grid.flatten(slot)] * (odd ? -weight : weight);
        visit(kvec, a);
    }
}

ScalarField partial_derivative(const ScalarField& f, int axis, int order)
{
    const auto& g = f.grid();
    require(axis >= 0 && axis < g.dim(), ErrorCode::UnsupportedOrder, "derivative axis out of range");
    require(order == 1 || order == 2, ErrorCode::UnsupportedOrder,
            "only first and second derivatives are supported");
    const int half = g.points() / 2;
    return spectral_multiply(f, [&](const std::array<int, 3>& n) -> Complex {
        const double k = g.wavenumber(n[axis]);
        if (order == 1)
            return n[axis] == -half ? Complex(0.0) : Complex(0.0, k);
        return Complex(-k * k, 0.0);
    });
}

ScalarField mixed_derivative(const ScalarField& f, int axis_a, int axis_b)
{
    if (axis_a == axis_b)
        return partial_derivative(f, axis_a, 2);
    const auto& g = f.grid();
    require(axis_a >= 0 && axis_a < g.dim() && axis_b >= 0 && axis_b < g.dim(), ErrorCode::UnsupportedOrder,
            "derivative axis out of range");
    const int half = g.points() / 2;
    return spectral_multiply(f, [&](const std::array<int, 3>& n) -> Complex {
        if (n[axis_a] == -half || n[axis_b] == -half)
            return Complex(0.0);
        return Complex(-g.wavenumber(n[axis_a]) * g.wavenumber(n[axis_b]), 0.0);
    });
}

ScalarField laplacian(const ScalarField& f)
{
    const auto& g = f.grid();
    return spectral_multiply(f, [&](const std::array<int, 3>& n) -> Complex {
        double k2 = 0.0;
        for (int k = 0; k < g.dim(); ++k)
            k2 += g.wavenumber(n[k]) * g.wavenumber(n[k]);
        return Complex(-k2, 0.0);
    });
}

ScalarField divergence(const VectorField& v)
{
    const auto& g = v.grid();
    for (int k = 0; k < g.dim(); ++k)
        require(v[k].all_finite(), ErrorCode::InvalidField, "velocity contains non-finite samples");
    ScalarField out(g);
    for (int k = 0; k < g.dim(); ++k)
        out += partial_derivative(v[k], k, 1);
    return out;
}

// ---------------------------------------------------------------------------
// Interpolation

TrigInterpolant::TrigInterpolant(const ScalarField& f) : grid_(f.grid()), ext_(f.grid().points() + 1)
{
    const auto c = fourier_coefficients(f);
    const int m = grid_.points();
    const int half = m / 2;
    const int dim = grid_.dim();
    std::size_t total = 1;
    for (int k = 0; k < dim; ++k)
        total *= static_cast<std::size_t>(ext_);
    coeffs_.resize(total);
    for (std::size_t e = 0; e < total; ++e) {
        std::size_t rem = e;
        std::array<int, 3> slot{0, 0, 0};
        double weight = 1.0;
        for (int k = dim - 1; k >= 0; --k) {
            const int n = static_cast<int>(rem % ext_) - half;
            rem /= ext_;
            if (n == half || n == -half)
                weight *= 0.5;
            slot[k] = (n + m) % m;
        }
        coeffs_[e] = c[grid_.flatten(slot)] * weight;
    }
}

double TrigInterpolant::operator()(const Point& x) const
{
    require(grid_.contains(x), ErrorCode::OutOfDomain, "interpolation point outside the box");
    const int dim = grid_.dim();
    const int half = grid_.points() / 2;
    const double l = grid_.half_width();

    std::array<std::vector<Complex>, 3> phase;
    for (int k = 0; k < dim; ++k) {
        phase[k].resize(ext_);
        const double u = x[k] + l;
        for (int a = 0; a < ext_; ++a)
            phase[k][a] = std::polar(1.0, grid_.wavenumber(a - half) * u);
    }

    if (dim == 2) {
        Complex total(0.0);
        for (int a = 0; a < ext_; ++a) {
            const Complex* row = &coeffs_[static_cast<std::size_t>(a) * ext_];
            Complex inner(0.0);
            for (int b = 0; b < ext_; ++b)
                inner += row[b] * phase[1][b];
            total += inner * phase[0][a];
        }
        return total.real();
    }

    Complex total(0.0);
    for (int a = 0; a < ext_; ++a) {
        Complex mid(0.0);
        for (int b = 0; b < ext_; ++b) {
            const Complex* row = &coeffs_[(static_cast<std::size_t>(a) * ext_ + b) * ext_];
            Complex inner(0.0);
            for (int c = 0; c < ext_; ++c)
                inner += row[c] * phase[2][c];
            mid += inner * phase[1][b];
        }
        total += mid * phase[0][a];
    }
    return total.real();
}

std::vector<double> TrigInterpolant::evaluate(std::span<const Point> points) const
{
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        out[i] = (*this)(points[i]);
    return out;
}

std::vector<double> interpolate(const ScalarField& f, std::span<const Point> points)
{
    return TrigInterpolant(f).evaluate(points);
}

} // namespace pvl
