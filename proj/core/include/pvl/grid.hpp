#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pvl/fft.hpp"

namespace pvl {

using Point = std::array<double, 3>;

/// Uniform Cartesian grid on [-L, L)^dim with M points per axis. The grid is
/// periodic for spectral purposes, but the fields stored on it represent
/// compactly supported functions on the whole space.
class GridSpec {
public:
    GridSpec() = default;

    /// Throws Error(InvalidField) unless dim is 2 or 3, M is a power of two
    /// with M >= 16, and L > 0.
    GridSpec(int dim, int points_per_axis, double half_width);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] int points() const noexcept { return m_; }
    [[nodiscard]] double half_width() const noexcept { return l_; }
    [[nodiscard]] double spacing() const noexcept { return 2.0 * l_ / m_; }
    [[nodiscard]] double cell_volume() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept;

    [[nodiscard]] double coord(int i) const noexcept { return -l_ + i * spacing(); }
    /// Angular wavenumber of signed mode index n.
    [[nodiscard]] double wavenumber(int n) const noexcept;
    /// Signed mode index of FFT slot i (i in [0, M)).
    [[nodiscard]] int mode_index(int i) const noexcept { return i < m_ / 2 ? i : i - m_; }

    [[nodiscard]] std::array<int, 3> unflatten(std::size_t flat) const noexcept;
    [[nodiscard]] std::size_t flatten(const std::array<int, 3>& idx) const noexcept;
    [[nodiscard]] Point node(std::size_t flat) const noexcept;
    [[nodiscard]] bool contains(const Point& x) const noexcept;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int dim_ = 2;
    int m_ = 16;
    double l_ = 1.0;
};

/// Real samples on a GridSpec, row-major with axis 0 slowest.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& grid);
    /// Throws Error(InvalidField) on size mismatch or non-finite samples.
    ScalarField(const GridSpec& grid, std::vector<double> samples);

    static ScalarField from_function(const GridSpec& grid, const std::function<double(const Point&)>& f);

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return samples_; }
    [[nodiscard]] std::span<double> values() noexcept { return samples_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return samples_[i]; }
    [[nodiscard]] double& operator[](std::size_t i) noexcept { return samples_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }

    [[nodiscard]] double max_abs() const noexcept;
    /// Trapezoidal integral h^dim * sum; exact for smooth compactly supported data.
    [[nodiscard]] double integral() const noexcept;
    [[nodiscard]] double l1_norm() const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s) noexcept;

private:
    GridSpec grid_;
    std::vector<double> samples_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);

/// dim components on a shared grid. `solenoidal` records that the constructor
/// guaranteed zero divergence; it is advisory and checked by tests.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const GridSpec& grid);
    VectorField(const GridSpec& grid, std::vector<ScalarField> components, bool solenoidal = false);

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] int dim() const noexcept { return grid_.dim(); }
    [[nodiscard]] const ScalarField& operator[](int k) const { return components_.at(k); }
    [[nodiscard]] ScalarField& operator[](int k) { return components_.at(k); }
    [[nodiscard]] bool solenoidal() const noexcept { return solenoidal_; }
    void set_solenoidal(bool flag) noexcept { solenoidal_ = flag; }

    [[nodiscard]] double max_abs() const noexcept;
    /// Integral of |v|^2.
    [[nodiscard]] double energy() const noexcept;
    [[nodiscard]] ScalarField magnitude_squared() const;
    /// Pointwise (v . xi)^2 for a fixed direction.
    [[nodiscard]] ScalarField normal_component_squared(const Point& xi) const;

    VectorField& operator*=(double s) noexcept;

private:
    GridSpec grid_;
    std::vector<ScalarField> components_;
    bool solenoidal_ = false;
};

/// Fourier coefficients c with f(x) = sum_n c_n exp(i k_n . (x + L)), in FFT order.
std::vector<Complex> fourier_coefficients(const ScalarField& f);
ScalarField from_fourier_coefficients(const GridSpec& grid, std::vector<Complex> coeffs);

/// Visits the symmetric mode set n in [-M/2, M/2]^dim. The Nyquist
/// coefficient is split evenly between +M/2 and -M/2 so the represented
/// trigonometric interpolant is real. `amplitude` is already phase-shifted so
/// that f(x) = sum amplitude * exp(i k . x).
void for_each_symmetric_mode(const GridSpec& grid, std::span<const Complex> coeffs,
                             const std::function<void(const Point& k, Complex amplitude)>& visit);

/// Spectral derivative of order 1 or 2 along axis (0-based).
ScalarField partial_derivative(const ScalarField& f, int axis, int order);
ScalarField mixed_derivative(const ScalarField& f, int axis_a, int axis_b);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const VectorField& v);

/// Trigonometric interpolant of a sampled field. Evaluation is a direct
/// separable summation over all modes: O(M^dim) per point, exact on nodes.
class TrigInterpolant {
public:
    explicit TrigInterpolant(const ScalarField& f);

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    /// Throws Error(OutOfDomain) for points outside [-L, L)^dim.
    [[nodiscard]] double operator()(const Point& x) const;
    [[nodiscard]] std::vector<double> evaluate(std::span<const Point> points) const;

private:
    GridSpec grid_;
    int ext_ = 0; // M + 1
    std::vector<Complex> coeffs_; // (M+1)^dim, Nyquist halves folded in
};

std::vector<double> interpolate(const ScalarField& f, std::span<const Point> points);

} // namespace pvl
