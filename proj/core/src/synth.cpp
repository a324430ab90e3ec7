#include "pvl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pvl/error.hpp"

namespace pvl {
namespace {

struct SignedPermutation {
    std::array<int, 3> target{0, 1, 2}; // R e_j = sign[j] * e_{target[j]}
    std::array<int, 3> sign{1, 1, 1};
};

std::vector<SignedPermutation> proper_axis_rotations(int dim)
{
    std::vector<SignedPermutation> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
        if (dim == 2 && perm[2] != 2)
            continue;
        int inversions = 0;
        for (int a = 0; a < dim; ++a)
            for (int b = a + 1; b < dim; ++b)
                inversions += perm[a] > perm[b];
        const int perm_sign = inversions % 2 == 0 ? 1 : -1;
        for (int mask = 0; mask < (1 << dim); ++mask) {
            SignedPermutation r;
            int det = perm_sign;
            for (int j = 0; j < dim; ++j) {
                r.target[j] = perm[j];
                r.sign[j] = (mask >> j) & 1 ? -1 : 1;
                det *= r.sign[j];
            }
            if (det == 1)
                out.push_back(r);
        }
    } while (std::next_permutation(perm.begin(), perm.begin() + dim));
    return out;
}

void check_margin(const BumpSpec& spec, const GridSpec& grid)
{
    require(spec.radius > 0.0, ErrorCode::Parameter, "bump radius must be positive");
    const double limit = 0.5 * grid.half_width();
    for (int k = 0; k < grid.dim(); ++k)
        require(std::abs(spec.center[k]) + spec.radius <= limit, ErrorCode::Margin,
                "bump support leaves the half-box [-L/2, L/2]^dim");
}

} // namespace

double bump_value(const BumpSpec& spec, const Point& x, int dim)
{
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double d = x[k] - spec.center[k];
        r2 += d * d;
    }
    const double u = r2 / (spec.radius * spec.radius);
    if (u >= 1.0)
        return 0.0;
    return spec.amplitude * std::exp(1.0 / (u - 1.0));
}

ScalarField bump(const BumpSpec& spec, const GridSpec& grid)
{
    check_margin(spec, grid);
    return ScalarField::from_function(grid, [&](const Point& x) { return bump_value(spec, x, grid.dim()); });
}

ScalarField bump_sum(std::span<const BumpSpec> specs, const GridSpec& grid)
{
    ScalarField out(grid);
    for (const auto& s : specs)
        out += bump(s, grid);
    return out;
}

// ---------------------------------------------------------------------------

RadialProfile::RadialProfile(std::function<double(double)> f, double support, int panels, int order)
    : f_(std::move(f)), support_(support)
{
    require(support > 0.0, ErrorCode::Parameter, "radial profile support must be positive");
    rule_ = composite_gauss_legendre(0.0, support, panels, order);
    values_.resize(rule_.nodes.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
        values_[i] = f_(rule_.nodes[i]);
}

double RadialProfile::integrate(const std::function<double(double r, double f)>& g) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        s += rule_.weights[i] * g(rule_.nodes[i], values_[i]);
    return s;
}

RadialProfile default_vortex_profile(double a, double amplitude)
{
    return RadialProfile(
        [a, amplitude](double r) {
            const double u = r * r / (a * a);
            return u >= 1.0 ? 0.0 : amplitude * r * std::exp(1.0 / (u - 1.0));
        },
        a);
}

RadialVortex radial_vortex_2d(const RadialProfile& f, const GridSpec& grid)
{
    require(grid.dim() == 2, ErrorCode::InvalidField, "radial vortex is two-dimensional");
    require(f(0.0) == 0.0, ErrorCode::SingularAxis, "vortex profile must vanish on the axis");
    const double a = f.support();
    require(a <= 0.5 * grid.half_width(), ErrorCode::Margin, "vortex support exceeds L/2");

    auto pressure_at = [f, a](double r) {
        if (r >= a)
            return 0.0;
        return -integrate(
            [&f](double s) {
                const double v = f(s);
                return v * v / s;
            },
            r, a, 32, 16);
    };
    RadialProfile p_profile(pressure_at, a);

    std::vector<double> vx(grid.size(), 0.0), vy(grid.size(), 0.0), p(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.node(i);
        const double r = std::hypot(x[0], x[1]);
        if (r >= a)
            continue;
        p[i] = p_profile(r);
        if (r == 0.0)
            continue;
        const double fr = f(r);
        vx[i] = -fr * x[1] / r;
        vy[i] = fr * x[0] / r;
    }
    std::vector<ScalarField> comps;
    comps.emplace_back(grid, std::move(vx));
    comps.emplace_back(grid, std::move(vy));
    return RadialVortex{VectorField(grid, std::move(comps), true), ScalarField(grid, std::move(p)),
                        std::move(p_profile)};
}

// ---------------------------------------------------------------------------

VectorField curl_potential(std::span<const ScalarField> potential, const GridSpec& grid)
{
    if (grid.dim() == 2) {
        require(potential.size() == 1, ErrorCode::Arity, "2D curl needs one scalar potential");
        const auto& psi = potential[0];
        require(psi.grid() == grid, ErrorCode::GridCompatibility, "potential lives on another grid");
        std::vector<ScalarField> comps;
        comps.push_back(partial_derivative(psi, 1, 1));
        comps.push_back(-1.0 * partial_derivative(psi, 0, 1));
        return VectorField(grid, std::move(comps), true);
    }
    require(potential.size() == 3, ErrorCode::Arity, "3D curl needs a three-component potential");
    for (const auto& a : potential)
        require(a.grid() == grid, ErrorCode::GridCompatibility, "potential lives on another grid");
    std::vector<ScalarField> comps;
    comps.push_back(partial_derivative(potential[2], 1, 1) - partial_derivative(potential[1], 2, 1));
    comps.push_back(partial_derivative(potential[0], 2, 1) - partial_derivative(potential[2], 0, 1));
    comps.push_back(partial_derivative(potential[1], 0, 1) - partial_derivative(potential[0], 1, 1));
    return VectorField(grid, std::move(comps), true);
}

VectorField symmetrize(const VectorField& v)
{
    const auto& g = v.grid();
    const int m = g.points();
    require(m % 4 == 0, ErrorCode::GridCompatibility, "symmetrize needs M divisible by 4");
    const int dim = g.dim();
    const auto group = proper_axis_rotations(dim);

    std::vector<std::vector<double>> out(dim, std::vector<double>(g.size(), 0.0));
    for (const auto& r : group) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto idx = g.unflatten(i);
            // Source point R^T x: coordinate j is sign[j] * x_{target[j]}.
            std::array<int, 3> src{0, 0, 0};
            for (int j = 0; j < dim; ++j) {
                const int t = idx[r.target[j]];
                src[j] = r.sign[j] > 0 ? t : (m - t) % m;
            }
            const std::size_t s = g.flatten(src);
            for (int j = 0; j < dim; ++j)
                out[r.target[j]][i] += r.sign[j] * v[j][s];
        }
    }
    const double inv = 1.0 / static_cast<double>(group.size());
    std::vector<ScalarField> comps;
    for (int j = 0; j < dim; ++j) {
        for (double& x : out[j])
            x *= inv;
        comps.emplace_back(g, std::move(out[j]));
    }
    return VectorField(g, std::move(comps), v.solenoidal());
}

double SecondMomentMatrix::trace() const noexcept
{
    double t = 0.0;
    for (int j = 0; j < dim_; ++j)
        t += (*this)(j, j);
    return t;
}

double SecondMomentMatrix::deviation() const noexcept
{
    const double mean = trace() / dim_;
    double s = 0.0;
    for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
            const double d = (*this)(j, k) - (j == k ? mean : 0.0);
            s += d * d;
        }
    return std::sqrt(s);
}

double SecondMomentMatrix::anisotropy() const noexcept
{
    const double t = trace();
    return t > 0.0 ? deviation() / t : 0.0;
}

SecondMomentMatrix second_moments(const VectorField& v)
{
    const auto& g = v.grid();
    std::array<double, 9> m{};
    for (int j = 0; j < g.dim(); ++j)
        for (int k = j; k < g.dim(); ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                s += v[j][i] * v[k][i];
            m[3 * j + k] = m[3 * k + j] = s * g.cell_volume();
        }
    return SecondMomentMatrix(g.dim(), m);
}

// ---------------------------------------------------------------------------

std::uint64_t SplitMix64::next() noexcept
{
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<std::vector<BumpSpec>> random_potential_bumps(const GridSpec& grid, const GenericFieldSpec& spec)
{
    require(spec.bumps >= 1, ErrorCode::Parameter, "need at least one bump");
    require(spec.support_fraction > 0.0 && spec.support_fraction <= 0.5, ErrorCode::Margin,
            "support fraction must lie in (0, 0.5]");
    const int dim = grid.dim();
    const double support = spec.support_fraction * grid.half_width();
    SplitMix64 rng(spec.seed);
    const int components = dim == 2 ? 1 : 3;
    std::vector<std::vector<BumpSpec>> out(components);
    for (auto& bumps : out) {
        for (int b = 0; b < spec.bumps; ++b) {
            BumpSpec s;
            s.radius = support * rng.uniform(0.4, 0.6);
            const double reach = support - s.radius;
            // Uniform direction, radius in [0, reach].
            Point dir{0.0, 0.0, 0.0};
            double norm = 0.0;
            do {
                norm = 0.0;
                for (int k = 0; k < dim; ++k) {
                    dir[k] = rng.uniform(-1.0, 1.0);
                    norm += dir[k] * dir[k];
                }
            } while (norm > 1.0 || norm < 1e-6);
            const double rad = reach * rng.uniform() / std::sqrt(norm);
            for (int k = 0; k < dim; ++k)
                s.center[k] = dir[k] * rad;
            s.amplitude = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.0);
            check_margin(s, grid);
            bumps.push_back(s);
        }
    }
    return out;
}

std::vector<ScalarField> random_potential(const GridSpec& grid, const GenericFieldSpec& spec)
{
    std::vector<ScalarField> out;
    for (const auto& bumps : random_potential_bumps(grid, spec))
        out.push_back(bump_sum(bumps, grid));
    return out;
}

VectorField curl_of_bumps(const GridSpec& grid, std::span<const std::vector<BumpSpec>> potential)
{
    const int dim = grid.dim();
    const std::size_t arity = dim == 2 ? 1 : 3;
    require(potential.size() == arity, ErrorCode::Arity, "wrong number of potential components");
    for (const auto& comp : potential)
        for (const auto& b : comp)
            check_margin(b, grid);

    std::vector<std::vector<double>> v(dim, std::vector<double>(grid.size(), 0.0));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.node(i);
        // grad[c][k] = d_k of potential component c.
        std::array<std::array<double, 3>, 3> grad{};
        for (std::size_t c = 0; c < arity; ++c)
            for (const auto& b : potential[c]) {
                const double value = bump_value(b, x, dim);
                if (value == 0.0)
                    continue;
                double r2 = 0.0;
                for (int k = 0; k < dim; ++k)
                    r2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
                const double a2 = b.radius * b.radius;
                const double u = r2 / a2;
                const double du = -value / ((u - 1.0) * (u - 1.0));
                for (int k = 0; k < dim; ++k)
                    grad[c][k] += du * 2.0 * (x[k] - b.center[k]) / a2;
            }
        if (dim == 2) {
            v[0][i] = grad[0][1];
            v[1][i] = -grad[0][0];
        } else {
            v[0][i] = grad[2][1] - grad[1][2];
            v[1][i] = grad[0][2] - grad[2][0];
            v[2][i] = grad[1][0] - grad[0][1];
        }
    }
    std::vector<ScalarField> comps;
    for (int k = 0; k < dim; ++k)
        comps.emplace_back(grid, std::move(v[k]));
    return VectorField(grid, std::move(comps), true);
}

VectorField generic_field(const GridSpec& grid, const GenericFieldSpec& spec)
{
    return curl_of_bumps(grid, random_potential_bumps(grid, spec));
}

VectorField anisotropic_control(const GridSpec& grid, double support_fraction)
{
    const double support = support_fraction * grid.half_width();
    const double a = 0.75 * support;
    const BumpSpec left{{-0.25 * support, 0.0, 0.0}, a, 1.0};
    const BumpSpec right{{0.25 * support, 0.0, 0.0}, a, -1.0};
    std::vector<std::vector<BumpSpec>> potential(grid.dim() == 2 ? 1 : 3);
    potential.back() = {left, right};
    return curl_of_bumps(grid, potential);
}

VectorField axisymmetric_field_3d(const GridSpec& grid, std::span<const MeridionalBump> bumps)
{
    require(grid.dim() == 3, ErrorCode::InvalidField, "axisymmetric embedding needs a 3D grid");
    for (const auto& b : bumps) {
        require(b.rho_center - b.radius > 0.0, ErrorCode::AxisRegularity, "stream function support touches the axis");
        require(std::hypot(b.rho_center + b.radius, std::abs(b.z_center) + b.radius) <= 0.5 * grid.half_width(),
                ErrorCode::Margin, "axisymmetric support exceeds L/2");
    }
    std::vector<double> vx(grid.size(), 0.0), vy(grid.size(), 0.0), vz(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.node(i);
        const double rho = std::hypot(x[0], x[1]);
        if (rho == 0.0)
            continue;
        double psi_r = 0.0, psi_z = 0.0;
        for (const auto& b : bumps) {
            const double dr = rho - b.rho_center;
            const double dz = x[2] - b.z_center;
            const double u = (dr * dr + dz * dz) / (b.radius * b.radius);
            if (u >= 1.0)
                continue;
            const double phi = b.amplitude * std::exp(1.0 / (u - 1.0));
            const double phi_u = -phi / ((u - 1.0) * (u - 1.0));
            psi_r += phi_u * 2.0 * dr / (b.radius * b.radius);
            psi_z += phi_u * 2.0 * dz / (b.radius * b.radius);
        }
        const double v_rho = -psi_z / rho;
        vx[i] = v_rho * x[0] / rho;
        vy[i] = v_rho * x[1] / rho;
        vz[i] = psi_r / rho;
    }
    std::vector<ScalarField> comps;
    comps.emplace_back(grid, std::move(vx));
    comps.emplace_back(grid, std::move(vy));
    comps.emplace_back(grid, std::move(vz));
    return VectorField(grid, std::move(comps), true);
}

} // namespace pvl
