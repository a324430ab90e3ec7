#include "pvl/meridional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pvl/error.hpp"
#include "pvl/fft.hpp"

namespace pvl {
namespace {

double max_abs(std::span<const double> x)
{
    double m = 0.0;
    for (double v : x)
        m = std::max(m, std::abs(v));
    return m;
}

// rho-weights of the finite-volume operator in units of h^m. Face weights sit
// at half-integer nodes so the axis never enters a denominator.
struct RhoWeights {
    std::vector<double> face; // face[i] = (i + 1/2)^m, flux between i and i+1
    std::vector<double> volume; // cell integral of rho^m over [i-1/2, i+1/2] clipped at 0

    RhoWeights(int n_rho, int m)
    {
        face.resize(n_rho);
        volume.resize(n_rho);
        for (int i = 0; i < n_rho; ++i) {
            face[i] = std::pow(i + 0.5, m);
            const double lo = std::max(i - 0.5, 0.0);
            volume[i] = (std::pow(i + 0.5, m + 1) - std::pow(lo, m + 1)) / (m + 1);
        }
    }

    [[nodiscard]] double lower_face(int i) const { return i == 0 ? 0.0 : face[i - 1]; }
};

int wrap(int j, int n) { return (j % n + n) % n; }

// Thomas algorithm for a real tridiagonal matrix and a (possibly complex) rhs.
template <class T>
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag, std::span<const double> sup,
                       std::span<T> rhs)
{
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double beta = diag[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i - 1];
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] -= c[i] * rhs[i + 1];
}

std::vector<double> solve_once(int m, const MeridionalGrid& g, std::span<const double> rhs)
{
    const int nr = g.n_rho - 1; // unknown rows, rho = P is Dirichlet
    const double hr = g.h_rho();
    const double hz = g.h_z();
    const RhoWeights w(g.n_rho, m);
    std::vector<double> out(g.size(), 0.0);

    std::vector<double> sub(nr), diag(nr), sup(nr);
    auto assemble = [&](double lambda) {
        for (int i = 0; i < nr; ++i) {
            const double lo = w.lower_face(i) / (hr * hr);
            const double hi = w.face[i] / (hr * hr);
            sub[i] = -lo;
            sup[i] = -hi;
            diag[i] = lo + hi + w.volume[i] * lambda;
        }
    };

    if (g.periodic_z) {
        const int n = g.n_z;
        std::vector<Complex> modes(static_cast<std::size_t>(nr) * n);
        std::vector<Complex> row(n);
        for (int i = 0; i < nr; ++i) {
            for (int j = 0; j < n; ++j)
                row[j] = Complex(rhs[g.index(i, j)], 0.0);
            fft_forward(row, 1, n);
            for (int q = 0; q < n; ++q)
                modes[static_cast<std::size_t>(q) * nr + i] = row[q];
        }
        std::vector<Complex> col(nr);
        for (int q = 0; q < n; ++q) {
            const double lambda = 2.0 / (hz * hz) * (1.0 - std::cos(2.0 * std::numbers::pi * q / n));
            assemble(lambda);
            for (int i = 0; i < nr; ++i)
                col[i] = -w.volume[i] * modes[static_cast<std::size_t>(q) * nr + i];
            solve_tridiagonal<Complex>(sub, diag, sup, col);
            for (int i = 0; i < nr; ++i)
                modes[static_cast<std::size_t>(q) * nr + i] = col[i];
        }
        for (int i = 0; i < nr; ++i) {
            for (int q = 0; q < n; ++q)
                row[q] = modes[static_cast<std::size_t>(q) * nr + i];
            fft_inverse(row, 1, n);
            for (int j = 0; j < n; ++j)
                out[g.index(i, j)] = row[j].real();
        }
        return out;
    }

    const int n = g.n_z - 2; // interior z nodes
    std::vector<double> buf(static_cast<std::size_t>(nr) * n);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < n; ++j)
            buf[static_cast<std::size_t>(i) * n + j] = rhs[g.index(i, j + 1)];
    dst1_rows(buf, nr, n);

    std::vector<double> col(nr);
    for (int q = 0; q < n; ++q) {
        const double lambda = 2.0 / (hz * hz) * (1.0 - std::cos(std::numbers::pi * (q + 1) / (n + 1)));
        assemble(lambda);
        for (int i = 0; i < nr; ++i)
            col[i] = -w.volume[i] * buf[static_cast<std::size_t>(i) * n + q];
        solve_tridiagonal<double>(sub, diag, sup, col);
        for (int i = 0; i < nr; ++i)
            buf[static_cast<std::size_t>(i) * n + q] = col[i];
    }
    dst1_rows(buf, nr, n);
    const double scale = 1.0 / (2.0 * (n + 1));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < n; ++j)
            out[g.index(i, j + 1)] = buf[static_cast<std::size_t>(i) * n + j] * scale;
    return out;
}

// Unknown nodes of the Poisson problem: rho < P and, if not periodic, |z| < Z.
bool is_unknown(const MeridionalGrid& g, int i, int j)
{
    if (i >= g.n_rho - 1)
        return false;
    return g.periodic_z || (j > 0 && j < g.n_z - 1);
}

// Centred difference along z, zero on non-periodic boundary rows.
double dz(const MeridionalGrid& g, std::span<const double> f, int i, int j)
{
    if (g.periodic_z)
        return (f[g.index(i, wrap(j + 1, g.n_z))] - f[g.index(i, wrap(j - 1, g.n_z))]) / (2.0 * g.h_z());
    if (j == 0 || j == g.n_z - 1)
        return 0.0;
    return (f[g.index(i, j + 1)] - f[g.index(i, j - 1)]) / (2.0 * g.h_z());
}

// rho^{-m} D_rho(rho^m f) with centred differences; zero on the axis and at rho = P.
double weighted_drho(const MeridionalGrid& g, int m, std::span<const double> f, int i, int j)
{
    if (i == 0 || i == g.n_rho - 1)
        return 0.0;
    const double hr = g.h_rho();
    const double rp = std::pow(g.rho(i + 1), m);
    const double rm = std::pow(g.rho(i - 1), m);
    const double r0 = std::pow(g.rho(i), m);
    return (rp * f[g.index(i + 1, j)] - rm * f[g.index(i - 1, j)]) / (2.0 * hr * r0);
}

double bump_value(const MeridionalBump& b, double rho, double z, double* d_rho, double* d_z)
{
    const double dr = rho - b.rho_center;
    const double dzv = z - b.z_center;
    const double u = (dr * dr + dzv * dzv) / (b.radius * b.radius);
    if (u >= 1.0) {
        *d_rho = 0.0;
        *d_z = 0.0;
        return 0.0;
    }
    const double phi = b.amplitude * std::exp(1.0 / (u - 1.0));
    const double phi_u = -phi / ((u - 1.0) * (u - 1.0));
    *d_rho = phi_u * 2.0 * dr / (b.radius * b.radius);
    *d_z = phi_u * 2.0 * dzv / (b.radius * b.radius);
    return phi;
}

} // namespace

void MeridionalGrid::validate() const
{
    require(n_rho >= 8 && n_z >= 8, ErrorCode::InvalidField, "meridional grid needs at least 8 nodes per axis");
    require(rho_max > 0.0 && z_half > 0.0 && std::isfinite(rho_max) && std::isfinite(z_half),
            ErrorCode::InvalidField, "meridional extents must be positive");
}

void MeridionalField::validate() const
{
    require(ambient_dim >= 3, ErrorCode::InvalidField, "meridional reduction needs N >= 3");
    grid.validate();
    require(v_rho.size() == grid.size() && v_z.size() == grid.size(), ErrorCode::InvalidField,
            "meridional velocity arrays do not match the grid");
    require(p.empty() || p.size() == grid.size(), ErrorCode::InvalidField, "meridional pressure array size mismatch");
    auto finite = [](const std::vector<double>& a) {
        return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
    };
    require(finite(v_rho) && finite(v_z) && finite(p), ErrorCode::InvalidField, "meridional field is not finite");
    const double scale = std::max(max_abs(v_rho), max_abs(v_z));
    for (int j = 0; j < grid.n_z; ++j)
        require(std::abs(v_rho[grid.index(0, j)]) <= 1e-12 * scale, ErrorCode::Axis,
                "v_rho must vanish on the axis row");
}

MeridionalField meridional_streamfunction(int ambient_dim, const MeridionalGrid& grid, std::span<const double> psi)
{
    require(ambient_dim >= 3, ErrorCode::InvalidField, "meridional reduction needs N >= 3");
    grid.validate();
    require(psi.size() == grid.size(), ErrorCode::InvalidField, "stream function size mismatch");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < grid.n_z; ++j)
            require(psi[grid.index(i, j)] == 0.0, ErrorCode::AxisRegularity,
                    "stream function support touches the axis");

    const int m = ambient_dim - 2;
    MeridionalField mf;
    mf.ambient_dim = ambient_dim;
    mf.grid = grid;
    mf.v_rho.assign(grid.size(), 0.0);
    mf.v_z.assign(grid.size(), 0.0);
    const double hr = grid.h_rho();
    for (int i = 1; i < grid.n_rho - 1; ++i) {
        const double inv = std::pow(grid.rho(i), -m);
        for (int j = 0; j < grid.n_z; ++j) {
            mf.v_rho[grid.index(i, j)] = -inv * dz(grid, psi, i, j);
            mf.v_z[grid.index(i, j)] = inv * (psi[grid.index(i + 1, j)] - psi[grid.index(i - 1, j)]) / (2.0 * hr);
        }
    }
    return mf;
}

std::vector<double> sample_meridional_bumps(const MeridionalGrid& grid, std::span<const MeridionalBump> bumps)
{
    std::vector<double> psi(grid.size(), 0.0);
    for (int i = 0; i < grid.n_rho; ++i)
        for (int j = 0; j < grid.n_z; ++j) {
            double s = 0.0;
            for (const auto& b : bumps) {
                double dr, dzv;
                s += bump_value(b, grid.rho(i), grid.z(j), &dr, &dzv);
            }
            psi[grid.index(i, j)] = s;
        }
    return psi;
}

MeridionalField meridional_from_bumps(int ambient_dim, const MeridionalGrid& grid,
                                      std::span<const MeridionalBump> bumps)
{
    require(ambient_dim >= 3, ErrorCode::InvalidField, "meridional reduction needs N >= 3");
    grid.validate();
    const double h = grid.h_rho();
    for (const auto& b : bumps) {
        require(b.radius > 0.0, ErrorCode::Parameter, "bump radius must be positive");
        require(b.rho_center - b.radius >= 2.0 * h, ErrorCode::AxisRegularity,
                "stream function support touches the axis");
        require(b.rho_center + b.radius < grid.rho_max, ErrorCode::Margin, "bump leaves the meridional domain");
        if (!grid.periodic_z)
            require(std::abs(b.z_center) + b.radius < grid.z_half, ErrorCode::Margin,
                    "bump leaves the meridional domain");
    }

    const int m = ambient_dim - 2;
    MeridionalField mf;
    mf.ambient_dim = ambient_dim;
    mf.grid = grid;
    mf.v_rho.assign(grid.size(), 0.0);
    mf.v_z.assign(grid.size(), 0.0);
    for (int i = 1; i < grid.n_rho; ++i) {
        const double inv = std::pow(grid.rho(i), -m);
        for (int j = 0; j < grid.n_z; ++j) {
            double psi_r = 0.0, psi_z = 0.0;
            for (const auto& b : bumps) {
                // Periodic images: only the nearest copy can overlap a bump of
                // radius below half the period.
                double z = grid.z(j);
                if (grid.periodic_z)
                    z = b.z_center + std::remainder(z - b.z_center, grid.period());
                double dr, dzv;
                bump_value(b, grid.rho(i), z, &dr, &dzv);
                psi_r += dr;
                psi_z += dzv;
            }
            mf.v_rho[grid.index(i, j)] = -inv * psi_z;
            mf.v_z[grid.index(i, j)] = inv * psi_r;
        }
    }
    return mf;
}

std::vector<double> meridional_divergence(const MeridionalField& mf)
{
    const auto& g = mf.grid;
    const int m = mf.weight_exponent();
    std::vector<double> div(g.size(), 0.0);
    for (int i = 1; i < g.n_rho - 1; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            if (!g.periodic_z && (j == 0 || j == g.n_z - 1))
                continue;
            div[g.index(i, j)] = weighted_drho(g, m, mf.v_rho, i, j) + dz(g, mf.v_z, i, j);
        }
    return div;
}

std::vector<double> apply_meridional_laplacian(int ambient_dim, const MeridionalGrid& g, std::span<const double> p)
{
    const int m = ambient_dim - 2;
    const RhoWeights w(g.n_rho, m);
    const double hr = g.h_rho();
    const double hz = g.h_z();
    std::vector<double> out(g.size(), 0.0);
    for (int i = 0; i < g.n_rho - 1; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            if (!is_unknown(g, i, j))
                continue;
            const double c = p[g.index(i, j)];
            const double up = p[g.index(i + 1, j)];
            const double down = i > 0 ? p[g.index(i - 1, j)] : 0.0;
            const double radial = (w.face[i] * (up - c) - w.lower_face(i) * (c - down)) / (hr * hr * w.volume[i]);
            double zp, zm;
            if (g.periodic_z) {
                zp = p[g.index(i, wrap(j + 1, g.n_z))];
                zm = p[g.index(i, wrap(j - 1, g.n_z))];
            } else {
                zp = p[g.index(i, j + 1)];
                zm = p[g.index(i, j - 1)];
            }
            out[g.index(i, j)] = radial + (zp - 2.0 * c + zm) / (hz * hz);
        }
    return out;
}

std::vector<double> solve_meridional_poisson(int ambient_dim, const MeridionalGrid& grid,
                                             std::span<const double> rhs, double tolerance,
                                             MeridionalSolveInfo* info)
{
    require(ambient_dim >= 3, ErrorCode::InvalidField, "meridional reduction needs N >= 3");
    grid.validate();
    require(rhs.size() == grid.size(), ErrorCode::InvalidField, "rhs size mismatch");
    const int m = ambient_dim - 2;

    std::vector<double> f(rhs.begin(), rhs.end());
    for (int i = 0; i < grid.n_rho; ++i)
        for (int j = 0; j < grid.n_z; ++j)
            if (!is_unknown(grid, i, j))
                f[grid.index(i, j)] = 0.0;
    const double fscale = max_abs(f);
    std::vector<double> p(grid.size(), 0.0);
    if (fscale == 0.0)
        return p;

    MeridionalSolveInfo local;
    auto& history = info ? info->residual_history : local.residual_history;
    history.clear();
    std::vector<double> residual = f;
    constexpr int max_passes = 4;
    for (int pass = 0; pass < max_passes; ++pass) {
        auto correction = solve_once(m, grid, residual);
        for (std::size_t k = 0; k < p.size(); ++k)
            p[k] += correction[k];
        auto lp = apply_meridional_laplacian(ambient_dim, grid, p);
        for (std::size_t k = 0; k < p.size(); ++k)
            residual[k] = f[k] - lp[k];
        const double rel = max_abs(residual) / fscale;
        history.push_back(rel);
        if (rel <= tolerance)
            return p;
    }
    std::string msg = "meridional Poisson solve did not reach relative residual " + std::to_string(tolerance) +
                      "; history:";
    for (double r : history)
        msg += " " + std::to_string(r);
    fail(ErrorCode::SolverFailure, msg);
}

std::vector<double> meridional_pressure_source(const MeridionalField& mf)
{
    const auto& g = mf.grid;
    const int m = mf.weight_exponent();
    const std::size_t n = g.size();
    std::vector<double> trr(n), trz(n), tzz(n);
    for (std::size_t k = 0; k < n; ++k) {
        trr[k] = mf.v_rho[k] * mf.v_rho[k];
        trz[k] = mf.v_rho[k] * mf.v_z[k];
        tzz[k] = mf.v_z[k] * mf.v_z[k];
    }
    std::vector<double> g_rho(n, 0.0), g_z(n, 0.0);
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            g_rho[g.index(i, j)] = weighted_drho(g, m, trr, i, j) + dz(g, trz, i, j);
            g_z[g.index(i, j)] = weighted_drho(g, m, trz, i, j) + dz(g, tzz, i, j);
        }
    std::vector<double> rhs(n, 0.0);
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_z; ++j)
            rhs[g.index(i, j)] = -(weighted_drho(g, m, g_rho, i, j) + dz(g, g_z, i, j));
    return rhs;
}

MeridionalField pressure_meridional(MeridionalField mf, double tolerance, MeridionalSolveInfo* info)
{
    mf.p.clear();
    mf.validate();
    const auto rhs = meridional_pressure_source(mf);
    mf.p = solve_meridional_poisson(mf.ambient_dim, mf.grid, rhs, tolerance, info);
    return mf;
}

} // namespace pvl
