#pragma once

#include <vector>

#include "pvl/grid.hpp"
#include "pvl/meridional.hpp"

namespace pvl {

/// Hyperplane {x : xi . (x - x0) = 0}.
struct PlaneSpec {
    Point xi{1.0, 0.0, 0.0};
    Point x0{0.0, 0.0, 0.0};

    /// Throws Error(Parameter) unless |xi| = 1 within 1e-12.
    void validate(int dim) const;
    /// Signed distance of the plane from the origin.
    [[nodiscard]] double offset(int dim) const;
};

/// An integral over an unbounded set split into the part computed from the
/// grid and a power-law tail estimate for the rest.
struct QuadResult {
    double value = 0.0;
    double in_box = 0.0;
    double tail = 0.0;
    double tail_exponent = 0.0; // 0 when no tail was needed
    bool intersects = true;     // false when a plane misses the box
};

/// Fourier modes of a field grouped by |k|. Integrals of the trigonometric
/// interpolant over origin-centred spheres, balls and shells are sums of
/// closed-form radial kernels over this list.
class RadialSpectrum {
public:
    /// Scalar spectrum of f.
    explicit RadialSpectrum(const ScalarField& f);
    /// Spectrum of (v . x/|x|)^2 as a tensor quantity.
    static RadialSpectrum normal_normal(const VectorField& v);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return kappa_.size(); }

    /// int_{|x| = r} f dsigma.
    [[nodiscard]] double sphere(double r) const;
    /// int_{|x| < r} f dx.
    [[nodiscard]] double ball(double r) const;
    /// int_{r1 < |x| < r2} f / |x| dx.
    [[nodiscard]] double shell_weighted(double r1, double r2) const;

private:
    RadialSpectrum() = default;

    int dim_ = 2;
    bool tensor_ = false;
    std::vector<double> kappa_;
    std::vector<double> trace_; // scalar amplitude, or trace of the tensor amplitude
    std::vector<double> nn_;    // k^T A k / |k|^2 (tensor spectra only)
};

/// Exterior expansion of the 2D free-space pressure of a compactly supported
/// field: p(z) = Re sum_m (m + 1) Q_m / (2 pi z^(m+2)) for |z| beyond the
/// support, with Q_m = int (v1 + i v2)^2 w^m dx.
class PressureMultipole {
public:
    explicit PressureMultipole(const VectorField& v, int order = 64);

    /// Radius of the smallest origin-centred disk holding the support of v.
    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] double value(const Point& x) const;
    /// Decay exponent of the leading non-negligible term (0 for v = 0).
    [[nodiscard]] double leading_exponent() const;
    /// int_{t0}^inf p(x0 + t eta) dt. Throws Error(OutOfDomain) if the ray
    /// comes within radius() of the origin.
    [[nodiscard]] double ray_integral(const Point& x0, const Point& eta, double t0) const;

private:
    double radius_ = 0.0;
    std::vector<Complex> moments_; // Q_m / radius^m
};

/// Quadrature nodes on the sphere |x - center| = R. dim 2: trapezoid with
/// 4 ceil(2 pi R / h) nodes; dim 3: Gauss-Legendre in cos(theta) times a
/// trapezoid in phi.
struct SphereRule {
    double radius = 0.0;
    Point center{0.0, 0.0, 0.0};
    std::vector<Point> nodes;
    std::vector<double> weights;

    static SphereRule make(int dim, double radius, double h, const Point& center = {0.0, 0.0, 0.0});
    [[nodiscard]] double area() const;
};

/// Integral of the trigonometric interpolant of f over a hyperplane: the
/// in-plane segment/disk of radius 0.95 x (largest radius inside the box),
/// plus a power-law tail fitted on the two outer dyadic shells.
QuadResult plane_integral(const ScalarField& f, const PlaneSpec& plane);

/// 2D pressure line integral whose tail comes from the multipole expansion
/// instead of a fit.
QuadResult plane_integral(const ScalarField& p, const PlaneSpec& plane, const PressureMultipole& far);

/// int_{|x - center| = R} f dsigma. Closed form for the origin, node rule
/// otherwise. Throws Error(OutOfDomain) if the sphere leaves the half-box.
double sphere_integral(const ScalarField& f, double radius, const Point& center = {0.0, 0.0, 0.0});

/// Node-rule evaluation through interpolation (independent of RadialSpectrum).
double sphere_integral(const ScalarField& f, const SphereRule& rule);

/// int_{|x| > R} f / |x| dx: closed form up to L/2 plus a tail
/// c r^-(dim+1) matched on the shell [max(L/4, support), L/2], where
/// `support` is the radius beyond which f is expected to follow the model
/// (no tail once it reaches L/2).
QuadResult shell_weighted_integral(const ScalarField& f, double radius);
QuadResult shell_weighted_integral(const RadialSpectrum& spectrum, double radius, double half_width,
                                   double support = 0.0);

/// int f dx over the whole space, with the same tail model.
QuadResult volume_integral(const ScalarField& f);
QuadResult volume_integral(const RadialSpectrum& spectrum, double half_width, double support = 0.0);

enum class MeridionalIntegrand { Pressure, VRhoSquared, Sum };

/// int f(rho, z) dz along a line of fixed rho (one period when periodic),
/// linear in rho between nodes. Non-periodic lines carry a tail estimate.
QuadResult meridional_line_integral(const MeridionalField& mf, MeridionalIntegrand which, double rho);

/// Tail beyond `outer` of an integrand c t^-gamma against the measure t^w dt,
/// given its integrals over [outer/4, outer/2] and [outer/2, outer]. With
/// fit_exponent the exponent comes from the ratio of the two shells and falls
/// back to `exponent` when that ratio is not decaying; otherwise `exponent` is
/// used and c is matched on the outer shell.
struct TailFit {
    double tail = 0.0;
    double exponent = 0.0;
};
TailFit fit_power_tail(double inner_shell, double outer_shell, int weight_power, double exponent, bool fit_exponent);

} // namespace pvl
