#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pvl/grid.hpp"
#include "pvl/identities.hpp"

namespace pvl {

inline constexpr double kCfl = 0.5;

/// 2D vorticity on the periodic box [-L, L)^2. Modes beyond 2/3 of Nyquist
/// are zero and the mean vanishes.
struct EvolveState {
    GridSpec grid;
    ScalarField vorticity;
    double time = 0.0;
    double viscosity = 0.0;
};

/// Spectral curl of v, dealiased, with the mean removed.
EvolveState make_state(const VectorField& v, double viscosity, double time = 0.0);

/// v = (sin x cos y, -cos x sin y) on the 2 pi torus (L = pi).
EvolveState taylor_green_state(int points, double viscosity);
/// Exact Taylor-Green velocity at time t: the initial field times exp(-2 nu t).
VectorField taylor_green_velocity(const GridSpec& grid, double viscosity, double time);

/// Gaussian blobs exp(-|x - c|^2 / sigma^2): amplitude -4 at the origin and +1
/// at (+-d, 0), (0, +-d). Zero circulation and invariant under quarter turns.
struct BlobSpec {
    double distance = 0.5;
    double sigma = 0.15;
    double amplitude = 1.0;
};
ScalarField blob_vorticity(const GridSpec& grid, const BlobSpec& spec = {});
EvolveState blob_state(const GridSpec& grid, double viscosity, const BlobSpec& spec = {});

/// Periodic Biot-Savart: v = (d_2 psi, -d_1 psi) with -Laplace(psi) = omega.
VectorField velocity(const EvolveState& state);

/// Periodic pressure: Laplace(p) = -d_j d_k (v_j v_k) with zero mean.
ScalarField torus_pressure(const VectorField& v);

double kinetic_energy(const EvolveState& state);

/// CFL * h / max|v| (infinity for a state at rest).
double max_stable_step(const EvolveState& state);

/// One classical RK4 step of the dealiased vorticity equation in integrating
/// factor form (the viscous term is propagated exactly). Throws
/// Error(StepSize) if |dt| exceeds max_stable_step.
EvolveState step(const EvolveState& state, double dt);

/// Steps with the largest stable dt not exceeding max_dt until t_end.
EvolveState advance(EvolveState state, double t_end, double max_dt = 1e300);

/// ||d_t v + (v . grad) v + grad p - nu Laplace v||_inf with d_t v from a
/// centred difference of two probe steps.
double momentum_residual(const EvolveState& state, double dt_probe);

/// 1 for |x| <= R/2, 0 for |x| >= R, smooth in between.
ScalarField window_function(const GridSpec& grid, double radius);

struct TrackOptions {
    double t_end = 0.5;
    int snapshots = 5;             // evaluation times t_end * i / snapshots, i = 0..snapshots
    bool symmetrize = false;       // project the windowed field onto quarter-turn invariant fields
    double support_threshold = 1e-10;
    double tolerance = 1e-2;
    std::vector<PlaneSpec> planes; // defaults to four planes through the window
    double max_dt = 1e300;
    /// Called at each snapshot with the state, the windowed velocity and its pressure.
    std::function<void(const EvolveState&, const VectorField&, const ScalarField&)> on_snapshot;
};

struct TrackedSnapshot {
    double time = 0.0;
    double window_error = 0.0;   // ||v - sigma_R v||_2^2 / ||v||_2^2
    double vorticity_radius = 0.0;
    double moment_isotropy = 0.0;
    std::vector<IdentityReport> reports;
};

/// Evolves `state` and, at each snapshot, windows the velocity by sigma_R,
/// recomputes its free-space pressure and checks the hyperplane and global
/// identities. The left-hand sides use the windowed pressure, the right-hand
/// sides the unwindowed periodic velocity, so the residuals include the
/// window and torus error. Throws Error(WindowOverflow) when the vorticity
/// above support_threshold * max|omega| leaves the ball of radius R.
std::vector<TrackedSnapshot> track_identities(EvolveState state, double window_radius,
                                              const TrackOptions& options = {});

} // namespace pvl
