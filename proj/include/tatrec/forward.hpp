#ifndef TATREC_FORWARD_HPP
#define TATREC_FORWARD_HPP

#include "tatrec/grid.hpp"
#include "tatrec/medium.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace tatrec {

/// Uniform time discretization. dt is chosen so that steps * dt == T exactly
/// and dt <= cfl_fraction * dx / (c_max * sqrt(2)).
struct TimeGrid {
    double dt = 0.0;
    int steps = 0;
    double T = 0.0;
    double cfl_fraction = 0.9;
};

/// dt_override > 0 pins the step instead; it must divide T to within 1e-9
/// relative and respect the stability bound.
TimeGrid make_time_grid(const Medium& medium, double T, double cfl_fraction = 0.9,
                        double dt_override = 0.0);

/// Pressure samples on the boundary ring over time, time-major. Row n holds
/// u(n*dt) at every ring sample in the ring's arc order.
struct BoundaryTrace {
    int nt = 0;          // number of time samples, steps + 1
    std::size_t nb = 0;  // number of ring samples
    double dt = 0.0;
    std::uint64_t geometry_hash = 0;
    std::vector<double> samples;

    double at(int n, std::size_t s) const { return samples[static_cast<std::size_t>(n) * nb + s]; }
    double& at(int n, std::size_t s) { return samples[static_cast<std::size_t>(n) * nb + s]; }
};

/// Per-step energy diagnostics of a solve.
/// e_box and e_omega are the physical wave energies (centered-difference
/// velocity) over the whole box and over the domain; they are exact only to
/// O(dt^2). step_energy[n] is the half-step form
///   1/2 |(u^{n+1}-u^n)/dt|^2_{1/c^2} + 1/2 D(u^{n+1}, u^n)
/// which the update rule decreases exactly whenever the attenuation is
/// nonnegative, up to roundoff.
struct SolveLog {
    std::vector<double> times;
    std::vector<double> e_box;
    std::vector<double> e_omega;
    std::vector<double> step_energy;
    double cfl = 0.0; ///< c_max * dt * sqrt(2) / dx actually used
};

struct ForwardResult {
    WaveState terminal;  // pressure and its time derivative at t = T
    BoundaryTrace trace;
    SolveLog log;
    TimeGrid time;
};

/// Called after each accepted step with the new field; n runs from 1 to steps.
using StepMonitor = std::function<void(int n, double t, const ScalarField& u)>;

struct ForwardOptions {
    double cfl_fraction = 0.9;
    double dt_override = 0.0; ///< > 0 pins dt; see make_time_grid
    bool record_log = true;
    StepMonitor monitor;
};

/**
 * Integrate the damped wave equation
 *   u_tt + a u_t = c^2 (u_xx + u_yy),  u(0) = u0,  u_t(0) = v0,
 * on the enclosing box with homogeneous Dirichlet data at the box edge, by
 * the implicit-damping leapfrog rule
 *   (1 + a dt/2) u^{n+1} = 2 u^n - (1 - a dt/2) u^{n-1} + dt^2 c^2 L u^n.
 * The first step is the second-order Taylor start
 *   u^1 = u0 + dt v0 + dt^2/2 (c^2 L u0 - a v0),
 * and the terminal velocity is the centered difference through one extra
 * step past T.
 */
ForwardResult forward_solve(const Medium& medium, const ScalarField& u0,
                            const ScalarField& v0, double T,
                            const ForwardOptions& opt = {});

/// The measurement map: solve forward from (f, -a f) and keep the ring trace.
BoundaryTrace apply_lambda(const Medium& medium, const ScalarField& f, double T,
                           double cfl_fraction = 0.9);

/// Multiply every trace sample by the window value chi(t_n, arc_s) in place.
void apply_cutoff(BoundaryTrace& trace, const Cutoff& cutoff);

/// Add a seeded uniform perturbation scaled so that its l2 norm over all
/// samples is exactly `relative_level` times the l2 norm of the trace.
void add_noise(BoundaryTrace& trace, double relative_level, std::uint64_t seed);

/// Discrete L2(boundary x (0,T)) norm: trapezoid in time, equal arc weights
/// summing to the given perimeter.
double trace_l2_norm(const BoundaryTrace& trace, double perimeter);

/// Same quadrature applied to the pointwise difference. Throws ConfigError
/// when the traces are not shaped alike.
double trace_l2_distance(const BoundaryTrace& a, const BoundaryTrace& b,
                         double perimeter);

/// Discrete H1 norm over boundary x (0,T): the value plus forward-difference
/// time and arc derivatives (the ring wraps), same quadrature weights as
/// trace_l2_norm. Arc spacing is the equal-weight perimeter / nb.
double trace_h1_norm(const BoundaryTrace& trace, double perimeter);

/// Fitted against expected plane-wave behavior on a periodic torus with
/// constant attenuation and unit speed.
struct DispersionResult {
    double fitted_decay = 0.0;     // from the amplitude envelope of the mode
    double expected_decay = 0.0;   // a / 2
    double fitted_frequency = 0.0; // from the unwrapped phase of the mode
    double expected_frequency = 0.0; // sqrt(k^2 - a^2/4)
};

/**
 * Evolve the single right-moving mode of wavenumber k on the periodic square
 * torus of side 2 pi (y-constant data, the same update rule as the main
 * solver) and fit decay rate and frequency from the complex mode amplitude.
 * Requires a < 2k so the mode oscillates.
 */
DispersionResult dispersion_probe(int wavenumber, double attenuation, double T,
                                  int nx = 64, double cfl_fraction = 0.9);

} // namespace tatrec

#endif
