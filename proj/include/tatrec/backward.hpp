#ifndef TATREC_BACKWARD_HPP
#define TATREC_BACKWARD_HPP

#include "tatrec/elliptic.hpp"
#include "tatrec/forward.hpp"
#include "tatrec/grid.hpp"
#include "tatrec/medium.hpp"

namespace tatrec {

struct TimeReversalResult {
    ScalarField field;      ///< v at t = 0, zero outside the domain
    WaveState state0;       ///< (v(0), centered time derivative at 0)
    SolveLog log;           ///< per-step energies of the backward sweep
    EllipticReport elliptic;
};

struct TimeReversalOptions {
    double tol_elliptic = 1e-9;
    bool record_log = true;
};

/**
 * Modified time reversal: solve the same damped wave equation backward on the
 * domain alone, from terminal data (phi, 0) with phi the harmonic extension
 * of the final trace row, imposing v = trace row n on the boundary ring at
 * every level. The terminal time derivative is realized by the ghost
 * reflection v^{N+1} = v^{N-1}, and the sweep reuses the forward stencil with
 * the time index decreasing, so a backward pass through a forward trajectory
 * reproduces it exactly. Returns v at t = 0 (zero outside the domain).
 */
TimeReversalResult time_reversal(const Medium& medium, const BoundaryTrace& trace,
                                 const TimeReversalOptions& opt = {});

struct BackwardRunResult {
    WaveState state0;
    SolveLog log;
};

/**
 * Backward solve with zero Dirichlet data on the boundary ring, from terminal
 * state (w_T, g_T) given at t = T = steps * dt. Inputs are restricted to the
 * domain (values outside it are ignored and treated as zero). The terminal
 * derivative uses the ghost reflection w^{N+1} = w^{N-1} + 2 dt g_T.
 */
BackwardRunResult backward_homogeneous(const Medium& medium, const ScalarField& w_T,
                                       const ScalarField& g_T, double dt, int steps,
                                       bool record_log = true);

struct ErrorOperatorResult {
    ScalarField field;          ///< K f computed as f minus the time reversal of its trace
    ScalarField residual_route; ///< the same quantity from the homogeneous backward solve
    double route_discrepancy = 0.0; ///< relative L2 gap between the two routes
    SolveLog w_log;             ///< energies of the homogeneous run, for the growth bound
    EllipticReport elliptic;
};

/**
 * Apply the reconstruction error operator f -> f - (time reversal of the
 * measured trace of f), computing it along two algebraically equivalent
 * routes: (i) directly, and (ii) as the t = 0 value of the homogeneous-ring
 * backward solve of the difference field started from the forward terminal
 * state minus the harmonic extension. The relative gap between the routes is
 * reported and must stay below route_tol; a larger gap means the stepper,
 * the elliptic solve, and the trace bookkeeping are inconsistent, and throws
 * NumericError.
 */
ErrorOperatorResult apply_error_operator(const Medium& medium, const ScalarField& f,
                                         double T, double tol_elliptic = 1e-9,
                                         double route_tol = 0.01);

} // namespace tatrec

#endif
