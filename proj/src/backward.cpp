#include "tatrec/backward.hpp"
#include "tatrec/errors.hpp"
#include "tatrec/geometry.hpp"
#include "tatrec/operators.hpp"
#include "stepper_detail.hpp"

#include <cmath>

namespace tatrec {

namespace {

std::vector<std::uint8_t> region_mask(const DomainGeometry& geo) {
    std::vector<std::uint8_t> m(geo.interior_mask);
    for (const auto& b : geo.gamma) m[geo.grid.idx(b.i, b.j)] = 1;
    return m;
}

void check_backward_step(const Medium& medium, double dt) {
    double c_max = medium.max_speed();
    double dt_max = 0.99 * medium.c.grid.dx / (c_max * std::sqrt(2.0));
    if (dt > dt_max)
        throw ConfigError("trace time step violates the stability bound for this medium");
    if (medium.attenuation_sup() * 0.5 * dt >= 1.0)
        throw NumericError("attenuation too large for the backward step divisor");
}

/// Shared backward sweep. ring_value(n, s) supplies the Dirichlet datum for
/// level n at ring sample s; level N data are (v_T, g_T) on the region.
/// Fields outside the region stay exactly zero throughout.
template <typename RingValue>
BackwardRunResult backward_sweep(const Medium& medium, const ScalarField& v_T,
                                 const ScalarField& g_T, double dt, int steps,
                                 bool record_log, RingValue ring_value) {
    const Grid2D& g = medium.c.grid;
    const DomainGeometry& geo = medium.geometry;
    const int N = steps;
    if (N < 1) throw ConfigError("backward solve needs at least one step");
    check_backward_step(medium, dt);

    std::vector<std::uint8_t> region = region_mask(geo);
    std::vector<std::uint8_t> full_mask(g.size(), 1);

    // Terminal level, restricted to the region.
    ScalarField v_next(g, 0.0), gT(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (region[k]) {
            v_next.values[k] = v_T.values[k];
            gT.values[k] = g_T.values[k];
        }
    for (std::size_t s = 0; s < geo.gamma.size(); ++s)
        v_next.values[g.idx(geo.gamma[s].i, geo.gamma[s].j)] = ring_value(N, s);

    BackwardRunResult res;
    if (record_log) {
        res.log.times.resize(N + 1);
        for (int n = 0; n <= N; ++n) res.log.times[n] = n * dt;
        res.log.e_box.assign(N + 1, 0.0);
        res.log.e_omega.assign(N + 1, 0.0);
        res.log.step_energy.assign(N, 0.0);
        res.log.cfl = medium.max_speed() * dt * std::sqrt(2.0) / g.dx;
        res.log.e_box[N] = energy(WaveState{v_next, gT}, medium.c, full_mask);
        res.log.e_omega[N] = energy(WaveState{v_next, gT}, medium.c, region);
    }

    // Ghost-reflection start: eliminating v^{N+1} = v^{N-1} + 2 dt g_T from
    // the backward step yields
    //   v^{N-1} = v^N - dt (1 + a dt/2) g_T + dt^2/2 c^2 L v^N.
    ScalarField v(g, 0.0), lap(g), scratch(g);
    detail::stencil_into(v_next, lap);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!geo.interior_mask[k]) continue;
        double alpha = medium.a.values[k] * 0.5 * dt;
        double c2 = medium.c.values[k] * medium.c.values[k];
        v.values[k] = v_next.values[k] - dt * (1.0 + alpha) * gT.values[k] +
                      0.5 * dt * dt * c2 * lap.values[k];
    }
    for (std::size_t s = 0; s < geo.gamma.size(); ++s)
        v.values[g.idx(geo.gamma[s].i, geo.gamma[s].j)] = ring_value(N - 1, s);
    if (record_log && N >= 1)
        res.log.step_energy[N - 1] = [&] {
            for (std::size_t k = 0; k < g.size(); ++k)
                scratch.values[k] = (v_next.values[k] - v.values[k]) / dt;
            return 0.5 * l2c_norm_sq(scratch, medium.c, full_mask) +
                   0.5 * dirichlet_form(v_next, v);
        }();

    ScalarField v_prev(g, 0.0);
    for (int n = N - 1; n >= 1; --n) {
        detail::stencil_into(v, lap);
        detail::backward_step_into(medium, dt, v_next, v, lap, v_prev);
        for (std::size_t k = 0; k < g.size(); ++k)
            if (!geo.interior_mask[k]) v_prev.values[k] = 0.0;
        for (std::size_t s = 0; s < geo.gamma.size(); ++s)
            v_prev.values[g.idx(geo.gamma[s].i, geo.gamma[s].j)] = ring_value(n - 1, s);
        if (record_log) {
            res.log.step_energy[n - 1] = [&] {
                for (std::size_t k = 0; k < g.size(); ++k)
                    scratch.values[k] = (v.values[k] - v_prev.values[k]) / dt;
                return 0.5 * l2c_norm_sq(scratch, medium.c, full_mask) +
                       0.5 * dirichlet_form(v, v_prev);
            }();
            for (std::size_t k = 0; k < g.size(); ++k)
                scratch.values[k] = (v_next.values[k] - v_prev.values[k]) / (2.0 * dt);
            res.log.e_box[n] = energy(WaveState{v, scratch}, medium.c, full_mask);
            res.log.e_omega[n] = energy(WaveState{v, scratch}, medium.c, region);
        }
        std::swap(v_next, v);
        std::swap(v, v_prev);
    }

    // One step past t = 0 for the centered derivative there. The ring datum
    // for the ghost level extrapolates the first two rows linearly.
    detail::stencil_into(v, lap);
    detail::backward_step_into(medium, dt, v_next, v, lap, v_prev);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!geo.interior_mask[k]) v_prev.values[k] = 0.0;
    for (std::size_t s = 0; s < geo.gamma.size(); ++s)
        v_prev.values[g.idx(geo.gamma[s].i, geo.gamma[s].j)] =
            2.0 * ring_value(0, s) - ring_value(1, s);

    ScalarField vel0(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        vel0.values[k] = (v_next.values[k] - v_prev.values[k]) / (2.0 * dt);
    if (record_log) {
        res.log.e_box[0] = energy(WaveState{v, vel0}, medium.c, full_mask);
        res.log.e_omega[0] = energy(WaveState{v, vel0}, medium.c, region);
    }
    if (!v.all_finite())
        throw NumericError("backward solve produced non-finite values");

    res.state0 = WaveState{v, vel0};
    return res;
}

} // namespace

TimeReversalResult time_reversal(const Medium& medium, const BoundaryTrace& trace,
                                 const TimeReversalOptions& opt) {
    const DomainGeometry& geo = medium.geometry;
    if (trace.geometry_hash != geometry_hash(geo))
        throw ConfigError("trace was recorded on a different geometry");
    if (trace.nb != geo.gamma.size() ||
        trace.samples.size() != static_cast<std::size_t>(trace.nt) * trace.nb)
        throw ConfigError("trace shape is inconsistent");
    if (trace.nt < 2) throw ConfigError("trace must hold at least two time levels");

    TimeReversalResult res;

    std::vector<double> terminal_row(trace.nb);
    for (std::size_t s = 0; s < trace.nb; ++s)
        terminal_row[s] = trace.at(trace.nt - 1, s);
    ScalarField phi =
        harmonic_extension(geo, terminal_row, opt.tol_elliptic, 0, &res.elliptic);

    ScalarField zero(medium.c.grid, 0.0);
    BackwardRunResult run = backward_sweep(
        medium, phi, zero, trace.dt, trace.nt - 1, opt.record_log,
        [&trace](int n, std::size_t s) { return trace.at(n, s); });

    res.field = run.state0.u;
    res.state0 = run.state0;
    res.log = run.log;
    return res;
}

BackwardRunResult backward_homogeneous(const Medium& medium, const ScalarField& w_T,
                                       const ScalarField& g_T, double dt, int steps,
                                       bool record_log) {
    require_same_grid(medium.c.grid, w_T.grid, "backward_homogeneous");
    require_same_grid(medium.c.grid, g_T.grid, "backward_homogeneous");
    return backward_sweep(medium, w_T, g_T, dt, steps, record_log,
                          [](int, std::size_t) { return 0.0; });
}

ErrorOperatorResult apply_error_operator(const Medium& medium, const ScalarField& f,
                                         double T, double tol_elliptic,
                                         double route_tol) {
    const Grid2D& g = medium.c.grid;
    require_same_grid(g, f.grid, "apply_error_operator");

    ScalarField v0(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        v0.values[k] = -medium.a.values[k] * f.values[k];
    ForwardOptions fopt;
    fopt.record_log = false;
    ForwardResult fwd = forward_solve(medium, f, v0, T, fopt);

    ErrorOperatorResult res;

    TimeReversalOptions topt;
    topt.tol_elliptic = tol_elliptic;
    topt.record_log = false;
    TimeReversalResult rev = time_reversal(medium, fwd.trace, topt);
    res.elliptic = rev.elliptic;

    res.field = ScalarField(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
        res.field.values[k] = f.values[k] - rev.field.values[k];

    // Independent route: the difference field of the forward solution and the
    // time reversal obeys the same scheme with zero ring data and terminal
    // state (u(T) - phi, du/dt(T)).
    std::vector<double> terminal_row(fwd.trace.nb);
    for (std::size_t s = 0; s < fwd.trace.nb; ++s)
        terminal_row[s] = fwd.trace.at(fwd.trace.nt - 1, s);
    ScalarField phi = harmonic_extension(medium.geometry, terminal_row, tol_elliptic);
    ScalarField w_T(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        w_T.values[k] = fwd.terminal.u.values[k] - phi.values[k];
    BackwardRunResult wrun =
        backward_homogeneous(medium, w_T, fwd.terminal.v, fwd.time.dt, fwd.time.steps);
    res.residual_route = wrun.state0.u;
    res.w_log = wrun.log;

    std::vector<std::uint8_t> region = region_mask(medium.geometry);
    ScalarField sq(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        double d = res.field.values[k] - res.residual_route.values[k];
        sq.values[k] = d * d;
    }
    double num = std::sqrt(masked_integral(sq, region));
    for (std::size_t k = 0; k < g.size(); ++k)
        sq.values[k] = res.field.values[k] * res.field.values[k];
    double den = std::sqrt(masked_integral(sq, region));
    res.route_discrepancy = (den > 0.0) ? num / den : num;
    if (res.route_discrepancy > route_tol)
        throw NumericError(
            "error-operator routes disagree by " + std::to_string(res.route_discrepancy) +
            " relative; the stepper, elliptic solve, and trace bookkeeping are inconsistent");
    return res;
}

} // namespace tatrec
