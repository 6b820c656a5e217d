#include "tatrec/forward.hpp"
#include "tatrec/errors.hpp"
#include "tatrec/geometry.hpp"
#include "tatrec/operators.hpp"
#include "stepper_detail.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace tatrec {

TimeGrid make_time_grid(const Medium& medium, double T, double cfl_fraction,
                        double dt_override) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw ConfigError("measurement time must be positive and finite");
    if (!(cfl_fraction > 0.0) || cfl_fraction > 0.99)
        throw ConfigError("cfl fraction must lie in (0, 0.99]");
    double c_max = medium.max_speed();
    double dt_max = cfl_fraction * medium.c.grid.dx / (c_max * std::sqrt(2.0));
    TimeGrid tg;
    tg.T = T;
    tg.cfl_fraction = cfl_fraction;
    if (dt_override > 0.0) {
        if (dt_override > dt_max * (1.0 + 1e-12))
            throw ConfigError("requested time step " + std::to_string(dt_override) +
                              " violates the stability bound " + std::to_string(dt_max));
        double ratio = T / dt_override;
        tg.steps = static_cast<int>(std::llround(ratio));
        if (tg.steps < 1 || std::fabs(ratio - tg.steps) > 1e-9 * ratio)
            throw ConfigError("requested time step must divide the measurement time");
        tg.dt = T / tg.steps;
    } else {
        tg.steps = std::max(1, static_cast<int>(std::ceil(T / dt_max - 1e-12)));
        tg.dt = T / tg.steps;
    }
    return tg;
}

namespace {

void check_box_edge_zero(const ScalarField& f, const char* what) {
    const Grid2D& g = f.grid;
    for (int i = 0; i < g.nx; ++i)
        if (f.values[g.idx(i, 0)] != 0.0 || f.values[g.idx(i, g.ny - 1)] != 0.0)
            throw ConfigError(std::string(what) + " must vanish on the box edge");
    for (int j = 0; j < g.ny; ++j)
        if (f.values[g.idx(0, j)] != 0.0 || f.values[g.idx(g.nx - 1, j)] != 0.0)
            throw ConfigError(std::string(what) + " must vanish on the box edge");
}

std::vector<std::uint8_t> region_mask(const DomainGeometry& geo) {
    std::vector<std::uint8_t> m(geo.interior_mask);
    for (const auto& b : geo.gamma) m[geo.grid.idx(b.i, b.j)] = 1;
    return m;
}

double half_step_energy(const Medium& medium, double dt, const ScalarField& u_new,
                        const ScalarField& u_old, ScalarField& scratch,
                        const std::vector<std::uint8_t>& full_mask) {
    for (std::size_t k = 0; k < scratch.values.size(); ++k)
        scratch.values[k] = (u_new.values[k] - u_old.values[k]) / dt;
    return 0.5 * l2c_norm_sq(scratch, medium.c, full_mask) +
           0.5 * dirichlet_form(u_new, u_old);
}

} // namespace

ForwardResult forward_solve(const Medium& medium, const ScalarField& u0,
                            const ScalarField& v0, double T, const ForwardOptions& opt) {
    const Grid2D& g = medium.c.grid;
    require_same_grid(g, u0.grid, "forward_solve");
    require_same_grid(g, v0.grid, "forward_solve");
    if (!u0.all_finite() || !v0.all_finite())
        throw NumericError("initial data contains non-finite values");
    check_box_edge_zero(u0, "initial pressure");
    check_box_edge_zero(v0, "initial velocity");

    ForwardResult res;
    res.time = make_time_grid(medium, T, opt.cfl_fraction, opt.dt_override);
    const double dt = res.time.dt;
    const int N = res.time.steps;

    const DomainGeometry& geo = medium.geometry;
    // Free-space emulation: an outer-edge reflection needs longer than T to
    // return to the measurement boundary.
    if (!(geo.buffer_width > 0.5 * T))
        throw ConfigError("buffer of width " + std::to_string(geo.buffer_width) +
                          " cannot emulate free space up to time " + std::to_string(T) +
                          "; it must exceed T/2");
    res.trace.nt = N + 1;
    res.trace.nb = geo.gamma.size();
    res.trace.dt = dt;
    res.trace.geometry_hash = geometry_hash(geo);
    res.trace.samples.assign(static_cast<std::size_t>(N + 1) * res.trace.nb, 0.0);

    std::vector<std::uint8_t> full_mask(g.size(), 1);
    std::vector<std::uint8_t> omega_mask = region_mask(geo);

    if (opt.record_log) {
        res.log.times.resize(N + 1);
        for (int n = 0; n <= N; ++n) res.log.times[n] = n * dt;
        res.log.e_box.assign(N + 1, 0.0);
        res.log.e_omega.assign(N + 1, 0.0);
        res.log.step_energy.assign(N, 0.0);
        res.log.cfl = medium.max_speed() * dt * std::sqrt(2.0) / g.dx;
    }

    ScalarField u_prev = u0;
    ScalarField u(g), lap(g), scratch(g);

    auto record_trace = [&](int n, const ScalarField& field) {
        for (std::size_t s = 0; s < geo.gamma.size(); ++s)
            res.trace.at(n, s) = field.values[g.idx(geo.gamma[s].i, geo.gamma[s].j)];
    };
    record_trace(0, u0);
    if (opt.record_log) {
        res.log.e_box[0] = energy(WaveState{u0, v0}, medium.c, full_mask);
        res.log.e_omega[0] = energy(WaveState{u0, v0}, medium.c, omega_mask);
    }

    // Taylor start: u^1 = u0 + dt v0 + dt^2/2 (c^2 L u0 - a v0).
    detail::stencil_into(u0, lap);
    for (std::size_t k = 0; k < g.size(); ++k) {
        double c2 = medium.c.values[k] * medium.c.values[k];
        u.values[k] = u0.values[k] + dt * v0.values[k] +
                      0.5 * dt * dt * (c2 * lap.values[k] - medium.a.values[k] * v0.values[k]);
    }
    record_trace(1, u);
    if (opt.record_log) res.log.step_energy[0] = half_step_energy(medium, dt, u, u_prev, scratch, full_mask);
    if (opt.monitor) opt.monitor(1, dt, u);

    ScalarField u_next(g);
    for (int n = 1; n < N; ++n) {
        detail::stencil_into(u, lap);
        detail::forward_step_into(medium, dt, u_prev, u, lap, u_next);
        record_trace(n + 1, u_next);
        if (opt.record_log) {
            res.log.step_energy[n] =
                half_step_energy(medium, dt, u_next, u, scratch, full_mask);
            for (std::size_t k = 0; k < g.size(); ++k)
                scratch.values[k] = (u_next.values[k] - u_prev.values[k]) / (2.0 * dt);
            res.log.e_box[n] = energy(WaveState{u, scratch}, medium.c, full_mask);
            res.log.e_omega[n] = energy(WaveState{u, scratch}, medium.c, omega_mask);
        }
        if (opt.monitor) opt.monitor(n + 1, (n + 1) * dt, u_next);
        std::swap(u_prev, u);
        std::swap(u, u_next);
    }

    // One step past T for the centered terminal velocity.
    detail::stencil_into(u, lap);
    detail::forward_step_into(medium, dt, u_prev, u, lap, u_next);
    ScalarField v_T(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        v_T.values[k] = (u_next.values[k] - u_prev.values[k]) / (2.0 * dt);
    if (opt.record_log) {
        res.log.e_box[N] = energy(WaveState{u, v_T}, medium.c, full_mask);
        res.log.e_omega[N] = energy(WaveState{u, v_T}, medium.c, omega_mask);
    }
    if (!u.all_finite())
        throw NumericError("forward solve produced non-finite values; check the "
                           "time step against the speed bound");

    res.terminal = WaveState{u, v_T};
    return res;
}

BoundaryTrace apply_lambda(const Medium& medium, const ScalarField& f, double T,
                           double cfl_fraction) {
    ScalarField v0(f.grid);
    for (std::size_t k = 0; k < f.values.size(); ++k)
        v0.values[k] = -medium.a.values[k] * f.values[k];
    ForwardOptions opt;
    opt.cfl_fraction = cfl_fraction;
    opt.record_log = false;
    return forward_solve(medium, f, v0, T, opt).trace;
}

void apply_cutoff(BoundaryTrace& trace, const Cutoff& cutoff) {
    if (cutoff.gamma_arcs.size() != trace.nb)
        throw ConfigError("cutoff and trace disagree on the boundary ring size");
    double trace_T = (trace.nt - 1) * trace.dt;
    if (std::fabs(cutoff.T - trace_T) > 1e-9 * std::max(1.0, trace_T))
        throw ConfigError("cutoff and trace disagree on the time horizon");
    for (int n = 0; n < trace.nt; ++n) {
        double t = std::min(n * trace.dt, cutoff.T);
        for (std::size_t s = 0; s < trace.nb; ++s)
            trace.at(n, s) *= cutoff.eval_index(t, s);
    }
}

void add_noise(BoundaryTrace& trace, double relative_level, std::uint64_t seed) {
    if (relative_level < 0.0)
        throw ConfigError("noise level must be nonnegative");
    if (relative_level == 0.0) return;
    std::mt19937_64 rng(seed);
    std::vector<double> r(trace.samples.size());
    for (auto& v : r) v = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;

    auto l2 = [](const std::vector<double>& v) {
        double s = 0.0, comp = 0.0;
        for (double x : v) {
            double y = x * x - comp;
            double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        return std::sqrt(s);
    };
    double nu = l2(trace.samples);
    double nr = l2(r);
    if (nu == 0.0)
        throw ConfigError("cannot scale noise relative to an identically zero trace");
    double scale = relative_level * nu / nr;
    for (std::size_t k = 0; k < r.size(); ++k) trace.samples[k] += scale * r[k];
}

double trace_l2_norm(const BoundaryTrace& trace, double perimeter) {
    const double ds = perimeter / static_cast<double>(trace.nb);
    double s = 0.0, comp = 0.0;
    for (int n = 0; n < trace.nt; ++n) {
        double wt = (n == 0 || n == trace.nt - 1) ? 0.5 * trace.dt : trace.dt;
        for (std::size_t b = 0; b < trace.nb; ++b) {
            double v = trace.at(n, b);
            double y = v * v * wt * ds - comp;
            double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
    }
    return std::sqrt(s);
}

double trace_l2_distance(const BoundaryTrace& a, const BoundaryTrace& b, double perimeter) {
    if (a.nt != b.nt || a.nb != b.nb)
        throw ConfigError("traces have different shapes");
    if (std::fabs(a.dt - b.dt) > 1e-12 * std::max(a.dt, b.dt))
        throw ConfigError("traces have different time steps");
    BoundaryTrace d = a;
    for (std::size_t k = 0; k < d.samples.size(); ++k) d.samples[k] -= b.samples[k];
    return trace_l2_norm(d, perimeter);
}

double trace_h1_norm(const BoundaryTrace& trace, double perimeter) {
    if (trace.nt < 2 || trace.nb < 2)
        throw ConfigError("trace too small for a derivative norm");
    const double ds = perimeter / static_cast<double>(trace.nb);
    double s = 0.0, comp = 0.0;
    auto add = [&s, &comp](double y0) {
        double y = y0 - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    };
    for (int n = 0; n < trace.nt; ++n) {
        double wt = (n == 0 || n == trace.nt - 1) ? 0.5 * trace.dt : trace.dt;
        int n_fwd = (n == trace.nt - 1) ? n - 1 : n; // reuse the last interval
        for (std::size_t b = 0; b < trace.nb; ++b) {
            double v = trace.at(n, b);
            double dt_v = (trace.at(n_fwd + 1, b) - trace.at(n_fwd, b)) / trace.dt;
            double dsv = (trace.at(n, (b + 1) % trace.nb) - trace.at(n, b)) / ds;
            add((v * v + dt_v * dt_v + dsv * dsv) * wt * ds);
        }
    }
    return std::sqrt(s);
}

DispersionResult dispersion_probe(int wavenumber, double attenuation, double T, int nx,
                                  double cfl_fraction) {
    if (wavenumber < 1 || 2 * wavenumber >= nx)
        throw ConfigError("mode must satisfy 1 <= k < nx/2");
    if (attenuation < 0.0 || attenuation >= 2.0 * wavenumber)
        throw ConfigError("attenuation must satisfy 0 <= a < 2k for an oscillating mode");
    if (!(T > 0.0)) throw ConfigError("probe duration must be positive");

    const double L = 2.0 * M_PI;
    const double dx = L / nx;
    const double k = wavenumber;
    const double a = attenuation;
    const double omega = std::sqrt(k * k - 0.25 * a * a);

    double dt_max = cfl_fraction * dx / std::sqrt(2.0);
    int steps = std::max(2, static_cast<int>(std::ceil(T / dt_max - 1e-12)));
    double dt = T / steps;

    const int ny = nx;
    const std::size_t size = static_cast<std::size_t>(nx) * ny;
    std::vector<double> u_prev(size), u(size), u_next(size), lap(size);

    auto idx = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
    auto wrap = [nx](int i) { return (i + nx) % nx; };

    // Right-moving mode: u(0) = cos(kx), u_t(0) = -(a/2) cos(kx) - omega sin(kx).
    std::vector<double> v0(size);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double x = i * dx;
            u_prev[idx(i, j)] = std::cos(k * x);
            v0[idx(i, j)] = -0.5 * a * std::cos(k * x) - omega * std::sin(k * x);
        }

    auto periodic_lap = [&](const std::vector<double>& f) {
        const double inv_dx2 = 1.0 / (dx * dx);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double nb = f[idx(wrap(i + 1), j)] + f[idx(wrap(i - 1), j)] +
                            f[idx(i, wrap(j + 1))] + f[idx(i, wrap(j - 1))];
                lap[idx(i, j)] = (nb - 4.0 * f[idx(i, j)]) * inv_dx2;
            }
    };

    periodic_lap(u_prev);
    for (std::size_t s = 0; s < size; ++s)
        u[s] = u_prev[s] + dt * v0[s] + 0.5 * dt * dt * (lap[s] - a * v0[s]);

    // Complex amplitude of the e^{ikx} component, sampled at every step.
    auto project = [&](const std::vector<double>& f) {
        std::complex<double> acc(0.0, 0.0);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double x = i * dx;
                acc += f[idx(i, j)] * std::complex<double>(std::cos(k * x), -std::sin(k * x));
            }
        return acc * (2.0 / static_cast<double>(size));
    };

    std::vector<std::complex<double>> amp;
    amp.reserve(steps + 1);
    amp.push_back(project(u_prev));
    amp.push_back(project(u));

    const double half_dt = 0.5 * dt;
    for (int n = 1; n < steps; ++n) {
        periodic_lap(u);
        double alpha = a * half_dt;
        for (std::size_t s = 0; s < size; ++s)
            u_next[s] = (2.0 * u[s] - (1.0 - alpha) * u_prev[s] + dt * dt * lap[s]) /
                        (1.0 + alpha);
        std::swap(u_prev, u);
        std::swap(u, u_next);
        amp.push_back(project(u));
    }

    // Least-squares lines through log-magnitude and unwrapped phase.
    const std::size_t m = amp.size();
    std::vector<double> tv(m), lm(m), ph(m);
    double theta = std::arg(amp[0]);
    for (std::size_t n = 0; n < m; ++n) {
        tv[n] = static_cast<double>(n) * dt;
        double mag = std::abs(amp[n]);
        if (!(mag > 0.0)) throw NumericError("mode amplitude vanished during the probe");
        lm[n] = std::log(mag);
        if (n > 0) theta += std::arg(amp[n] / amp[n - 1]);
        ph[n] = theta;
    }
    auto slope = [&](const std::vector<double>& y) {
        double st = 0.0, sy = 0.0, sty = 0.0, stt = 0.0;
        for (std::size_t n = 0; n < m; ++n) {
            st += tv[n];
            sy += y[n];
            sty += tv[n] * y[n];
            stt += tv[n] * tv[n];
        }
        double denom = m * stt - st * st;
        return (m * sty - st * sy) / denom;
    };

    DispersionResult r;
    r.fitted_decay = -slope(lm);
    r.expected_decay = 0.5 * a;
    r.fitted_frequency = slope(ph);
    r.expected_frequency = omega;
    return r;
}

} // namespace tatrec
