#include "tatrec/geodesics.hpp"
#include "tatrec/errors.hpp"
#include "tatrec/geometry.hpp"
#include "tatrec/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

namespace tatrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RayState {
    double x = 0.0, y = 0.0;
    double px = 0.0, py = 0.0;
};

void ray_deriv(const Medium& m, const RayState& s, RayState& d) {
    double c = m.speed_at(s.x, s.y);
    double c2 = c * c;
    double gx = 0.0, gy = 0.0;
    m.grad_c2_at(s.x, s.y, gx, gy);
    double p2 = s.px * s.px + s.py * s.py;
    d.x = c2 * s.px;
    d.y = c2 * s.py;
    d.px = -0.5 * gx * p2;
    d.py = -0.5 * gy * p2;
}

RayState rk4_step(const Medium& m, const RayState& s, double h) {
    RayState k1, k2, k3, k4, t;
    ray_deriv(m, s, k1);
    t = {s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y, s.px + 0.5 * h * k1.px,
         s.py + 0.5 * h * k1.py};
    ray_deriv(m, t, k2);
    t = {s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y, s.px + 0.5 * h * k2.px,
         s.py + 0.5 * h * k2.py};
    ray_deriv(m, t, k3);
    t = {s.x + h * k3.x, s.y + h * k3.y, s.px + h * k3.px, s.py + h * k3.py};
    ray_deriv(m, t, k4);
    RayState out;
    out.x = s.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    out.y = s.y + (h / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    out.px = s.px + (h / 6.0) * (k1.px + 2.0 * k2.px + 2.0 * k3.px + k4.px);
    out.py = s.py + (h / 6.0) * (k1.py + 2.0 * k2.py + 2.0 * k3.py + k4.py);
    return out;
}

double hamiltonian(const Medium& m, const RayState& s) {
    double c = m.speed_at(s.x, s.y);
    return c * c * (s.px * s.px + s.py * s.py);
}

/// Rescales the covector so c^2 |xi|^2 = 1 at the state's position.
void normalize_state(const Medium& m, RayState& s) {
    double c = m.speed_at(s.x, s.y);
    double norm = std::sqrt(s.px * s.px + s.py * s.py);
    if (!(norm > 0.0)) throw ConfigError("ray direction must be nonzero");
    double f = 1.0 / (c * norm);
    s.px *= f;
    s.py *= f;
}

struct Crossing {
    bool crossed = false;
    double time = 0.0;   // absolute integration time of the crossing
    RayState at{};       // interpolated state on the boundary
};

/// Advances the ray until its first boundary crossing or until `t` reaches
/// `cap`. The crossing is bracketed by one step and located with linear
/// interpolation of the signed distance, tightened by re-integrating partial
/// steps so the curvature of the path inside the step is honoured.
Crossing march_to_exit(const Medium& m, RayState& s, double& t, double cap, double dtau,
                       std::vector<std::array<double, 2>>* path, double& h_drift) {
    const DomainShape& shape = m.geometry.shape;
    double sd_old = shape.signed_distance(s.x, s.y);
    Crossing cross;
    while (t < cap) {
        double h = std::min(dtau, cap - t);
        if (h < dtau * 1e-12) break;
        RayState ns = rk4_step(m, s, h);
        double sd_new = shape.signed_distance(ns.x, ns.y);
        if (sd_new > 0.0) {
            double lo = 0.0, hi = 1.0;
            double sd_lo = sd_old, sd_hi = sd_new;
            double theta = sd_lo / (sd_lo - sd_hi);
            RayState probe = ns;
            for (int it = 0; it < 3; ++it) {
                theta = lo - sd_lo * (hi - lo) / (sd_hi - sd_lo);
                theta = std::clamp(theta, lo, hi);
                probe = rk4_step(m, s, theta * h);
                double sd_p = shape.signed_distance(probe.x, probe.y);
                if (sd_p > 0.0) {
                    hi = theta;
                    sd_hi = sd_p;
                } else {
                    lo = theta;
                    sd_lo = sd_p;
                }
            }
            theta = lo - sd_lo * (hi - lo) / (sd_hi - sd_lo);
            theta = std::clamp(theta, 0.0, 1.0);
            cross.crossed = true;
            cross.time = t + theta * h;
            cross.at = rk4_step(m, s, theta * h);
            h_drift = std::max(h_drift, std::abs(hamiltonian(m, cross.at) - 1.0));
            if (path) path->push_back({cross.at.x, cross.at.y});
            s = ns;
            return cross;
        }
        s = ns;
        t += h;
        sd_old = sd_new;
        h_drift = std::max(h_drift, std::abs(hamiltonian(m, s) - 1.0));
        if (path) path->push_back({s.x, s.y});
    }
    return cross;
}

/// Outward unit normal of the analytic shape at a boundary point. For the
/// square the active side is the axis with the larger excursion.
void shape_normal(const DomainShape& shape, double x, double y, double& nx, double& ny) {
    double rx = x - shape.cx;
    double ry = y - shape.cy;
    if (shape.kind == ShapeKind::Disk) {
        double r = std::sqrt(rx * rx + ry * ry);
        if (r <= 0.0) {
            nx = 1.0;
            ny = 0.0;
            return;
        }
        nx = rx / r;
        ny = ry / r;
        return;
    }
    if (std::abs(rx) >= std::abs(ry)) {
        nx = rx >= 0.0 ? 1.0 : -1.0;
        ny = 0.0;
    } else {
        nx = 0.0;
        ny = ry >= 0.0 ? 1.0 : -1.0;
    }
}

double default_cap(const Medium& m) {
    return 10.0 * m.geometry.shape.diameter() / m.min_speed();
}

double effective_dtau(const Medium& m, double dtau) {
    return std::min(0.5 * m.geometry.grid.dx, dtau);
}

bool arc_observed(const DomainGeometry& geo, double arc) {
    if (!geo.gamma_prime_arc) return true;
    return arc_in_interval(arc, geo.gamma_prime_arc->first, geo.gamma_prime_arc->second);
}

struct Arrival {
    double first_exit = kInf; // time of the first boundary crossing
    double direct = kInf;     // first crossing if it lands on the observed arc
    double reflected = kInf;  // first observed-arc arrival, reflections allowed
};

/// Follows a ray through specular reflections off the unobserved part of the
/// boundary until it lands on the observed arc or the cap runs out. The
/// metric is conformal to the Euclidean one, so the reflection law is the
/// Euclidean mirror law.
Arrival first_visible_arrival(const Medium& m, RayState s, double cap, double dtau) {
    const DomainShape& shape = m.geometry.shape;
    const double pull_in = 1e-5 * shape.diameter();
    Arrival arr;
    double t = 0.0;
    double drift = 0.0;
    for (int bounce = 0; bounce < 10000; ++bounce) {
        Crossing c = march_to_exit(m, s, t, cap, dtau, nullptr, drift);
        if (!c.crossed) return arr;
        double arc = shape.arc_position(c.at.x, c.at.y);
        bool observed = arc_observed(m.geometry, arc);
        if (bounce == 0) {
            arr.first_exit = c.time;
            if (observed) arr.direct = c.time;
        }
        if (observed) {
            arr.reflected = c.time;
            return arr;
        }
        double nx = 0.0, ny = 0.0;
        shape_normal(shape, c.at.x, c.at.y, nx, ny);
        RayState r = c.at;
        double dot = r.px * nx + r.py * ny;
        r.px -= 2.0 * dot * nx;
        r.py -= 2.0 * dot * ny;
        r.x -= pull_in * nx;
        r.y -= pull_in * ny;
        if (shape.signed_distance(r.x, r.y) >= 0.0) return arr;
        normalize_state(m, r);
        s = r;
        t = c.time;
    }
    return arr;
}

} // namespace

GeodesicRecord trace_geodesic(const Medium& medium, std::array<double, 2> x,
                              std::array<double, 2> xi, const RayOptions& opt) {
    const DomainShape& shape = medium.geometry.shape;
    if (shape.signed_distance(x[0], x[1]) >= 0.0)
        throw ConfigError("ray start lies outside the domain");
    RayState s{x[0], x[1], xi[0], xi[1]};
    normalize_state(medium, s);

    GeodesicRecord rec;
    rec.start_x = x;
    rec.start_xi = {s.px, s.py};
    const double cap = opt.cap > 0.0 ? opt.cap : default_cap(medium);
    const double dtau = effective_dtau(medium, opt.dtau);

    std::vector<std::array<double, 2>>* path = opt.record_path ? &rec.path : nullptr;
    if (path) path->push_back({s.x, s.y});
    double t = 0.0;
    Crossing c = march_to_exit(medium, s, t, cap, dtau, path, rec.max_h_drift);
    if (c.crossed) {
        rec.escaped = true;
        rec.exit_time = c.time;
        rec.exit_arc = shape.arc_position(c.at.x, c.at.y);
    } else {
        rec.escaped = false;
        rec.exit_time = cap;
    }
    return rec;
}

ScalarField eikonal_distance(const Medium& medium) {
    const DomainGeometry& geo = medium.geometry;
    const Grid2D& g = geo.grid;
    const double h = g.dx;

    // 0 far, 1 narrow band, 2 accepted; distances start at infinity.
    std::vector<std::uint8_t> state(g.size(), 0);
    std::vector<double> d(g.size(), kInf);
    std::vector<std::uint8_t> region(geo.interior_mask);
    for (const auto& b : geo.gamma) region[g.idx(b.i, b.j)] = 1;

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

    for (const auto& b : geo.gamma) {
        std::size_t k = g.idx(b.i, b.j);
        d[k] = 0.0;
        state[k] = 2;
    }

    auto solve_at = [&](int i, int j) {
        double a = kInf, b = kInf;
        if (i > 0 && region[g.idx(i - 1, j)]) a = std::min(a, d[g.idx(i - 1, j)]);
        if (i + 1 < g.nx && region[g.idx(i + 1, j)]) a = std::min(a, d[g.idx(i + 1, j)]);
        if (j > 0 && region[g.idx(i, j - 1)]) b = std::min(b, d[g.idx(i, j - 1)]);
        if (j + 1 < g.ny && region[g.idx(i, j + 1)]) b = std::min(b, d[g.idx(i, j + 1)]);
        double hs = h / medium.c.at(i, j);
        if (a > b) std::swap(a, b);
        if (!std::isfinite(a)) return kInf;
        if (b - a >= hs) return a + hs;
        return 0.5 * (a + b + std::sqrt(2.0 * hs * hs - (b - a) * (b - a)));
    };

    auto relax_neighbors = [&](int i, int j) {
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int q = 0; q < 4; ++q) {
            int ni = i + di[q], nj = j + dj[q];
            if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny) continue;
            std::size_t k = g.idx(ni, nj);
            if (!region[k] || state[k] == 2) continue;
            double v = solve_at(ni, nj);
            if (v < d[k]) {
                d[k] = v;
                state[k] = 1;
                heap.push({v, k});
            }
        }
    };

    for (const auto& b : geo.gamma) relax_neighbors(b.i, b.j);

    while (!heap.empty()) {
        auto [v, k] = heap.top();
        heap.pop();
        if (state[k] == 2 || v > d[k]) continue; // stale entry
        state[k] = 2;
        int i = static_cast<int>(k % g.nx);
        int j = static_cast<int>(k / g.nx);
        relax_neighbors(i, j);
    }

    ScalarField out(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (region[k]) {
            if (!std::isfinite(d[k]))
                throw NumericError("fast marching left part of the domain unreached");
            out.values[k] = d[k];
        }
    return out;
}

CriticalTimes critical_times(const Medium& medium, int direction_samples,
                             int point_samples, const std::vector<std::uint8_t>* k_mask,
                             int k_stride, double cap) {
    if (direction_samples < 8 || direction_samples % 2 != 0)
        throw ConfigError("direction sampling must be even and at least 8");
    if (point_samples < 4) throw ConfigError("point sampling must be at least 4");
    const DomainGeometry& geo = medium.geometry;
    const Grid2D& g = geo.grid;
    if (cap <= 0.0) cap = default_cap(medium);
    const double dtau = effective_dtau(medium, RayOptions{}.dtau);
    const double two_pi = 8.0 * std::atan(1.0);

    CriticalTimes out;

    ScalarField dist = eikonal_distance(medium);
    for (std::size_t k = 0; k < dist.values.size(); ++k)
        out.t1 = std::max(out.t1, dist.values[k]);

    // Longest-ray estimate from an inward-offset boundary lattice; odd
    // indices of the doubled direction fan give the refinement increment.
    // The offset trims every chord by about its own length, so it is kept
    // well under a cell.
    const double offset = 0.6 * g.dx;
    const std::size_t nb = geo.gamma.size();
    const std::size_t stride = std::max<std::size_t>(1, nb / static_cast<std::size_t>(point_samples));
    const int dirs2 = 2 * direction_samples;
    double t0_coarse = 0.0;
    RayOptions ropt;
    ropt.cap = cap;
    ropt.record_path = false;
    for (std::size_t b = 0; b < nb; b += stride) {
        const BoundarySample& bs = geo.gamma[b];
        double px = g.x(bs.i) - offset * bs.normal_x;
        double py = g.y(bs.j) - offset * bs.normal_y;
        if (geo.shape.signed_distance(px, py) >= 0.0) continue;
        for (int q = 0; q < dirs2; ++q) {
            double th = two_pi * q / dirs2;
            GeodesicRecord rec =
                trace_geodesic(medium, {px, py}, {std::cos(th), std::sin(th)}, ropt);
            if (!rec.escaped) {
                out.t0_trapped = true;
                continue;
            }
            out.t0 = std::max(out.t0, rec.exit_time);
            if (q % 2 == 0) t0_coarse = std::max(t0_coarse, rec.exit_time);
        }
    }
    out.t0_refined = out.t0 + (out.t0 - t0_coarse);

    if (k_mask) {
        if (k_mask->size() != g.size())
            throw ConfigError("visibility mask does not match the grid");
        if (k_stride < 1) throw ConfigError("mask stride must be positive");
        const int half = direction_samples / 2;
        std::size_t seen = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                std::size_t k = g.idx(i, j);
                if (!(*k_mask)[k]) continue;
                if (seen++ % static_cast<std::size_t>(k_stride) != 0) continue;
                double px = g.x(i), py = g.y(j);
                if (geo.shape.signed_distance(px, py) >= 0.0) continue;
                std::vector<Arrival> arr(static_cast<std::size_t>(direction_samples));
                for (int q = 0; q < direction_samples; ++q) {
                    double th = two_pi * q / direction_samples;
                    RayState s{px, py, std::cos(th), std::sin(th)};
                    normalize_state(medium, s);
                    arr[static_cast<std::size_t>(q)] = first_visible_arrival(medium, s, cap, dtau);
                    if (q < half) continue;
                    const Arrival& fwd = arr[static_cast<std::size_t>(q - half)];
                    const Arrival& bwd = arr[static_cast<std::size_t>(q)];
                    out.t2_direct = std::max(out.t2_direct, std::min(fwd.direct, bwd.direct));
                    double pm = std::min(fwd.reflected, bwd.reflected);
                    if (!std::isfinite(pm)) out.t2_unreachable = true;
                    out.t2_reflected = std::max(out.t2_reflected, pm);
                    for (const Arrival* a : {&fwd, &bwd}) {
                        if (std::isfinite(a->reflected))
                            out.t2_one_way = std::max(out.t2_one_way, a->reflected);
                        else
                            out.t2_unreachable = true;
                    }
                }
            }
    }
    return out;
}

double visibility_symbol(const Medium& medium, const Cutoff& cutoff,
                         std::array<double, 2> x, std::array<double, 2> xi,
                         double cap) {
    RayOptions opt;
    opt.cap = cap;
    opt.record_path = false;
    double sigma = 0.0;
    for (double sign : {1.0, -1.0}) {
        GeodesicRecord rec =
            trace_geodesic(medium, x, {sign * xi[0], sign * xi[1]}, opt);
        if (!rec.escaped || rec.exit_time > cutoff.T) continue;
        sigma += 0.5 * cutoff.time_profile(rec.exit_time) * cutoff.space_profile(rec.exit_arc);
    }
    return sigma;
}

ScalarField visibility_map(const Medium& medium, const Cutoff& cutoff,
                           const std::vector<std::uint8_t>& k_mask, int directions,
                           double cap) {
    if (directions < 8) throw ConfigError("visibility map needs at least 8 directions");
    const Grid2D& g = medium.geometry.grid;
    if (k_mask.size() != g.size())
        throw ConfigError("visibility mask does not match the grid");
    const double pi = 4.0 * std::atan(1.0);

    ScalarField out(g, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!k_mask[g.idx(i, j)]) continue;
            double px = g.x(i), py = g.y(j);
            if (medium.geometry.shape.signed_distance(px, py) >= 0.0)
                throw ConfigError("visibility mask extends outside the domain");
            double lo = 1.0;
            // The symbol is even in the direction, so half a turn covers it.
            for (int q = 0; q < directions; ++q) {
                double th = pi * q / directions;
                lo = std::min(lo, visibility_symbol(medium, cutoff, {px, py},
                                                    {std::cos(th), std::sin(th)}, cap));
            }
            out.at(i, j) = lo;
        }
    return out;
}

} // namespace tatrec
