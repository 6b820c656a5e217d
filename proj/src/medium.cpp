#include "tatrec/medium.hpp"
#include "tatrec/errors.hpp"
#include "tatrec/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tatrec {

double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

namespace {

double smoothstep5_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double u = t * (1.0 - t);
    return 30.0 * u * u;
}

double speed_formula(const SoundSpeedSpec& s, double x, double y) {
    switch (s.kind) {
        case SoundSpeedSpec::Kind::Constant:
            return 1.0;
        case SoundSpeedSpec::Kind::Bump: {
            double ddx = x - s.bump.cx, ddy = y - s.bump.cy;
            double w2 = s.bump.width * s.bump.width;
            return 1.0 + s.bump.amplitude * std::exp(-(ddx * ddx + ddy * ddy) / w2);
        }
        case SoundSpeedSpec::Kind::Inclusion: {
            double d = std::hypot(x - s.inclusion.cx, y - s.inclusion.cy);
            double t = (s.inclusion.radius - d) / s.inclusion.mollifier_width;
            return 1.0 + s.inclusion.amplitude * smoothstep5(t);
        }
    }
    return 1.0;
}

void speed_gradient_c2(const SoundSpeedSpec& s, double x, double y, double& gx, double& gy) {
    // grad(c^2) = 2 c grad(c)
    double cx_ = 0.0, cy_ = 0.0;
    switch (s.kind) {
        case SoundSpeedSpec::Kind::Constant:
            break;
        case SoundSpeedSpec::Kind::Bump: {
            double ddx = x - s.bump.cx, ddy = y - s.bump.cy;
            double w2 = s.bump.width * s.bump.width;
            double e = s.bump.amplitude * std::exp(-(ddx * ddx + ddy * ddy) / w2);
            cx_ = e * (-2.0 * ddx / w2);
            cy_ = e * (-2.0 * ddy / w2);
            break;
        }
        case SoundSpeedSpec::Kind::Inclusion: {
            double ddx = x - s.inclusion.cx, ddy = y - s.inclusion.cy;
            double d = std::hypot(ddx, ddy);
            if (d < 1e-14) break;
            double t = (s.inclusion.radius - d) / s.inclusion.mollifier_width;
            double dc_dd = -s.inclusion.amplitude * smoothstep5_deriv(t) / s.inclusion.mollifier_width;
            cx_ = dc_dd * ddx / d;
            cy_ = dc_dd * ddy / d;
            break;
        }
    }
    double c = speed_formula(s, x, y);
    gx = 2.0 * c * cx_;
    gy = 2.0 * c * cy_;
}

double attenuation_formula(const AttenuationSpec& s, double x, double y) {
    double v = 0.0;
    switch (s.kind) {
        case AttenuationSpec::Kind::Zero:
            return 0.0;
        case AttenuationSpec::Kind::Constant:
            v = s.constant;
            break;
        case AttenuationSpec::Kind::Bump: {
            double ddx = x - s.bump.cx, ddy = y - s.bump.cy;
            double w2 = s.bump.width * s.bump.width;
            v = s.bump.amplitude * std::exp(-(ddx * ddx + ddy * ddy) / w2);
            break;
        }
    }
    return s.scale * v;
}

} // namespace

double Medium::attenuation_sup() const { return a.max_abs(); }

double Medium::max_speed() const {
    double m = 0.0;
    for (double v : c.values) m = std::max(m, v);
    return m;
}

double Medium::min_speed() const {
    double m = c.values.empty() ? 0.0 : c.values[0];
    for (double v : c.values) m = std::min(m, v);
    return m;
}

// The analytic evaluators return the generator formula everywhere, without
// the outside-the-domain clamp applied to grid samples: ray integration needs
// a smooth speed across the last fraction of a step outside the boundary, and
// the generators are already within rounding of 1 out there.
double Medium::speed_at(double x, double y) const { return speed_formula(c_spec, x, y); }

void Medium::grad_c2_at(double x, double y, double& gx, double& gy) const {
    speed_gradient_c2(c_spec, x, y, gx, gy);
}

double Medium::smoothness_proxy() const {
    ScalarField lap = laplacian(c);
    return lap.max_abs() * c.grid.dx * c.grid.dx;
}

Medium build_medium(const DomainGeometry& geo, const SoundSpeedSpec& cs,
                    const AttenuationSpec& as, double smoothness_budget) {
    Medium m;
    m.geometry = geo;
    m.c_spec = cs;
    m.a_spec = as;
    m.c = ScalarField(geo.grid, 1.0);
    m.a = ScalarField(geo.grid, 0.0);

    std::vector<std::uint8_t> region(geo.grid.size(), 0);
    for (std::size_t k = 0; k < region.size(); ++k) region[k] = geo.interior_mask[k];
    for (const auto& b : geo.gamma) region[geo.grid.idx(b.i, b.j)] = 1;

    for (int j = 0; j < geo.grid.ny; ++j)
        for (int i = 0; i < geo.grid.nx; ++i) {
            std::size_t k = geo.grid.idx(i, j);
            if (!region[k]) continue;
            double x = geo.grid.x(i), y = geo.grid.y(j);
            m.c.values[k] = speed_formula(cs, x, y);
            m.a.values[k] = attenuation_formula(as, x, y);
        }

    m.inv_c2 = ScalarField(geo.grid);
    for (std::size_t k = 0; k < m.inv_c2.values.size(); ++k)
        m.inv_c2.values[k] = 1.0 / (m.c.values[k] * m.c.values[k]);

    validate_medium(m, smoothness_budget);
    return m;
}

void validate_medium(const Medium& m, double smoothness_budget) {
    const Grid2D& g = m.c.grid;
    if (m.c.values.size() != g.size() || m.a.values.size() != g.size())
        throw ConfigError("medium fields do not match their grid");

    std::vector<std::uint8_t> region(g.size(), 0);
    for (std::size_t k = 0; k < region.size(); ++k) region[k] = m.geometry.interior_mask[k];
    for (const auto& b : m.geometry.gamma) region[g.idx(b.i, b.j)] = 1;

    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(m.c.values[k] > 0.0))
            throw ConfigError("sound speed must be positive everywhere");
        if (m.a.values[k] < 0.0)
            throw ConfigError("attenuation must be nonnegative everywhere");
        if (!region[k]) {
            if (m.c.values[k] != 1.0)
                throw ConfigError("sound speed must equal 1 outside the domain");
            if (m.a.values[k] != 0.0)
                throw ConfigError("attenuation must vanish outside the domain");
        }
    }

    double proxy = m.smoothness_proxy();
    if (proxy > smoothness_budget)
        throw ConfigError("sound speed too rough for the grid: smoothness proxy " +
                          std::to_string(proxy) + " exceeds budget " +
                          std::to_string(smoothness_budget));
}

namespace {

double blob_value(const BlobComponent& b, double x, double y) {
    double ddx = x - b.cx, ddy = y - b.cy;
    if (b.kind == BlobComponent::Kind::Gaussian) {
        double w2 = b.width * b.width;
        double v = b.amplitude * std::exp(-(ddx * ddx + ddy * ddy) / w2);
        // Hard truncation keeps the support compact.
        if (std::fabs(v) < 1e-12 * std::fabs(b.amplitude)) return 0.0;
        return v;
    }
    double d = std::hypot(ddx, ddy);
    return b.amplitude * smoothstep5((b.width - d) / b.edge_width);
}

void smooth_3tap(ScalarField& f) {
    // Separable [1/4, 1/2, 1/4] pass; box-edge samples are left alone.
    const Grid2D& g = f.grid;
    ScalarField tmp = f;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            std::size_t k = g.idx(i, j);
            tmp.values[k] = 0.25 * f.values[k - 1] + 0.5 * f.values[k] + 0.25 * f.values[k + 1];
        }
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::size_t k = g.idx(i, j);
            f.values[k] = 0.25 * tmp.values[k - g.nx] + 0.5 * tmp.values[k] + 0.25 * tmp.values[k + g.nx];
        }
}

} // namespace

Phantom build_phantom(const DomainGeometry& geo, const PhantomSpec& spec, double min_margin) {
    if (min_margin < 0.0) min_margin = 0.1 * geo.shape.diameter();

    Phantom p;
    p.spec = spec;
    p.f = ScalarField(geo.grid, 0.0);
    const Grid2D& g = geo.grid;

    if (spec.kind == PhantomSpec::Kind::Checkerboard) {
        int nb = std::max(1, static_cast<int>(std::ceil(2.0 * spec.half_extent /
                                                        (spec.block_cells * g.dx))));
        std::mt19937_64 rng(spec.seed);
        std::vector<double> signs(static_cast<std::size_t>(nb) * nb);
        for (auto& s : signs) s = (rng() >> 63) ? 1.0 : -1.0;
        double x0 = geo.shape.cx - spec.half_extent;
        double y0 = geo.shape.cy - spec.half_extent;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double x = g.x(i), y = g.y(j);
                if (std::fabs(x - geo.shape.cx) >= spec.half_extent ||
                    std::fabs(y - geo.shape.cy) >= spec.half_extent)
                    continue;
                int bi = static_cast<int>((x - x0) / (spec.block_cells * g.dx));
                int bj = static_cast<int>((y - y0) / (spec.block_cells * g.dx));
                bi = std::clamp(bi, 0, nb - 1);
                bj = std::clamp(bj, 0, nb - 1);
                p.f.values[g.idx(i, j)] =
                    spec.amplitude * signs[static_cast<std::size_t>(bj) * nb + bi];
            }
        for (int pass = 0; pass < spec.mollify_passes; ++pass) smooth_3tap(p.f);
    } else {
        std::vector<BlobComponent> comps = spec.components;
        if (comps.empty())
            throw ConfigError("phantom specification has no components");
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double x = g.x(i), y = g.y(j);
                double v = 0.0;
                for (const auto& b : comps) v += blob_value(b, x, y);
                p.f.values[g.idx(i, j)] = v;
            }
    }

    // Clearance between the support and the domain boundary; negative when
    // the phantom leaks outside.
    double margin = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (p.f.values[g.idx(i, j)] == 0.0) continue;
            any = true;
            margin = std::min(margin, -geo.shape.signed_distance(g.x(i), g.y(j)));
        }
    p.support_margin = any ? margin : geo.shape.half;
    if (any && p.support_margin < min_margin)
        throw ConfigError("phantom support comes within " + std::to_string(p.support_margin) +
                          " of the domain boundary; required clearance " +
                          std::to_string(min_margin));
    if (!p.f.all_finite())
        throw NumericError("phantom synthesis produced non-finite values");
    return p;
}

Phantom random_phantom(const DomainGeometry& geo, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        double u = (rng() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    };

    const double margin = 0.1 * geo.shape.diameter();
    const double h = geo.shape.half;

    PhantomSpec spec;
    spec.kind = PhantomSpec::Kind::Blobs;
    int n = 3 + static_cast<int>(rng() % 3);
    for (int k = 0; k < n; ++k) {
        BlobComponent b;
        b.kind = BlobComponent::Kind::Gaussian;
        // Rejection-sample a center far enough inside that the truncated
        // support respects the margin.
        for (int tries = 0; tries < 1000; ++tries) {
            double x = uniform(geo.shape.cx - h, geo.shape.cx + h);
            double y = uniform(geo.shape.cy - h, geo.shape.cy + h);
            b.width = uniform(0.08, 0.18) * h;
            double trunc_radius = b.width * std::sqrt(std::log(1e12));
            if (geo.shape.signed_distance(x, y) < -(margin + trunc_radius)) {
                b.cx = x;
                b.cy = y;
                break;
            }
        }
        double amp = uniform(0.4, 1.0);
        b.amplitude = (rng() & 1) ? amp : -amp;
        spec.components.push_back(b);
    }
    return build_phantom(geo, spec, margin * 0.99);
}

double Cutoff::time_profile(double t) const {
    if (t < -1e-12 || t > T * (1.0 + 1e-12))
        throw ConfigError("cutoff evaluated outside [0, T]");
    t = std::clamp(t, 0.0, T);
    switch (mode) {
        case Mode::Identity:
            return 1.0;
        case Mode::Complete: {
            // Flat before the taper, zero on the final half width, so the
            // window vanishes on a genuine neighborhood of t = T while its
            // time derivative stays bounded by 15/(8 w) < 2/w.
            double fall_start = T - 1.5 * taper_width;
            double fall_end = T - 0.5 * taper_width;
            if (t <= fall_start) return 1.0;
            if (t >= fall_end) return 0.0;
            return smoothstep5((fall_end - t) / taper_width);
        }
        case Mode::Partial:
            return smoothstep5(t / time_edge) * smoothstep5((T - t) / time_edge);
    }
    return 1.0;
}

double Cutoff::space_profile(double arc) const {
    if (mode != Mode::Partial) return 1.0;
    double len = s1 - s0;
    if (len <= 0.0) len += 1.0;
    double u = arc - s0;
    u -= std::floor(u);
    if (u >= len) return 0.0;
    return smoothstep5(u / space_edge) * smoothstep5((len - u) / space_edge);
}

double Cutoff::eval(double t, double arc) const { return time_profile(t) * space_profile(arc); }

double Cutoff::eval_index(double t, std::size_t boundary_index) const {
    if (boundary_index >= gamma_arcs.size())
        throw ConfigError("cutoff evaluated at an invalid boundary index");
    return eval(t, gamma_arcs[boundary_index]);
}

namespace {

std::vector<double> collect_arcs(const DomainGeometry& geo) {
    std::vector<double> arcs;
    arcs.reserve(geo.gamma.size());
    for (const auto& b : geo.gamma) arcs.push_back(b.arc);
    return arcs;
}

} // namespace

Cutoff make_identity_cutoff(const DomainGeometry& geo, double T) {
    if (!(T > 0.0)) throw ConfigError("cutoff needs a positive time horizon");
    Cutoff c;
    c.mode = Cutoff::Mode::Identity;
    c.T = T;
    c.gamma_arcs = collect_arcs(geo);
    return c;
}

Cutoff make_complete_cutoff(const DomainGeometry& geo, double T, double t_flat,
                            double taper_frac) {
    if (!(T > 0.0)) throw ConfigError("cutoff needs a positive time horizon");
    Cutoff c;
    c.mode = Cutoff::Mode::Complete;
    c.T = T;
    c.taper_width = taper_frac * T;
    c.gamma_arcs = collect_arcs(geo);
    if (T - 1.5 * c.taper_width < t_flat)
        throw ConfigError("measurement time too short: the data window must stay fully "
                          "open until t = " + std::to_string(t_flat) +
                          " but its taper starts at " + std::to_string(T - 1.5 * c.taper_width));
    return c;
}

Cutoff make_partial_cutoff(const DomainGeometry& geo, double T, double space_edge_frac,
                           double time_edge_frac) {
    if (!(T > 0.0)) throw ConfigError("cutoff needs a positive time horizon");
    if (!geo.gamma_prime_arc)
        throw ConfigError("partial cutoff requires an observed arc on the geometry");
    Cutoff c;
    c.mode = Cutoff::Mode::Partial;
    c.T = T;
    c.s0 = geo.gamma_prime_arc->first;
    c.s1 = geo.gamma_prime_arc->second;
    double len = c.s1 - c.s0;
    if (len <= 0.0) len += 1.0;
    c.space_edge = space_edge_frac * len;
    c.time_edge = time_edge_frac * T;
    c.gamma_arcs = collect_arcs(geo);
    return c;
}

} // namespace tatrec
