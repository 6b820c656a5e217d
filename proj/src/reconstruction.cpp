#include "tatrec/reconstruction.hpp"
#include "tatrec/errors.hpp"
#include "tatrec/geometry.hpp"
#include "tatrec/operators.hpp"

#include <cmath>
#include <limits>

namespace tatrec {

namespace {

struct Masks {
    std::vector<std::uint8_t> region;
    std::vector<std::uint8_t> ring;
};

Masks make_masks(const DomainGeometry& geo) {
    Masks m;
    m.region = geo.interior_mask;
    m.ring.assign(geo.grid.size(), 0);
    for (const auto& b : geo.gamma) {
        m.region[geo.grid.idx(b.i, b.j)] = 1;
        m.ring[geo.grid.idx(b.i, b.j)] = 1;
    }
    return m;
}

/// Keep a field in the admissible source space: zero on the ring and outside.
void project_admissible(ScalarField& f, const DomainGeometry& geo) {
    for (std::size_t k = 0; k < f.values.size(); ++k)
        if (!geo.interior_mask[k]) f.values[k] = 0.0;
}

double field_l2(const ScalarField& f, const std::vector<std::uint8_t>& mask) {
    ScalarField sq(f.grid, 0.0);
    for (std::size_t k = 0; k < f.values.size(); ++k)
        sq.values[k] = f.values[k] * f.values[k];
    return std::sqrt(masked_integral(sq, mask));
}

} // namespace

ReconstructionResult neumann_reconstruct(const Medium& medium, const BoundaryTrace& data,
                                         const Cutoff* cutoff, int max_iters, double tol,
                                         const ScalarField* truth, double tol_elliptic) {
    if (max_iters < 1) throw ConfigError("iteration budget must be at least 1");
    if (!(tol > 0.0)) throw ConfigError("stopping tolerance must be positive");
    const DomainGeometry& geo = medium.geometry;
    const Grid2D& g = medium.c.grid;
    Masks masks = make_masks(geo);
    const double T = (data.nt - 1) * data.dt;

    BoundaryTrace windowed = data;
    if (cutoff) apply_cutoff(windowed, *cutoff);

    TimeReversalOptions topt;
    topt.tol_elliptic = tol_elliptic;
    topt.record_log = false;

    auto reverse_projected = [&](const BoundaryTrace& tr) {
        ScalarField v = time_reversal(medium, tr, topt).field;
        project_admissible(v, geo);
        return v;
    };

    auto windowed_trace_of = [&](const ScalarField& f) {
        ScalarField v0(g);
        for (std::size_t k = 0; k < g.size(); ++k)
            v0.values[k] = -medium.a.values[k] * f.values[k];
        ForwardOptions fopt;
        fopt.record_log = false;
        fopt.dt_override = data.dt; // keep the iterate traces aligned with the data
        BoundaryTrace tr = forward_solve(medium, f, v0, T, fopt).trace;
        if (cutoff) apply_cutoff(tr, *cutoff);
        return tr;
    };

    ReconstructionResult res;
    res.f_hat = reverse_projected(windowed);

    SeriesReport& rep = res.report;
    rep.initial_hd = hd_norm(res.f_hat, masks.region, masks.ring);

    auto error_vs_truth = [&](const ScalarField& f) {
        if (!truth) return -1.0;
        ScalarField d(g, 0.0);
        for (std::size_t k = 0; k < g.size(); ++k)
            d.values[k] = f.values[k] - truth->values[k];
        return hd_norm(d, masks.region, masks.ring);
    };

    rep.iterates.push_back({0, rep.initial_hd, 0.0, error_vs_truth(res.f_hat)});
    if (rep.initial_hd <= 0.0) {
        rep.converged = true;
        rep.stop_reason = "tolerance";
        return res;
    }

    ScalarField best = res.f_hat;
    double best_residual = rep.initial_hd;
    double prev_residual = rep.initial_hd;
    int growth_streak = 0;

    for (int m = 1; m <= max_iters; ++m) {
        BoundaryTrace tr = windowed_trace_of(res.f_hat);
        for (std::size_t k = 0; k < tr.samples.size(); ++k)
            tr.samples[k] = windowed.samples[k] - tr.samples[k];
        ScalarField corr = reverse_projected(tr);
        for (std::size_t k = 0; k < g.size(); ++k)
            res.f_hat.values[k] += corr.values[k];

        double residual = hd_norm(corr, masks.region, masks.ring);
        double ratio = residual / prev_residual;
        rep.iterates.push_back({m, residual, ratio, error_vs_truth(res.f_hat)});

        if (residual < best_residual) {
            best_residual = residual;
            best = res.f_hat;
        }
        growth_streak = (residual > prev_residual) ? growth_streak + 1 : 0;
        prev_residual = residual;

        if (residual <= tol * rep.initial_hd) {
            rep.converged = true;
            rep.stop_reason = "tolerance";
            return res;
        }
        if (growth_streak >= 3) {
            rep.converged = false;
            rep.stop_reason = "diverging";
            res.f_hat = best;
            return res;
        }
    }
    rep.converged = false;
    rep.stop_reason = "max_iters";
    return res;
}

ContinuityTable continuity_experiment(const DomainGeometry& geo, const SoundSpeedSpec& cs,
                                      const AttenuationSpec& a_base,
                                      const std::vector<double>& scales,
                                      const Phantom& phantom, double T,
                                      double tol_elliptic) {
    if (scales.empty()) throw ConfigError("continuity sweep needs at least one scale");
    Masks masks = make_masks(geo);

    auto k_field = [&](double s) {
        AttenuationSpec as = a_base;
        as.scale = s;
        Medium m = build_medium(geo, cs, as);
        return apply_error_operator(m, phantom.f, T, tol_elliptic).field;
    };

    ContinuityTable table;
    table.phantom_hd = hd_norm(phantom.f, masks.region, masks.ring);
    ScalarField reference = k_field(0.0);

    for (double s : scales) {
        if (s < 0.0) throw ConfigError("attenuation scales must be nonnegative");
        AttenuationSpec as = a_base;
        as.scale = s;
        Medium m = build_medium(geo, cs, as);
        ScalarField ks = apply_error_operator(m, phantom.f, T, tol_elliptic).field;
        ScalarField d(geo.grid, 0.0);
        for (std::size_t k = 0; k < d.values.size(); ++k)
            d.values[k] = reference.values[k] - ks.values[k];
        ContinuityRow row;
        row.scale = s;
        row.a_sup = m.attenuation_sup();
        row.diff_hd = hd_norm(d, masks.region, masks.ring);
        table.rows.push_back(row);
    }

    double slope = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& r : table.rows)
        if (r.a_sup > 0.0 && r.a_sup < smallest) {
            smallest = r.a_sup;
            slope = r.diff_hd / r.a_sup;
        }
    table.fitted_slope = slope;
    return table;
}

StabilityTable stability_probe(const Medium& medium, const std::vector<Phantom>& phantoms,
                               double T) {
    if (phantoms.empty()) throw ConfigError("stability probe needs phantoms");
    Masks masks = make_masks(medium.geometry);
    const double perimeter = medium.geometry.shape.perimeter();

    StabilityTable table;
    for (std::size_t i = 0; i < phantoms.size(); ++i) {
        const Phantom& p = phantoms[i];
        double fh = hd_norm(p.f, masks.region, masks.ring);
        if (fh <= 0.0) throw ConfigError("stability probe phantoms must be nonzero");
        BoundaryTrace tr = apply_lambda(medium, p.f, T);
        StabilityRow row;
        row.index = static_cast<int>(i);
        row.f_hd = fh;
        row.trace_h1 = trace_h1_norm(tr, perimeter);
        row.ratio = row.f_hd / row.trace_h1;
        table.rows.push_back(row);
        table.max_ratio = std::max(table.max_ratio, row.ratio);
    }
    return table;
}

ReconstructionMetrics reconstruction_metrics(const ScalarField& f_hat,
                                             const ScalarField& truth,
                                             const DomainGeometry& geo) {
    require_same_grid(f_hat.grid, truth.grid, "reconstruction_metrics");
    Masks masks = make_masks(geo);

    double truth_hd = hd_norm(truth, masks.region, masks.ring);
    double truth_l2 = field_l2(truth, masks.region);
    if (truth_l2 <= 0.0) throw ConfigError("metrics need a nonzero reference field");

    ScalarField d(f_hat.grid, 0.0);
    for (std::size_t k = 0; k < d.values.size(); ++k)
        d.values[k] = f_hat.values[k] - truth.values[k];

    ReconstructionMetrics m;
    m.rel_hd = hd_norm(d, masks.region, masks.ring) / truth_hd;
    m.rel_l2 = field_l2(d, masks.region) / truth_l2;

    // Support mask: nonzero truth samples dilated twice by the 8-neighborhood.
    const Grid2D& g = truth.grid;
    std::vector<std::uint8_t> supp(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) supp[k] = truth.values[k] != 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<std::uint8_t> grown = supp;
        for (int j = 1; j < g.ny - 1; ++j)
            for (int i = 1; i < g.nx - 1; ++i) {
                if (supp[g.idx(i, j)]) continue;
                for (int dj = -1; dj <= 1 && !grown[g.idx(i, j)]; ++dj)
                    for (int di = -1; di <= 1; ++di)
                        if (supp[g.idx(i + di, j + dj)]) {
                            grown[g.idx(i, j)] = 1;
                            break;
                        }
            }
        supp.swap(grown);
    }
    for (std::size_t k = 0; k < supp.size(); ++k) supp[k] = supp[k] && masks.region[k];
    double denom = field_l2(truth, supp);
    m.support_rel_l2 = field_l2(d, supp) / denom;
    return m;
}

double measurement_floor(const Medium& medium, int n_phantoms, double T,
                         std::uint64_t seed0) {
    if (n_phantoms < 1) throw ConfigError("injectivity floor needs phantoms");
    Masks masks = make_masks(medium.geometry);
    const double perimeter = medium.geometry.shape.perimeter();
    double floor_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_phantoms; ++i) {
        Phantom p = random_phantom(medium.geometry, seed0 + static_cast<std::uint64_t>(i));
        double fh = hd_norm(p.f, masks.region, masks.ring);
        if (fh <= 0.0) continue;
        BoundaryTrace tr = apply_lambda(medium, p.f, T);
        floor_ratio = std::min(floor_ratio, trace_l2_norm(tr, perimeter) / fh);
    }
    if (!std::isfinite(floor_ratio))
        throw NumericError("injectivity floor undefined: all phantoms degenerate");
    return floor_ratio;
}

} // namespace tatrec
