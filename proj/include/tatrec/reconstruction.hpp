#ifndef TATREC_RECONSTRUCTION_HPP
#define TATREC_RECONSTRUCTION_HPP

#include "tatrec/backward.hpp"
#include "tatrec/forward.hpp"
#include "tatrec/medium.hpp"

#include <string>
#include <vector>

namespace tatrec {

struct IterationRecord {
    int m = 0;
    double residual_hd = 0.0;        ///< |f_{m} - f_{m-1}|, with f_{-1} = 0
    double contraction_ratio = 0.0;  ///< residual ratio, 0 for the m = 0 row
    double error_hd = -1.0;          ///< |f_m - truth|, -1 when no truth given
};

struct SeriesReport {
    std::vector<IterationRecord> iterates;
    bool converged = false;
    std::string stop_reason; ///< "tolerance", "max_iters", or "diverging"
    double initial_hd = 0.0; ///< gradient norm of the first iterate
};

struct ReconstructionResult {
    ScalarField f_hat;
    SeriesReport report;
};

/**
 * Iterative inversion of the measurement map: starting from the time
 * reversal of the (optionally windowed) data, refine by
 *   f_{m+1} = f_m + timereversal(window(data) - window(trace of f_m)),
 * which sums the geometric series of the error operator. Iterates are kept
 * in the admissible source space (zero on the boundary ring and outside the
 * domain). Stops when the correction gradient norm falls below
 * tol * |f_0|, at max_iters, or after the correction norm has grown three
 * times in a row; in the growth case the iterate with the smallest
 * correction is returned and converged is false.
 *
 * cutoff may be null for raw, unwindowed data. truth, when given, fills the
 * per-iteration error column of the report.
 */
ReconstructionResult neumann_reconstruct(const Medium& medium, const BoundaryTrace& data,
                                         const Cutoff* cutoff, int max_iters, double tol,
                                         const ScalarField* truth = nullptr,
                                         double tol_elliptic = 1e-9);

struct ContinuityRow {
    double scale = 0.0;     ///< attenuation scale factor applied to the base profile
    double a_sup = 0.0;     ///< resulting sup of the attenuation
    double diff_hd = 0.0;   ///< gradient-norm difference from the zero-attenuation run
};

struct ContinuityTable {
    std::vector<ContinuityRow> rows;
    double fitted_slope = 0.0; ///< diff_hd / a_sup at the smallest nonzero scale
    double phantom_hd = 0.0;
};

/**
 * Error-operator continuity in the attenuation: apply the error operator to
 * one phantom under a family of media sharing geometry and sound speed, with
 * the attenuation profile scaled by each entry of `scales`, and tabulate the
 * gradient-norm distance to the zero-attenuation result.  The reference run
 * uses scale 0 and is computed independently of the rows, so a zero entry in
 * `scales` demonstrates bit-exact reproducibility.
 */
ContinuityTable continuity_experiment(const DomainGeometry& geo, const SoundSpeedSpec& cs,
                                      const AttenuationSpec& a_base,
                                      const std::vector<double>& scales,
                                      const Phantom& phantom, double T,
                                      double tol_elliptic = 1e-9);

struct StabilityRow {
    int index = 0;
    double f_hd = 0.0;
    double trace_h1 = 0.0;
    double ratio = 0.0; ///< f_hd / trace_h1
};

struct StabilityTable {
    std::vector<StabilityRow> rows;
    double max_ratio = 0.0;
};

/**
 * Empirical lower bound on the stability constant of the measurement map:
 * for each phantom, the ratio of its gradient norm to the discrete H1 norm
 * of its trace. The max ratio bounds from below any constant C with
 * |f| <= C |trace of f|.
 */
StabilityTable stability_probe(const Medium& medium, const std::vector<Phantom>& phantoms,
                               double T);

struct ReconstructionMetrics {
    double rel_hd = 0.0;
    double rel_l2 = 0.0;
    double support_rel_l2 = 0.0; ///< restricted to supp(truth) dilated by 2 samples
};

ReconstructionMetrics reconstruction_metrics(const ScalarField& f_hat,
                                             const ScalarField& truth,
                                             const DomainGeometry& geo);

/**
 * Injectivity floor: min over seeded random phantoms of the ratio of the
 * trace L2 norm to the phantom gradient norm. A floor bounded away from zero
 * across refinement is the empirical form of "zero data implies zero source".
 */
double measurement_floor(const Medium& medium, int n_phantoms, double T,
                         std::uint64_t seed0);

} // namespace tatrec

#endif
