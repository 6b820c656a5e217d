#ifndef TATREC_GEODESICS_HPP
#define TATREC_GEODESICS_HPP

#include "tatrec/grid.hpp"
#include "tatrec/medium.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace tatrec {

/// One traced ray of the travel-time metric. The covector is normalized so
/// that c^2 |xi|^2 stays at 1 along the path; the integration parameter is
/// then metric time, and `exit_time` is the travel time to the boundary.
struct GeodesicRecord {
    std::array<double, 2> start_x{};
    std::array<double, 2> start_xi{}; // after normalization
    std::vector<std::array<double, 2>> path;
    double exit_time = 0.0;   // first boundary crossing, or the cap when trapped
    double exit_arc = 0.0;    // boundary arc position of the crossing
    bool escaped = false;
    double max_h_drift = 0.0; // max |c^2 |xi|^2 - 1| seen along the path
};

struct RayOptions {
    double cap = 0.0;    // time budget; 0 selects 10 * metric diameter
    double dtau = 0.005; // upper bound on the step; half a grid cell also applies
    bool record_path = true;
};

/// Integrates the ray Hamiltonian system with classical fourth-order
/// Runge-Kutta steps. The boundary crossing is located by linear
/// interpolation of the signed distance, tightened by re-integrating partial
/// steps over the bracketing step.
GeodesicRecord trace_geodesic(const Medium& medium, std::array<double, 2> x,
                              std::array<double, 2> xi, const RayOptions& opt = {});

/// Travel time to the boundary: first-order fast marching for
/// |grad d| = 1/c with d = 0 on the boundary ring. Samples outside the
/// region hold 0.
ScalarField eikonal_distance(const Medium& medium);

struct CriticalTimes {
    double t0 = 0.0;           // longest sampled ray exit time
    double t0_refined = 0.0;   // doubled-direction extrapolation of t0
    double t1 = 0.0;           // largest travel time to the boundary
    double t2_direct = 0.0;    // pair min counting only first exits on the observed arc
    double t2_reflected = 0.0; // same, continuing unobserved exits by reflection
    double t2_one_way = 0.0;   // sup over single rays of the reflected arrival
    bool t0_trapped = false;     // some ray for t0 hit the cap
    bool t2_unreachable = false; // some ray never reached the observed arc in time
};

/// Estimates the critical times by sampling. Rays for t0 start on a
/// boundary lattice offset slightly inward, so near-diametral chords are
/// represented to within a cell; `point_samples` controls the
/// lattice density and every start is probed in `direction_samples` evenly
/// spaced directions plus the doubled set for the refinement estimate.
/// Rays for t2 start on the samples of `k_mask` (subsampled by `k_stride`,
/// paired with their opposites); the t2 fields are left at zero when the
/// mask is null. `direction_samples` must be even and at least 8.
CriticalTimes critical_times(const Medium& medium, int direction_samples = 64,
                             int point_samples = 64,
                             const std::vector<std::uint8_t>* k_mask = nullptr,
                             int k_stride = 4, double cap = 0.0);

/// Average over the two rays leaving (x, xi) and (x, -xi) of the window
/// value at their first boundary exit. A ray that never exits, or exits
/// after the window's final time, contributes zero; each term lies in
/// [0, 1/2].
double visibility_symbol(const Medium& medium, const Cutoff& cutoff,
                         std::array<double, 2> x, std::array<double, 2> xi,
                         double cap = 0.0);

/// Per masked grid sample, the minimum of visibility_symbol over
/// `directions` evenly spaced directions; other samples hold 0. Fewer than
/// 8 directions is rejected, as are masked samples outside the domain.
ScalarField visibility_map(const Medium& medium, const Cutoff& cutoff,
                           const std::vector<std::uint8_t>& k_mask, int directions,
                           double cap = 0.0);

} // namespace tatrec

#endif
