#ifndef TATREC_GEOMETRY_HPP
#define TATREC_GEOMETRY_HPP

#include "tatrec/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tatrec {

enum class ShapeKind { Square, Disk };

/// Analytic description of the observation region Omega, axis-aligned and
/// strictly inside the computational box. `half` is the half side for the
/// square and the radius for the disk.
struct DomainShape {
    ShapeKind kind = ShapeKind::Square;
    double cx = 0.0;
    double cy = 0.0;
    double half = 0.0;

    /// Signed distance to the boundary: negative inside Omega.
    double signed_distance(double x, double y) const;

    /// Position along the boundary in [0,1). The disk uses the polar angle;
    /// the square walks the perimeter counterclockwise from the lower-left
    /// corner. Both parametrizations are proportional to arc length.
    double arc_position(double x, double y) const;

    double perimeter() const;
    double diameter() const;
};

/// One boundary sample: grid indices, unit outward normal, arc position.
struct BoundarySample {
    int i = 0;
    int j = 0;
    double normal_x = 0.0;
    double normal_y = 0.0;
    double arc = 0.0;
};

/// Grid realization of Omega. `interior_mask` marks samples strictly inside,
/// `gamma` is the ordered ring of boundary samples; together they cover the
/// sample set of the closed region. Every gamma sample has at least one
/// 4-neighbor in the interior and one outside the region.
struct DomainGeometry {
    Grid2D grid;
    DomainShape shape;
    std::vector<std::uint8_t> interior_mask;
    std::vector<BoundarySample> gamma;
    std::vector<std::uint8_t> gamma_prime_mask; // one flag per gamma entry
    double buffer_width = 0.0;                  // gamma-to-box-edge clearance
    // Arc interval defining the observed part of the boundary; empty means
    // the whole boundary is observed. May wrap through arc 0.
    std::optional<std::pair<double, double>> gamma_prime_arc;

    bool in_region(int i, int j) const; // interior or boundary sample
    std::size_t n_boundary() const { return gamma.size(); }
};

/// Rasterize Omega onto the grid and collect the boundary ring. For the
/// square, `half` is snapped to a whole number of grid cells so the ring
/// falls exactly on samples. `gamma_prime_arc`, if given, is the observed
/// arc [s0, s1) in arc units; s0 > s1 wraps through zero.
DomainGeometry build_geometry(const Grid2D& grid, ShapeKind kind, double half,
                              std::optional<std::pair<double, double>> gamma_prime_arc = {});

/// FNV-1a hash of the quantities that identify a geometry; boundary traces
/// record it so a trace cannot silently be replayed on the wrong setup.
std::uint64_t geometry_hash(const DomainGeometry& g);

std::string hash_string(std::uint64_t h);

/// True when `arc` lies in [s0, s1), treating the interval as wrapping when
/// s0 > s1.
bool arc_in_interval(double arc, double s0, double s1);

} // namespace tatrec

#endif
