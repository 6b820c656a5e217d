#ifndef TATREC_GRID_HPP
#define TATREC_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tatrec {

/// Uniform rectangular sample grid with equal spacing in x and y.
/// Sample (i, j) sits at (origin_x + i*dx, origin_y + j*dx); storage of any
/// field on the grid is row-major with j (the y index) as the slow index.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double origin_x = 0.0;
    double origin_y = 0.0;

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double dx_, double ox, double oy);

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    double x(int i) const { return origin_x + i * dx; }
    double y(int j) const { return origin_y + j * dx; }
    double extent_x() const { return (nx - 1) * dx; }
    double extent_y() const { return (ny - 1) * dx; }

    // Fields on two grids are interoperable only under exact parameter match.
    bool operator==(const Grid2D& o) const {
        return nx == o.nx && ny == o.ny && dx == o.dx &&
               origin_x == o.origin_x && origin_y == o.origin_y;
    }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

/// One real value per grid sample.
struct ScalarField {
    Grid2D grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    double& at(int i, int j) { return values[grid.idx(i, j)]; }
    double at(int i, int j) const { return values[grid.idx(i, j)]; }

    bool all_finite() const;
    double max_abs() const;
};

/// Position/velocity pair of the evolving wave, on one common grid.
struct WaveState {
    ScalarField u; // displacement
    ScalarField v; // time derivative of the displacement

    WaveState() = default;
    WaveState(ScalarField u_, ScalarField v_);
};

// Elementwise arithmetic; grids must match exactly.
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* op);

} // namespace tatrec

#endif
