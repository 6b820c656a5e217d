#include "tatrec/grid.hpp"
#include "tatrec/errors.hpp"

#include <cmath>
#include <string>

namespace tatrec {

Grid2D::Grid2D(int nx_, int ny_, double dx_, double ox, double oy)
    : nx(nx_), ny(ny_), dx(dx_), origin_x(ox), origin_y(oy) {
    if (nx < 3 || ny < 3)
        throw ConfigError("grid needs at least 3 samples per axis, got " +
                          std::to_string(nx) + "x" + std::to_string(ny));
    if (!(dx > 0.0) || !std::isfinite(dx))
        throw ConfigError("grid spacing must be positive and finite");
    if (!std::isfinite(ox) || !std::isfinite(oy))
        throw ConfigError("grid origin must be finite");
}

bool ScalarField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) {
        double a = std::fabs(v);
        if (a > m) m = a;
    }
    return m;
}

WaveState::WaveState(ScalarField u_, ScalarField v_) : u(std::move(u_)), v(std::move(v_)) {
    require_same_grid(u.grid, v.grid, "WaveState");
}

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* op) {
    if (a != b)
        throw ConfigError(std::string(op) + ": fields live on different grids");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "field addition");
    ScalarField r(a.grid);
    for (std::size_t k = 0; k < r.values.size(); ++k)
        r.values[k] = a.values[k] + b.values[k];
    return r;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "field subtraction");
    ScalarField r(a.grid);
    for (std::size_t k = 0; k < r.values.size(); ++k)
        r.values[k] = a.values[k] - b.values[k];
    return r;
}

ScalarField operator*(double s, const ScalarField& a) {
    ScalarField r(a.grid);
    for (std::size_t k = 0; k < r.values.size(); ++k)
        r.values[k] = s * a.values[k];
    return r;
}

} // namespace tatrec
