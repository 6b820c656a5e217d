#include "tatrec/operators.hpp"
#include "tatrec/errors.hpp"

#include <cmath>

namespace tatrec {

ScalarField laplacian(const ScalarField& f) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double inv_dx2 = 1.0 / (g.dx * g.dx);
    const double* v = f.values.data();
    double* o = out.values.data();
    for (int j = 1; j < g.ny - 1; ++j) {
        const std::size_t row = g.idx(0, j);
        for (int i = 1; i < g.nx - 1; ++i) {
            std::size_t k = row + i;
            o[k] = ((v[k + 1] + v[k - 1] + v[k + g.nx] + v[k - g.nx]) - 4.0 * v[k]) * inv_dx2;
        }
    }
    return out;
}

ScalarField gradient_sq(const ScalarField& f) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double inv_2dx = 1.0 / (2.0 * g.dx);
    const double* v = f.values.data();
    double* o = out.values.data();
    for (int j = 1; j < g.ny - 1; ++j) {
        const std::size_t row = g.idx(0, j);
        for (int i = 1; i < g.nx - 1; ++i) {
            std::size_t k = row + i;
            double gx = (v[k + 1] - v[k - 1]) * inv_2dx;
            double gy = (v[k + g.nx] - v[k - g.nx]) * inv_2dx;
            o[k] = gx * gx + gy * gy;
        }
    }
    return out;
}

double ordered_sum(const std::vector<double>& v) {
    double s = 0.0, comp = 0.0;
    for (double x : v) {
        double y = x - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

double masked_sum(const std::vector<double>& v, const std::vector<std::uint8_t>& mask) {
    if (v.size() != mask.size())
        throw ConfigError("mask length does not match field length");
    double s = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!mask[k]) continue;
        double y = v[k] - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

double masked_integral(const ScalarField& f, const std::vector<std::uint8_t>& mask) {
    return masked_sum(f.values, mask) * (f.grid.dx * f.grid.dx);
}

double hd_norm_sq(const ScalarField& f, const std::vector<std::uint8_t>& mask) {
    return masked_integral(gradient_sq(f), mask);
}

double l2c_norm_sq(const ScalarField& f, const ScalarField& c,
                   const std::vector<std::uint8_t>& mask) {
    require_same_grid(f.grid, c.grid, "l2c_norm");
    std::vector<double> w(f.values.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        double ck = c.values[k];
        w[k] = f.values[k] * f.values[k] / (ck * ck);
    }
    double s = masked_sum(w, mask);
    return s * (f.grid.dx * f.grid.dx);
}

double hd_norm(const ScalarField& f, const std::vector<std::uint8_t>& omega_mask,
               const std::vector<std::uint8_t>& boundary_ring) {
    double peak = f.max_abs();
    double worst = 0.0;
    for (std::size_t k = 0; k < boundary_ring.size(); ++k)
        if (boundary_ring[k]) worst = std::max(worst, std::fabs(f.values[k]));
    if (worst > 1e-12 * peak)
        throw NumericError("field does not vanish on the domain boundary; it has no "
                           "H_D norm (boundary peak " + std::to_string(worst) + ")");
    return std::sqrt(hd_norm_sq(f, omega_mask));
}

double l2c_norm(const ScalarField& f, const ScalarField& c,
                const std::vector<std::uint8_t>& mask) {
    return std::sqrt(l2c_norm_sq(f, c, mask));
}

double energy(const WaveState& state, const ScalarField& c,
              const std::vector<std::uint8_t>& mask) {
    require_same_grid(state.u.grid, c.grid, "energy");
    return 0.5 * (hd_norm_sq(state.u, mask) + l2c_norm_sq(state.v, c, mask));
}

double dirichlet_form(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "dirichlet_form");
    const Grid2D& g = a.grid;
    const double* pa = a.values.data();
    const double* pb = b.values.data();
    double s = 0.0, comp = 0.0;
    auto add = [&](double x) {
        double y = x - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    };
    for (int j = 0; j < g.ny; ++j) {
        const std::size_t row = g.idx(0, j);
        for (int i = 0; i < g.nx - 1; ++i) {
            std::size_t k = row + i;
            add((pa[k + 1] - pa[k]) * (pb[k + 1] - pb[k]));
        }
    }
    for (int j = 0; j < g.ny - 1; ++j) {
        const std::size_t row = g.idx(0, j);
        for (int i = 0; i < g.nx; ++i) {
            std::size_t k = row + i;
            add((pa[k + g.nx] - pa[k]) * (pb[k + g.nx] - pb[k]));
        }
    }
    return s; // the 1/dx^2 of the form and the dx^2 of the measure cancel
}

} // namespace tatrec
