#ifndef TATREC_STEPPER_DETAIL_HPP
#define TATREC_STEPPER_DETAIL_HPP

#include "tatrec/grid.hpp"
#include "tatrec/medium.hpp"

namespace tatrec {
namespace detail {

/// 5-point stencil into a preallocated field, zero at the box edge. The
/// expression shape matches laplacian() in the operators module so the two
/// agree bit for bit.
inline void stencil_into(const ScalarField& f, ScalarField& out) {
    const Grid2D& g = f.grid;
    const double inv_dx2 = 1.0 / (g.dx * g.dx);
    const std::size_t nx = static_cast<std::size_t>(g.nx);
    const double* v = f.values.data();
    double* o = out.values.data();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::size_t k = g.idx(i, j);
            if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) {
                o[k] = 0.0;
                continue;
            }
            o[k] = ((v[k + 1] + v[k - 1] + v[k + nx] + v[k - nx]) - 4.0 * v[k]) * inv_dx2;
        }
}

/// One forward step of the damped leapfrog rule,
///   u_next = (2 u - (1 - a dt/2) u_prev + dt^2 c^2 L u) / (1 + a dt/2),
/// with L u supplied in `lap`.
inline void forward_step_into(const Medium& m, double dt, const ScalarField& u_prev,
                              const ScalarField& u, const ScalarField& lap,
                              ScalarField& u_next) {
    const double dt2 = dt * dt;
    const double half_dt = 0.5 * dt;
    const std::size_t n = u.values.size();
    for (std::size_t k = 0; k < n; ++k) {
        double alpha = m.a.values[k] * half_dt;
        double c2 = m.c.values[k] * m.c.values[k];
        u_next.values[k] = (2.0 * u.values[k] - (1.0 - alpha) * u_prev.values[k] +
                            dt2 * c2 * lap.values[k]) /
                           (1.0 + alpha);
    }
}

/// One backward step of the same rule solved for the earlier level,
///   v_prev = (2 v - (1 + a dt/2) v_next + dt^2 c^2 L v) / (1 - a dt/2),
/// so that a backward sweep through a forward trajectory reproduces it
/// exactly. Requires a dt/2 < 1.
inline void backward_step_into(const Medium& m, double dt, const ScalarField& v_next,
                               const ScalarField& v, const ScalarField& lap,
                               ScalarField& v_prev) {
    const double dt2 = dt * dt;
    const double half_dt = 0.5 * dt;
    const std::size_t n = v.values.size();
    for (std::size_t k = 0; k < n; ++k) {
        double alpha = m.a.values[k] * half_dt;
        double c2 = m.c.values[k] * m.c.values[k];
        v_prev.values[k] = (2.0 * v.values[k] - (1.0 + alpha) * v_next.values[k] +
                            dt2 * c2 * lap.values[k]) /
                           (1.0 - alpha);
    }
}

} // namespace detail
} // namespace tatrec

#endif
