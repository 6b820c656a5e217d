#ifndef TATREC_OPERATORS_HPP
#define TATREC_OPERATORS_HPP

#include "tatrec/grid.hpp"

#include <cstdint>
#include <vector>

namespace tatrec {

/// 5-point discrete Laplacian. Box-edge samples are set to zero; every solver
/// in this project imposes homogeneous Dirichlet data there.
ScalarField laplacian(const ScalarField& f);

/// Squared gradient magnitude from centered differences; zero on the box edge.
ScalarField gradient_sq(const ScalarField& f);

/// Compensated (Kahan) sum in fixed row-major order. All reductions in the
/// library go through these two so results are reproducible bit for bit.
double ordered_sum(const std::vector<double>& v);
double masked_sum(const std::vector<double>& v, const std::vector<std::uint8_t>& mask);

/// Integral of f over the masked samples, midpoint rule (sum times dx^2).
double masked_integral(const ScalarField& f, const std::vector<std::uint8_t>& mask);

/// Squared seminorm  sum_mask |grad f|^2 dx^2.
double hd_norm_sq(const ScalarField& f, const std::vector<std::uint8_t>& mask);

/// Squared weighted norm  sum_mask c^-2 f^2 dx^2.
double l2c_norm_sq(const ScalarField& f, const ScalarField& c,
                   const std::vector<std::uint8_t>& mask);

/// H_D norm of an initial-pressure candidate: sqrt(hd_norm_sq). The field
/// must vanish on and outside the domain boundary; values on the boundary
/// ring larger than 1e-12 of the field maximum are rejected.
double hd_norm(const ScalarField& f, const std::vector<std::uint8_t>& omega_mask,
               const std::vector<std::uint8_t>& boundary_ring);

double l2c_norm(const ScalarField& f, const ScalarField& c,
                const std::vector<std::uint8_t>& mask);

/// Wave energy over the masked region,
///   E = 1/2 ( sum |grad u|^2 + sum c^-2 v^2 ) dx^2.
/// Computed as 0.5*(hd_norm_sq + l2c_norm_sq) so the three reductions stay
/// bitwise consistent with each other.
double energy(const WaveState& state, const ScalarField& c,
              const std::vector<std::uint8_t>& mask);

/// Dirichlet form  sum (forward differences of a) . (forward differences of b),
/// the quadratic form of the 5-point Laplacian with box-edge Dirichlet data.
/// Used for the conserved step energy of the leapfrog stepper.
double dirichlet_form(const ScalarField& a, const ScalarField& b);

} // namespace tatrec

#endif
