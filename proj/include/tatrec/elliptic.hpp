#ifndef TATREC_ELLIPTIC_HPP
#define TATREC_ELLIPTIC_HPP

#include "tatrec/geometry.hpp"
#include "tatrec/grid.hpp"
#include "tatrec/medium.hpp"

#include <cstddef>

namespace tatrec {

/**
 * Outcome of an iterative elliptic solve.
 */
struct EllipticReport {
    int iterations = 0;
    double residual_norm = 0.0;   ///< Final |L phi|_2 over interior samples, 1/dx^2 scaling.
    double data_norm = 0.0;       ///< l2 norm of the boundary data vector.
    bool converged = false;
};

/**
 * Solve the discrete Laplace equation on the interior of the domain with
 * prescribed values on the boundary ring: find phi with the 5-point stencil
 * vanishing at every interior sample, phi = boundary_values on the ring, and
 * phi = 0 outside the domain.
 *
 * The solve is matrix-free conjugate gradients on the interior unknowns.  The
 * symmetric positive definite operator is the negated 5-point stencil with
 * ring samples held fixed; the right-hand side carries the boundary coupling.
 * Iteration stops once the interior Laplacian residual drops below
 * max(tol * |boundary_values|_2, 1e-14).
 *
 * boundary_values is indexed like geo.gamma.  max_iters <= 0 selects the
 * default budget of 10 * (nx + ny).  Throws NumericError, reporting the
 * achieved residual, if the iteration fails to converge within the budget.
 */
ScalarField harmonic_extension(const DomainGeometry& geo,
                               const std::vector<double>& boundary_values,
                               double tol = 1e-10, int max_iters = 0,
                               EllipticReport* report = nullptr);

/**
 * Largest eigenvalue of the inverse Dirichlet Laplacian weighted by 1/c^2,
 * computed by power iteration.  Its value bounds |w|^2_{L2,1/c^2} by
 * C_P |grad w|^2 for fields vanishing on the boundary ring, with the gradient
 * measured by the forward-difference Dirichlet form.
 *
 * For the unit square with c = 1 the exact constant is 1/(2 pi^2), which the
 * discrete value approaches from above as the grid refines.
 */
double poincare_constant(const DomainGeometry& geo, const Medium& medium,
                         double tol = 1e-10, int max_iters = 5000);

} // namespace tatrec

#endif
