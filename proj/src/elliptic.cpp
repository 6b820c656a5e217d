#include "tatrec/elliptic.hpp"
#include "tatrec/errors.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace tatrec {

namespace {

/**
 * Index maps between the full grid and the vector of interior unknowns.
 */
struct InteriorMap {
    std::vector<std::size_t> full_of;          ///< unknown index -> full-grid index
    std::vector<std::ptrdiff_t> unknown_of;    ///< full-grid index -> unknown index or -1
};

InteriorMap build_interior_map(const DomainGeometry& geo) {
    InteriorMap m;
    m.unknown_of.assign(geo.grid.size(), -1);
    for (int j = 0; j < geo.grid.ny; ++j)
        for (int i = 0; i < geo.grid.nx; ++i) {
            std::size_t k = geo.grid.idx(i, j);
            if (geo.interior_mask[k]) {
                m.unknown_of[k] = static_cast<std::ptrdiff_t>(m.full_of.size());
                m.full_of.push_back(k);
            }
        }
    return m;
}

/**
 * y = A x where A is the negated 5-point stencil restricted to interior
 * unknowns: (A x)_k = 4 x_k - sum of interior neighbors.  Ring and exterior
 * samples contribute nothing; their coupling lives in the right-hand side.
 * Scaled this way A is symmetric positive definite with O(1) entries.
 */
void apply_stencil(const DomainGeometry& geo, const InteriorMap& map,
                   const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t stride = static_cast<std::size_t>(geo.grid.nx);
    for (std::size_t u = 0; u < map.full_of.size(); ++u) {
        std::size_t k = map.full_of[u];
        double acc = 4.0 * x[u];
        std::size_t nb[4] = {k - 1, k + 1, k - stride, k + stride};
        for (std::size_t n : nb) {
            std::ptrdiff_t un = map.unknown_of[n];
            if (un >= 0) acc -= x[static_cast<std::size_t>(un)];
        }
        y[u] = acc;
    }
}

double dot_kahan(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double y = a[k] * b[k] - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

/**
 * Conjugate gradients for A x = b on the interior unknowns.  Convergence is
 * declared on the recurrence residual and then confirmed against the true
 * residual; a disagreement restarts the iteration from the true residual.
 */
int cg_interior(const DomainGeometry& geo, const InteriorMap& map,
                const std::vector<double>& b, std::vector<double>& x, double abs_tol,
                int max_iters, double& final_residual) {
    const std::size_t n = map.full_of.size();
    std::vector<double> r(n), p(n), ap(n);

    apply_stencil(geo, map, x, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
    p = r;
    double rr = dot_kahan(r, r);
    int iters = 0;

    while (iters < max_iters) {
        if (std::sqrt(rr) <= abs_tol) {
            apply_stencil(geo, map, x, ap);
            for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
            double true_rr = dot_kahan(r, r);
            if (std::sqrt(true_rr) <= abs_tol) {
                final_residual = std::sqrt(true_rr);
                return iters;
            }
            p = r;
            rr = true_rr;
        }
        apply_stencil(geo, map, p, ap);
        double pap = dot_kahan(p, ap);
        if (!(pap > 0.0))
            throw NumericError("elliptic solve lost positive definiteness");
        double alpha = rr / pap;
        for (std::size_t k = 0; k < n; ++k) x[k] += alpha * p[k];
        for (std::size_t k = 0; k < n; ++k) r[k] -= alpha * ap[k];
        double rr_new = dot_kahan(r, r);
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
        ++iters;
    }
    final_residual = std::sqrt(rr);
    return iters;
}

} // namespace

ScalarField harmonic_extension(const DomainGeometry& geo,
                               const std::vector<double>& boundary_values, double tol,
                               int max_iters, EllipticReport* report) {
    if (boundary_values.size() != geo.gamma.size())
        throw ConfigError("boundary data size does not match the boundary ring");

    InteriorMap map = build_interior_map(geo);
    const std::size_t n = map.full_of.size();
    const std::size_t stride = static_cast<std::size_t>(geo.grid.nx);

    // Scatter the ring data so neighbor lookups can read it directly.
    std::vector<double> ring(geo.grid.size(), 0.0);
    for (std::size_t s = 0; s < geo.gamma.size(); ++s)
        ring[geo.grid.idx(geo.gamma[s].i, geo.gamma[s].j)] = boundary_values[s];

    std::vector<double> b(n, 0.0);
    std::vector<std::uint8_t> is_ring(geo.grid.size(), 0);
    for (const auto& bs : geo.gamma) is_ring[geo.grid.idx(bs.i, bs.j)] = 1;
    for (std::size_t u = 0; u < n; ++u) {
        std::size_t k = map.full_of[u];
        std::size_t nb[4] = {k - 1, k + 1, k - stride, k + stride};
        for (std::size_t m : nb)
            if (is_ring[m]) b[u] += ring[m];
    }

    if (max_iters <= 0) max_iters = 10 * (geo.grid.nx + geo.grid.ny);
    if (!(tol > 0.0)) throw ConfigError("elliptic tolerance must be positive");

    // The convergence target is stated for the 1/dx^2-scaled Laplacian
    // residual against the plain l2 norm of the boundary data; the stencil
    // system the iteration sees is dx^2 times that residual.
    const double dx2 = geo.grid.dx * geo.grid.dx;
    double data_norm = std::sqrt(dot_kahan(boundary_values, boundary_values));
    double abs_tol = std::max(tol * data_norm, 1e-14) * dx2;

    std::vector<double> x(n, 0.0);
    double final_residual = 0.0;
    int iters = cg_interior(geo, map, b, x, abs_tol, max_iters, final_residual);

    bool converged = final_residual <= abs_tol;
    if (report) {
        report->iterations = iters;
        report->residual_norm = final_residual / dx2;
        report->data_norm = data_norm;
        report->converged = converged;
    }
    if (!converged)
        throw NumericError("elliptic solve did not converge: laplacian residual " +
                           std::to_string(final_residual / dx2) + " after " +
                           std::to_string(iters) + " iterations");

    ScalarField phi(geo.grid, 0.0);
    for (std::size_t u = 0; u < n; ++u) phi.values[map.full_of[u]] = x[u];
    for (std::size_t s = 0; s < geo.gamma.size(); ++s)
        phi.values[geo.grid.idx(geo.gamma[s].i, geo.gamma[s].j)] = boundary_values[s];
    return phi;
}

double poincare_constant(const DomainGeometry& geo, const Medium& medium, double tol,
                         int max_iters) {
    require_same_grid(geo.grid, medium.c.grid, "poincare_constant");
    InteriorMap map = build_interior_map(geo);
    const std::size_t n = map.full_of.size();
    if (n == 0) throw ConfigError("domain has no interior samples");

    const double dx2 = geo.grid.dx * geo.grid.dx;
    std::vector<double> mass(n);
    for (std::size_t u = 0; u < n; ++u)
        mass[u] = medium.inv_c2.values[map.full_of[u]] * dx2;

    // Deterministic start vector with no special symmetry.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::vector<double> z(n);
    for (auto& v : z) v = ((rng() >> 11) * 0x1.0p-53) - 0.5;

    auto m_norm = [&](const std::vector<double>& v) {
        double s = 0.0, comp = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            double y = mass[k] * v[k] * v[k] - comp;
            double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        return std::sqrt(s);
    };

    std::vector<double> rhs(n), az(n);
    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        double nz = m_norm(z);
        if (!(nz > 0.0)) throw NumericError("power iteration collapsed to zero");
        for (auto& v : z) v /= nz;

        for (std::size_t u = 0; u < n; ++u) rhs[u] = mass[u] * z[u];
        std::vector<double> w(n, 0.0);
        double resid = 0.0;
        double rhs_norm = std::sqrt(dot_kahan(rhs, rhs));
        cg_interior(geo, map, rhs, w, std::max(1e-12 * rhs_norm, 1e-16), 200000, resid);

        // Rayleigh quotient z^T M z / z^T A z evaluated at the new iterate.
        // The stencil form z^T A z equals the forward-difference Dirichlet
        // form because the measure's dx^2 cancels the gradient's 1/dx^2.
        apply_stencil(geo, map, w, az);
        double num = 0.0, comp = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double y = mass[k] * w[k] * w[k] - comp;
            double t = num + y;
            comp = (t - num) - y;
            num = t;
        }
        double den = dot_kahan(w, az);
        if (!(den > 0.0)) throw NumericError("power iteration lost definiteness");
        double lambda_new = num / den;
        if (it > 0 && std::fabs(lambda_new - lambda) <= tol * std::fabs(lambda_new))
            return lambda_new;
        lambda = lambda_new;
        z = w;
    }
    throw NumericError("power iteration for the embedding constant did not converge");
}

} // namespace tatrec
