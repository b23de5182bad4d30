#pragma once

#include <cstddef>
#include <vector>

#include "awm/params.hpp"

namespace awm {

// Gridded agent density P(w) tabulated on strictly increasing abscissae.
// Canonical form means n_total = w_total = 1; all solvers work there and
// scale_density maps to/from user-facing totals.
struct CanonicalDensity {
    std::vector<double> grid;    // strictly increasing wealth abscissae
    std::vector<double> density; // P values, nonnegative
    double support_lo = 0.0;     // lower support endpoint (= grid.front())
    double n_total = 1.0;        // total agent count represented
    double w_total = 1.0;        // total wealth represented

    std::size_t size() const { return grid.size(); }
};

// Cumulative potentials of a density, tabulated on its grid:
//   F  agent fraction below w            (1/N) int_{lo}^{w} P
//   A  agent fraction above w            1 - F
//   L  wealth fraction below w           (1/W) int_{lo}^{w} P x
//   B  half second moment below w        (1/N) int_{lo}^{w} P x^2/2
struct Potentials {
    std::vector<double> F, A, L, B;
};

// Drift and diffusivity sampled on a wealth grid.
struct DriftDiffusionField {
    std::vector<double> sigma; // drift
    std::vector<double> d;     // diffusivity, >= 0
};

// Trapezoid quadrature of the density's zeroth / first moments.
double measure_agents(const CanonicalDensity& p);
double measure_wealth(const CanonicalDensity& p);

// Throws DomainError if the grid is not strictly increasing, the density has
// negative values, or the measured moments differ from n_total/w_total by
// more than tol.
void validate_density(const CanonicalDensity& p, double tol = 1e-6);

// Cumulative trapezoid potentials, normalized by the measured moments so the
// endpoint identities F -> 1, L -> 1, A + F = 1 hold exactly on the grid.
Potentials compute_potentials(const CanonicalDensity& p);

// Exact scaling symmetry: from a canonical density to one with totals (n, w).
// The Lorenz curve is invariant under this map.
CanonicalDensity scale_density(const CanonicalDensity& p, double n, double w);

// Shift construction: `eysm` must be a kappa = 0 density with agent count 1
// and total wealth 1 + lambda. The grid is translated by -kappa * mu_bar so
// the output is canonical (N = W = 1) and supported on [-lambda, infinity).
CanonicalDensity shift_density(const CanonicalDensity& eysm, const ParameterVector& theta);

} // namespace awm
