#pragma once

#include "awm/density.hpp"
#include "awm/lorenz.hpp"

namespace awm {

// Single-agent model: unary multiplicative transactions plus flat
// redistribution at rate chi. The steady state is closed-form, so this module
// doubles as an analytic baseline for the solvers.
struct SamParams {
    double chi = 0.0;
    double mu = 1.0; // mean wealth; 1 in canonical form
};

// Regularized upper incomplete gamma function Q(a, z) = Gamma(a, z)/Gamma(a).
// Series below the z = a + 1 crossover, Lentz continued fraction above it.
// Accurate to ~1e-13 relative, robust down to the small shape parameters
// a = 2*chi ~ 0.01 this model produces.
double reg_gamma_q(double a, double z);

// Inverse in z of Q(a, z) for q in (0, 1): Q(a, reg_gamma_q_inv(a, q)) = q.
// Bracketing in log z plus safeguarded Newton; tolerance 1e-12 on q.
double reg_gamma_q_inv(double a, double q);

// Steady-state agent density,
//   P(w) = (N/mu) (2chi)^{2chi} / Gamma(2chi) * (mu/w)^{2chi+2} e^{-2chi mu/w},
// supported on (0, inf), flat and depleted near 0, power-law ~ w^-(2chi+2)
// in the tail.
double sam_density(double w, const SamParams& p);

// Cumulative agent and wealth fractions, F(w) = Q(2chi+1, 2chi mu/w) and
// L(w) = Q(2chi, 2chi mu/w).
double sam_cumulative_agents(double w, const SamParams& p);
double sam_cumulative_wealth(double w, const SamParams& p);

// One-parameter Lorenz curve, l(f) = Q(2chi, Q^{-1}(2chi+1, f)).
double sam_lorenz(double f, double chi);

// The same curve tabulated on a uniform f-grid.
LorenzCurve sam_lorenz_curve(double chi, int resolution = 10000);

// Density tabulated on a log-spaced grid spanning [w_lo, w_hi]*mu, for
// quadrature pipelines; the closed form decays faster than any power at 0
// and as a fat power law at infinity, so log spacing is the natural choice.
CanonicalDensity sam_density_grid(const SamParams& p, double w_lo = 1e-6, double w_hi = 1e3,
                                  int n_points = 4000);

} // namespace awm
