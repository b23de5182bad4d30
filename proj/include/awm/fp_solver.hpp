#pragma once

#include "awm/density.hpp"

namespace awm {

struct SolverConfig {
    double w_max = 50.0;       // upper grid cutoff, mean-wealth units
    int n_cells = 512;         // grid resolution
    double dt = 0.1;           // pseudo-time step cap; the stability bound may shrink it
    double tol_residual = 8e-4; // steady-state residual threshold (L1)
    long max_steps = 4000000;  // iteration cap
    double grading = 2.0;      // mesh stretch exponent; cells cluster near w = 0
                               // where the density develops its sharp peak (1 = uniform)

    void validate() const; // w_max >= 10, n_cells >= 256, dt > 0, tol > 0, grading >= 1
};

struct SolveOutcome {
    CanonicalDensity density;
    double residual = 0.0;     // steady-state residual at exit
    long steps = 0;            // pseudo-time iterations used
    double mass_drift = 0.0;   // |N - 1| at convergence
    double wealth_drift = 0.0; // |W - 1| at convergence
    double max_mass_drift = 0.0;   // worst |N - 1| seen over all steps
    double max_wealth_drift = 0.0; // worst |W - 1| seen over all steps
    double tail_mass = 0.0;    // trapezoid mass in the last grid cell
    double w_max_used = 0.0;   // cutoff after any automatic doubling
};

// Drift and diffusivity of the wealth-exchange Fokker-Planck equation in
// transactional units:
//   sigma = chi (mu - w) - zeta [ 2 (N/W)(B - w^2 A / 2) + (1 - 2L) w ]
//   d     = B + w^2 A / 2
// for a canonical kappa = 0 density on [0, w_max].
DriftDiffusionField assemble_coefficients(const CanonicalDensity& p, const Potentials& pot,
                                          double chi, double zeta);

// L1 norm over the grid of the steady-state balance
//   d/dw[(B + w^2 A/2) P] - chi (mu - w) P
//     + 2 zeta [ (N/W)(B - w^2 A/2) + (1/2 - L) w ] P,
// centered differences inside, one-sided at the ends. Zero at a steady state.
double steady_state_residual(const CanonicalDensity& p, const Potentials& pot,
                             double chi, double zeta);

// Relaxes the subcritical canonical steady-state problem (0 <= zeta < chi) by
// conservative pseudo-time marching: Peclet-weighted upwind drift flux,
// centered diffusion flux, potentials recomputed from the iterate each step,
// zero-flux boundaries. Both discrete moments are conserved to round-off.
//
// Throws DomainError for zeta >= chi (resolve via duality first) and
// ConvergenceError when max_steps is exhausted above tolerance.
SolveOutcome solve_steady_subcritical(double chi, double zeta, const SolverConfig& cfg = {});

} // namespace awm
