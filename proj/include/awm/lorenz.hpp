#pragma once

#include <vector>

#include "awm/density.hpp"
#include "awm/params.hpp"

namespace awm {

// Piecewise-linear Lorenz curve: cumulative wealth fraction l versus
// cumulative agent fraction f, with f nondecreasing in [0, 1] and l(0) = 0.
// A supercritical curve intersects the right boundary below 1; the wealth
// fraction condensed into the oligarchy is carried by `terminal` rather than
// by grid mass (the condensate is an atom a grid cannot hold).
struct LorenzCurve {
    std::vector<double> f;
    std::vector<double> l;
    double terminal = 1.0;         // l value as f -> 1-
    bool is_supercritical = false; // terminal < 1

    // Linear interpolation between knots; clamps outside [f.front(), f.back()].
    double value_at(double fq) const;

    // Same curve resampled onto the uniform grid f_i = i/resolution.
    LorenzCurve resampled(int resolution) const;
};

// Builds (F(w), L(w)) parametrically from a density and resamples onto a
// uniform f-grid. The result is subcritical by construction (terminal 1).
LorenzCurve lorenz_from_density(const CanonicalDensity& p, int resolution = 10000);

// Recovers the classical density behind a subcritical, concave-up curve:
// w(f) = (w/n) dl/df, inverted to F(w), differentiated to P. Supercritical
// input is rejected (the oligarchy atom is not a classical density).
CanonicalDensity density_from_lorenz(const LorenzCurve& curve, double n, double w);

// Gini coefficient G = 1 - 2 int_0^1 l df, trapezoid over the knots. Handles
// negative dips and supercritical termination uniformly; the vertical
// boundary segment at f = 1 has zero measure. Can exceed 1 when the negative
// dip is large enough.
double gini(const LorenzCurve& curve);

// Gini evaluated directly from the density, G = 1 - (2/W) int P(w) A(w) w dw.
// Only valid on nonnegative support; agrees with gini(lorenz_from_density)
// there.
double gini_density_form(const CanonicalDensity& p);

// Duality: the supercritical curve at <chi, zeta> (zeta > chi) is the
// subcritical curve at swapped parameters scaled by chi/zeta, terminating at
// chi/zeta instead of 1.
LorenzCurve dual_lorenz(const LorenzCurve& sub, double chi, double zeta);

// Affine shift on curves: l_awm(f) = (1+lambda) l_eysm(f) - lambda f.
// `eysm` must already be duality-resolved when supercritical.
LorenzCurve awm_lorenz(const LorenzCurve& eysm, const ParameterVector& theta);

// Wealth fraction held by the oligarchy, (1+lambda)(1 - chi/zeta) when
// supercritical, 0 otherwise.
double oligarchy_fraction(const ParameterVector& theta);

} // namespace awm
