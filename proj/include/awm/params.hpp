#pragma once

#include <string>

#include "awm/errors.hpp"

namespace awm {

// Shift fraction kappa of the shifted mean wealth <-> additive shift in units
// of the true mean wealth, lambda = kappa / (1 - kappa).
double kappa_to_lambda(double kappa);
double lambda_to_kappa(double lambda);

// Model parameters <chi, zeta, kappa> identifying one affine-wealth-model
// instance. chi is the flat redistribution rate per transactional time unit,
// zeta the wealth-attained-advantage coefficient, kappa the affine shift
// fraction. lambda is always derived, never stored.
struct ParameterVector {
    double chi = 0.0;
    double zeta = 0.0;
    double kappa = 0.0;

    double lambda() const { return kappa_to_lambda(kappa); }
    bool supercritical() const { return zeta > chi; }

    // chi > 0, zeta >= 0, 0 <= kappa < 1, and chi > kappa*zeta so the
    // non-oligarchical wealth fraction stays positive.
    void validate() const;
};

inline ParameterVector make_params(double chi, double zeta = 0.0, double kappa = 0.0) {
    ParameterVector theta{chi, zeta, kappa};
    theta.validate();
    return theta;
}

} // namespace awm
