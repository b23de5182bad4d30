#include "awm/params.hpp"

#include <cmath>

namespace awm {

double kappa_to_lambda(double kappa) {
    if (!(kappa >= 0.0) || !(kappa < 1.0))
        throw DomainError("kappa must lie in [0, 1), got " + std::to_string(kappa));
    return kappa / (1.0 - kappa);
}

double lambda_to_kappa(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw DomainError("lambda must be finite and nonnegative, got " + std::to_string(lambda));
    return lambda / (1.0 + lambda);
}

void ParameterVector::validate() const {
    if (!(chi > 0.0) || !std::isfinite(chi))
        throw DomainError("chi must be positive, got " + std::to_string(chi));
    if (!(zeta >= 0.0) || !std::isfinite(zeta))
        throw DomainError("zeta must be nonnegative, got " + std::to_string(zeta));
    if (!(kappa >= 0.0) || !(kappa < 1.0))
        throw DomainError("kappa must lie in [0, 1), got " + std::to_string(kappa));
    if (!(chi > kappa * zeta))
        throw DomainError("infeasible parameters: chi <= kappa*zeta leaves the "
                          "non-oligarchical wealth fraction nonpositive");
}

} // namespace awm
