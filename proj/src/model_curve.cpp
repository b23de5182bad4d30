#include "awm/model_curve.hpp"

#include <cmath>
#include <string>

#include "awm/errors.hpp"

namespace awm {

std::uint64_t SolveCache::key(double chi, double zeta) {
    const auto a = static_cast<std::uint64_t>(std::llround(chi * 1e5));
    const auto b = static_cast<std::uint64_t>(std::llround(zeta * 1e5));
    return (a << 32) | (b & 0xffffffffULL);
}

std::shared_ptr<const LorenzCurve> SolveCache::find(double chi, double zeta) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = map_.find(key(chi, zeta));
    return it == map_.end() ? nullptr : it->second;
}

void SolveCache::store(double chi, double zeta, std::shared_ptr<const LorenzCurve> curve) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (map_.size() >= capacity_)
        map_.erase(map_.begin()); // capacity pressure: drop an arbitrary entry
    map_[key(chi, zeta)] = std::move(curve);
}

std::size_t SolveCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return map_.size();
}

namespace {

std::shared_ptr<const LorenzCurve> solve_curve(double chi, double zeta,
                                               const SolverConfig& solver, int resolution,
                                               SolveCache* cache) {
    if (cache) {
        auto hit = cache->find(chi, zeta);
        if (hit && hit->f.size() == static_cast<std::size_t>(resolution) + 1)
            return hit;
    }
    SolveOutcome outcome = solve_steady_subcritical(chi, zeta, solver);
    auto curve = std::make_shared<const LorenzCurve>(
        lorenz_from_density(outcome.density, resolution));
    if (cache)
        cache->store(chi, zeta, curve);
    return curve;
}

} // namespace

LorenzCurve eysm_lorenz(double chi, double zeta, const SolverConfig& solver, int resolution,
                        SolveCache* cache) {
    if (!(chi > 0.0))
        throw DomainError("chi must be positive");
    if (!(zeta >= 0.0))
        throw DomainError("zeta must be nonnegative");
    if (std::abs(zeta - chi) <= 1e-12 * std::max(chi, zeta))
        throw DomainError("critical point zeta = chi is not solvable; perturb the parameters");
    if (zeta < chi)
        return *solve_curve(chi, zeta, solver, resolution, cache);
    auto sub = solve_curve(zeta, chi, solver, resolution, cache);
    return dual_lorenz(*sub, chi, zeta);
}

LorenzCurve model_lorenz(const ParameterVector& theta, const SolverConfig& solver,
                         int resolution, SolveCache* cache) {
    theta.validate();
    LorenzCurve eysm = eysm_lorenz(theta.chi, theta.zeta, solver, resolution, cache);
    return awm_lorenz(eysm, theta);
}

CanonicalDensity model_density(const ParameterVector& theta, const SolverConfig& solver) {
    theta.validate();
    if (theta.supercritical())
        throw DomainError("supercritical density holds a condensate atom; only the Lorenz "
                          "curve is available (use duality)");
    SolveOutcome outcome = solve_steady_subcritical(theta.chi, theta.zeta, solver);
    if (theta.kappa == 0.0)
        return outcome.density;
    const double lambda = theta.lambda();
    CanonicalDensity stretched = scale_density(outcome.density, 1.0, 1.0 + lambda);
    return shift_density(stretched, theta);
}

} // namespace awm
