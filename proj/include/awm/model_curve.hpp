#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "awm/fp_solver.hpp"
#include "awm/lorenz.hpp"
#include "awm/params.hpp"

namespace awm {

// Memo for solved canonical subcritical curves, keyed by (chi, zeta) rounded
// to 5 decimals so a parameter sweep re-solves each pair once. Concurrent
// lookups/insertions are serialized by a mutex; duplicate inserts are
// harmless because solves are deterministic.
class SolveCache {
public:
    explicit SolveCache(std::size_t capacity = 4096) : capacity_(capacity) {}

    std::shared_ptr<const LorenzCurve> find(double chi, double zeta) const;
    void store(double chi, double zeta, std::shared_ptr<const LorenzCurve> curve);
    std::size_t size() const;

    static std::uint64_t key(double chi, double zeta);

private:
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, std::shared_ptr<const LorenzCurve>> map_;
};

// Canonical EYSM Lorenz curve at (chi, zeta), on the uniform f-grid with
// `resolution` intervals. Supercritical parameters are reduced to the
// swapped subcritical solve and rescaled (the duality route); the solve is
// memoized in `cache` when one is supplied.
LorenzCurve eysm_lorenz(double chi, double zeta, const SolverConfig& solver, int resolution,
                        SolveCache* cache = nullptr);

// Full reduction for an AWM parameter vector: shift out kappa, resolve
// criticality by duality, solve the canonical subcritical problem, and map
// the curve back through the affine transform.
LorenzCurve model_lorenz(const ParameterVector& theta, const SolverConfig& solver,
                         int resolution, SolveCache* cache = nullptr);

// The classical (non-oligarchical) agent density behind a subcritical theta,
// mapped back to canonical AWM coordinates on [-lambda, infinity). Throws
// DomainError for supercritical theta, where the condensate is an atom.
CanonicalDensity model_density(const ParameterVector& theta, const SolverConfig& solver);

} // namespace awm
