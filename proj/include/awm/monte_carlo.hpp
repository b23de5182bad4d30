#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "awm/lorenz.hpp"
#include "awm/params.hpp"

namespace awm {

enum class ModelKind { Sam, Eysm, Awm };

struct SimConfig {
    int n_agents = 10000;
    double dt = 0.01;     // transactional time step; a sweep advances dt
    long sweeps = 100000; // total simulated time = sweeps * dt
    std::uint64_t seed = 1;
    ParameterVector theta;
    ModelKind model = ModelKind::Eysm;

    void validate() const;
};

struct WealthEnsemble {
    std::vector<double> wealths;
    double time = 0.0;
    std::uint64_t seed = 0;
    long clamp_events = 0; // coin-bias saturations |b| > 1 seen during the run
};

struct PairStep {
    double w = 0.0;
    double x = 0.0;
    bool clamped = false;
};

// One binary transaction: the stake is sqrt(dt) times the poorer agent's
// wealth, moved by a +-1 coin with mean zeta*sqrt(dt)*(w - x)/mu_bar (clamped
// to [-1, 1]). Conserves w + x exactly.
PairStep eysm_pair_step(double w, double x, double zeta, double mu_bar, double dt,
                        std::mt19937_64& rng);

// Flat tax: every agent moves toward the current mean, w += chi*dt*(mu - w).
// Redistributes exactly what it collects.
void redistribute_sweep(std::vector<double>& wealths, double chi, double dt);

// Runs the configured process from an equal-wealth canonical start.
// A sweep is n/2 random independent pairs (or n unary steps for the
// single-agent model) followed by one redistribution; deterministic per seed.
// The affine model runs the same pair dynamics on shifted wealths w + lambda.
WealthEnsemble run(const SimConfig& cfg);

// Cumulative population/wealth ordinates of the sorted ensemble at uniform
// agent weights, wrapped as a piecewise-linear curve.
LorenzCurve empirical_lorenz(const WealthEnsemble& ensemble);

// Wealth share of the richest `fraction` of agents (at least one agent);
// the condensation diagnostic for supercritical runs, where a finite
// ensemble keeps its oligarchy in the top few agents.
double top_wealth_share(const WealthEnsemble& ensemble, double fraction = 1e-3);

} // namespace awm
