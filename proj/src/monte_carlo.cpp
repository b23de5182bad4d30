#include "awm/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "awm/errors.hpp"

namespace awm {

void SimConfig::validate() const {
    if (n_agents < 2)
        throw DomainError("simulation needs at least 2 agents");
    if (!(dt > 0.0) || !(dt <= 1.0))
        throw DomainError("simulation dt must lie in (0, 1]");
    if (sweeps < 1)
        throw DomainError("simulation needs at least one sweep");
    if (model == ModelKind::Awm) {
        theta.validate();
        return;
    }
    // The stochastic process itself is fine at chi = 0 (untaxed condensation
    // runs), so simulation is laxer than the steady-state parameter contract.
    if (!(theta.chi >= 0.0) || !(theta.zeta >= 0.0))
        throw DomainError("simulation needs chi >= 0 and zeta >= 0");
    if (theta.kappa != 0.0)
        throw DomainError("kappa applies only to the affine model");
}

PairStep eysm_pair_step(double w, double x, double zeta, double mu_bar, double dt,
                        std::mt19937_64& rng) {
    if (!(w > 0.0) || !(x > 0.0))
        throw DomainError("pair step requires positive (shifted) wealths");
    const double sqdt = std::sqrt(dt);
    double bias = zeta * sqdt * (w - x) / mu_bar;
    bool clamped = false;
    if (bias > 1.0) {
        bias = 1.0;
        clamped = true;
    } else if (bias < -1.0) {
        bias = -1.0;
        clamped = true;
    }
    const double p_up = 0.5 * (1.0 + bias);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double eta = (unif(rng) < p_up) ? 1.0 : -1.0;
    const double dwealth = sqdt * std::min(w, x) * eta;
    const double w_new = w + dwealth;
    return PairStep{w_new, (w + x) - w_new, clamped}; // pair total is conserved exactly
}

void redistribute_sweep(std::vector<double>& wealths, double chi, double dt) {
    const double mu = std::accumulate(wealths.begin(), wealths.end(), 0.0) /
                      static_cast<double>(wealths.size());
    const double rate = chi * dt;
    for (double& w : wealths)
        w += rate * (mu - w);
}

WealthEnsemble run(const SimConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_agents;
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);
    const double zeta = cfg.theta.zeta;
    const double chi = cfg.theta.chi;
    const double shift = (cfg.model == ModelKind::Awm) ? cfg.theta.lambda() : 0.0;

    WealthEnsemble ens;
    ens.seed = cfg.seed;
    ens.wealths.assign(static_cast<std::size_t>(n), 1.0);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto& w = ens.wealths;
    const long pair_steps = n / 2;

    for (long sweep = 0; sweep < cfg.sweeps; ++sweep) {
        if (cfg.model == ModelKind::Sam) {
            for (int i = 0; i < n; ++i) {
                const double eta = (unif(rng) < 0.5) ? 1.0 : -1.0;
                w[static_cast<std::size_t>(i)] += sqdt * w[static_cast<std::size_t>(i)] * eta;
            }
        } else {
            // Shifted mean is conserved by pair exchanges; recompute the mean
            // once per sweep for the bias denominator.
            const double mu = std::accumulate(w.begin(), w.end(), 0.0) / n;
            const double mu_bar = mu + shift;
            for (long t = 0; t < pair_steps; ++t) {
                int i = pick(rng);
                int j = pick(rng);
                while (j == i)
                    j = pick(rng);
                double wi = w[static_cast<std::size_t>(i)] + shift;
                double xj = w[static_cast<std::size_t>(j)] + shift;
                double bias = zeta * sqdt * (wi - xj) / mu_bar;
                if (bias > 1.0) {
                    bias = 1.0;
                    ++ens.clamp_events;
                } else if (bias < -1.0) {
                    bias = -1.0;
                    ++ens.clamp_events;
                }
                const double eta = (unif(rng) < 0.5 * (1.0 + bias)) ? 1.0 : -1.0;
                const double dwealth = sqdt * std::min(wi, xj) * eta;
                const double pair_total =
                    w[static_cast<std::size_t>(i)] + w[static_cast<std::size_t>(j)];
                w[static_cast<std::size_t>(i)] += dwealth;
                w[static_cast<std::size_t>(j)] = pair_total - w[static_cast<std::size_t>(i)];
            }
        }
        redistribute_sweep(w, chi, dt);
    }
    ens.time = static_cast<double>(cfg.sweeps) * dt;
    return ens;
}

double top_wealth_share(const WealthEnsemble& ensemble, double fraction) {
    if (ensemble.wealths.empty())
        throw DomainError("empty ensemble");
    if (!(fraction > 0.0) || !(fraction <= 1.0))
        throw DomainError("fraction must lie in (0, 1]");
    std::vector<double> sorted = ensemble.wealths;
    std::sort(sorted.begin(), sorted.end());
    const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    if (!(total > 0.0))
        throw DomainError("ensemble total wealth is nonpositive");
    const std::size_t count = std::max<std::size_t>(
        1, static_cast<std::size_t>(fraction * static_cast<double>(sorted.size())));
    double top = 0.0;
    for (std::size_t i = sorted.size() - count; i < sorted.size(); ++i)
        top += sorted[i];
    return top / total;
}

LorenzCurve empirical_lorenz(const WealthEnsemble& ensemble) {
    const std::size_t n = ensemble.wealths.size();
    if (n < 2)
        throw DomainError("ensemble too small for a Lorenz curve");
    std::vector<double> sorted = ensemble.wealths;
    std::sort(sorted.begin(), sorted.end());
    const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    if (!(total > 0.0))
        throw DomainError("ensemble total wealth is nonpositive; Lorenz curve is degenerate");

    LorenzCurve curve;
    curve.f.resize(n + 1);
    curve.l.resize(n + 1);
    curve.f[0] = 0.0;
    curve.l[0] = 0.0;
    double cum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cum += sorted[j];
        curve.f[j + 1] = static_cast<double>(j + 1) / static_cast<double>(n);
        curve.l[j + 1] = cum / total;
    }
    curve.f.back() = 1.0;
    curve.l.back() = 1.0;
    curve.terminal = 1.0;
    curve.is_supercritical = false;
    return curve;
}

} // namespace awm
