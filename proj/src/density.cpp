#include "awm/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace awm {

namespace {

// Cumulative trapezoid of f(x)*weight over the grid, starting at 0.
std::vector<double> cumtrapz(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return out;
}

} // namespace

double measure_agents(const CanonicalDensity& p) {
    double total = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i)
        total += 0.5 * (p.grid[i] - p.grid[i - 1]) * (p.density[i] + p.density[i - 1]);
    return total;
}

double measure_wealth(const CanonicalDensity& p) {
    double total = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i)
        total += 0.5 * (p.grid[i] - p.grid[i - 1]) *
                 (p.density[i] * p.grid[i] + p.density[i - 1] * p.grid[i - 1]);
    return total;
}

void validate_density(const CanonicalDensity& p, double tol) {
    if (p.grid.size() < 2 || p.grid.size() != p.density.size())
        throw DomainError("density needs matching grid/value arrays with at least 2 points");
    for (std::size_t i = 1; i < p.grid.size(); ++i)
        if (!(p.grid[i] > p.grid[i - 1]))
            throw DomainError("density grid must be strictly increasing (index " +
                              std::to_string(i) + ")");
    for (double v : p.density)
        if (!(v >= 0.0))
            throw DomainError("density values must be nonnegative");
    if (std::abs(p.support_lo - p.grid.front()) > 1e-12 * (1.0 + std::abs(p.support_lo)))
        throw DomainError("support_lo must equal the first grid point");
    if (std::abs(measure_agents(p) - p.n_total) > tol)
        throw DomainError("density does not integrate to n_total within tolerance");
    if (std::abs(measure_wealth(p) - p.w_total) > tol)
        throw DomainError("density first moment differs from w_total beyond tolerance");
}

Potentials compute_potentials(const CanonicalDensity& p) {
    const std::size_t n = p.size();
    if (n < 2)
        throw DomainError("density grid too small for potentials");
    for (std::size_t i = 1; i < n; ++i)
        if (!(p.grid[i] > p.grid[i - 1]))
            throw DomainError("non-monotone grid in compute_potentials");

    std::vector<double> pw(n), pxx(n);
    for (std::size_t i = 0; i < n; ++i) {
        pw[i] = p.density[i] * p.grid[i];
        pxx[i] = 0.5 * p.density[i] * p.grid[i] * p.grid[i];
    }

    Potentials pot;
    pot.F = cumtrapz(p.grid, p.density);
    pot.L = cumtrapz(p.grid, pw);
    pot.B = cumtrapz(p.grid, pxx);

    const double n_meas = pot.F.back();
    const double w_meas = pot.L.back();
    if (!(n_meas > 0.0))
        throw DomainError("density has no mass");

    pot.A.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pot.F[i] /= n_meas;
        pot.A[i] = 1.0 - pot.F[i];
        pot.L[i] /= w_meas;
        pot.B[i] /= n_meas;
    }
    return pot;
}

CanonicalDensity scale_density(const CanonicalDensity& p, double n, double w) {
    if (!(n > 0.0) || !(w > 0.0))
        throw DomainError("scale_density needs positive totals");
    const double mu = w / n; // horizontal stretch; vertical factor n/mu
    CanonicalDensity out;
    out.grid.resize(p.size());
    out.density.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out.grid[i] = p.grid[i] * mu;
        out.density[i] = p.density[i] * (n / mu);
    }
    out.support_lo = p.support_lo * mu;
    out.n_total = p.n_total * n;
    out.w_total = p.w_total * n * mu;
    return out;
}

CanonicalDensity shift_density(const CanonicalDensity& eysm, const ParameterVector& theta) {
    theta.validate();
    const double kappa = theta.kappa;
    if (kappa == 0.0)
        return eysm;
    const double n_meas = measure_agents(eysm);
    const double w_meas = measure_wealth(eysm);
    const double mu_bar = w_meas / n_meas;
    const double delta = kappa * mu_bar;

    CanonicalDensity out = eysm;
    for (double& w : out.grid)
        w -= delta;
    out.support_lo -= delta;
    out.w_total = eysm.w_total - delta * eysm.n_total;
    return out;
}

} // namespace awm
