#include "awm/sam.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "awm/errors.hpp"

namespace awm {

namespace {

constexpr int kMaxIter = 20000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Lower-tail series: P(a, z) = z^a e^-z / Gamma(a) * sum_n z^n / (a(a+1)...(a+n)).
double gamma_p_series(double a, double z) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= z / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps)
            break;
    }
    return sum * std::exp(-z + a * std::log(z) - std::lgamma(a));
}

// Upper-tail Lentz continued fraction for Q(a, z), valid for z >= a + 1.
double gamma_q_contfrac(double a, double z) {
    double b = z + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps)
            break;
    }
    return h * std::exp(-z + a * std::log(z) - std::lgamma(a));
}

// d/dt Q(a, e^t) = -exp(a t - e^t - lgamma(a)); used by the Newton polish.
double gamma_q_dlog(double a, double t) {
    double z = std::exp(t);
    double lg = a * t - z - std::lgamma(a);
    return -std::exp(lg);
}

} // namespace

double reg_gamma_q(double a, double z) {
    if (!(a > 0.0))
        throw DomainError("reg_gamma_q requires a > 0, got " + std::to_string(a));
    if (!(z >= 0.0))
        throw DomainError("reg_gamma_q requires z >= 0, got " + std::to_string(z));
    if (z == 0.0)
        return 1.0;
    if (z < a + 1.0)
        return 1.0 - gamma_p_series(a, z);
    return gamma_q_contfrac(a, z);
}

double reg_gamma_q_inv(double a, double q) {
    if (!(a > 0.0))
        throw DomainError("reg_gamma_q_inv requires a > 0");
    if (!(q > 0.0) || !(q < 1.0))
        throw DomainError("reg_gamma_q_inv requires q in (0, 1), got " + std::to_string(q));

    // Bracket in t = log z. Q(a, e^t) decreases monotonically from 1 to 0.
    double t_lo = std::log(std::max(a, 1.0));
    while (reg_gamma_q(a, std::exp(t_lo)) < q) {
        t_lo -= 8.0;
        if (t_lo < -745.0) return 0.0; // q indistinguishable from 1
    }
    double t_hi = t_lo;
    while (reg_gamma_q(a, std::exp(t_hi)) >= q) {
        t_hi += 2.0;
        if (t_hi > 710.0)
            throw DomainError("reg_gamma_q_inv failed to bracket");
    }

    // Coarse bisection, then Newton in t with the bracket as a safeguard.
    for (int i = 0; i < 24; ++i) {
        double tm = 0.5 * (t_lo + t_hi);
        if (reg_gamma_q(a, std::exp(tm)) >= q)
            t_lo = tm;
        else
            t_hi = tm;
    }
    double t = 0.5 * (t_lo + t_hi);
    for (int i = 0; i < 60; ++i) {
        double fq = reg_gamma_q(a, std::exp(t)) - q;
        if (std::abs(fq) <= 1e-13 * std::max(q, 1.0 - q))
            break;
        if (fq >= 0.0)
            t_lo = t;
        else
            t_hi = t;
        double dq = gamma_q_dlog(a, t);
        double tn = (dq != 0.0) ? t - fq / dq : 0.5 * (t_lo + t_hi);
        t = (tn > t_lo && tn < t_hi) ? tn : 0.5 * (t_lo + t_hi);
    }
    return std::exp(t);
}

double sam_density(double w, const SamParams& p) {
    if (!(p.chi > 0.0) || !(p.mu > 0.0))
        throw DomainError("sam_density requires chi > 0 and mu > 0");
    if (!(w > 0.0))
        throw DomainError("sam_density is supported on w > 0");
    const double a = 2.0 * p.chi;
    const double r = p.mu / w;
    double lg = -std::log(p.mu) + a * std::log(a) - std::lgamma(a) +
                (a + 2.0) * std::log(r) - a * r;
    return std::exp(lg);
}

double sam_cumulative_agents(double w, const SamParams& p) {
    if (!(w > 0.0)) return 0.0;
    return reg_gamma_q(2.0 * p.chi + 1.0, 2.0 * p.chi * p.mu / w);
}

double sam_cumulative_wealth(double w, const SamParams& p) {
    if (!(w > 0.0)) return 0.0;
    return reg_gamma_q(2.0 * p.chi, 2.0 * p.chi * p.mu / w);
}

double sam_lorenz(double f, double chi) {
    if (!(chi > 0.0))
        throw DomainError("sam_lorenz requires chi > 0");
    if (f <= 0.0) return 0.0;
    if (f >= 1.0) return 1.0;
    return reg_gamma_q(2.0 * chi, reg_gamma_q_inv(2.0 * chi + 1.0, f));
}

LorenzCurve sam_lorenz_curve(double chi, int resolution) {
    if (!(chi > 0.0))
        throw DomainError("sam_lorenz_curve requires chi > 0");
    if (resolution < 2)
        throw DomainError("resolution must be at least 2");
    const double a1 = 2.0 * chi + 1.0;
    const double a0 = 2.0 * chi;

    LorenzCurve out;
    out.f.resize(static_cast<std::size_t>(resolution) + 1);
    out.l.resize(out.f.size());
    out.f.front() = 0.0;
    out.l.front() = 0.0;
    out.f.back() = 1.0;
    out.l.back() = 1.0;

    // z = Q^-1(a1, f) decreases smoothly as f rises, so each inversion is
    // warm-started from its neighbor and polished with safeguarded Newton.
    double t = std::log(reg_gamma_q_inv(a1, 1.0 / resolution));
    for (int i = 1; i < resolution; ++i) {
        double f = static_cast<double>(i) / resolution;
        double t_lo = -760.0, t_hi = 715.0;
        for (int it = 0; it < 80; ++it) {
            double fq = reg_gamma_q(a1, std::exp(t)) - f;
            if (std::abs(fq) <= 1e-13)
                break;
            if (fq >= 0.0)
                t_lo = t;
            else
                t_hi = t;
            double dq = gamma_q_dlog(a1, t);
            double tn = (dq != 0.0) ? t - fq / dq : 0.5 * (t_lo + t_hi);
            t = (tn > t_lo && tn < t_hi) ? tn : 0.5 * (t_lo + t_hi);
        }
        out.f[static_cast<std::size_t>(i)] = f;
        out.l[static_cast<std::size_t>(i)] = reg_gamma_q(a0, std::exp(t));
    }
    out.terminal = 1.0;
    out.is_supercritical = false;
    return out;
}

CanonicalDensity sam_density_grid(const SamParams& p, double w_lo, double w_hi, int n_points) {
    if (!(w_lo > 0.0) || !(w_hi > w_lo) || n_points < 8)
        throw DomainError("sam_density_grid: bad grid request");
    CanonicalDensity out;
    out.grid.resize(static_cast<std::size_t>(n_points));
    out.density.resize(out.grid.size());
    const double step = std::log(w_hi / w_lo) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        double w = p.mu * w_lo * std::exp(step * i);
        out.grid[static_cast<std::size_t>(i)] = w;
        out.density[static_cast<std::size_t>(i)] = sam_density(w, p);
    }
    out.support_lo = out.grid.front();
    out.n_total = measure_agents(out);
    out.w_total = measure_wealth(out);
    return out;
}

} // namespace awm
