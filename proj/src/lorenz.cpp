#include "awm/lorenz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "awm/errors.hpp"

namespace awm {

namespace {

void check_curve(const LorenzCurve& c) {
    if (c.f.size() < 2 || c.f.size() != c.l.size())
        throw DomainError("Lorenz curve needs matching f/l arrays with at least 2 knots");
    if (std::abs(c.f.front()) > 1e-12 || std::abs(c.l.front()) > 1e-12)
        throw DomainError("Lorenz curve must start at (0, 0)");
    for (std::size_t i = 1; i < c.f.size(); ++i)
        if (c.f[i] < c.f[i - 1] - 1e-15)
            throw DomainError("Lorenz curve f knots must be nondecreasing");
}

} // namespace

double LorenzCurve::value_at(double fq) const {
    if (fq <= f.front())
        return l.front();
    if (fq >= f.back())
        return l.back();
    auto it = std::upper_bound(f.begin(), f.end(), fq);
    std::size_t hi = static_cast<std::size_t>(it - f.begin());
    std::size_t lo = hi - 1;
    double df = f[hi] - f[lo];
    if (df <= 0.0)
        return l[hi];
    double t = (fq - f[lo]) / df;
    return l[lo] + t * (l[hi] - l[lo]);
}

LorenzCurve LorenzCurve::resampled(int resolution) const {
    if (resolution < 2)
        throw DomainError("resolution must be at least 2");
    LorenzCurve out;
    out.terminal = terminal;
    out.is_supercritical = is_supercritical;
    out.f.resize(static_cast<std::size_t>(resolution) + 1);
    out.l.resize(out.f.size());
    std::size_t j = 0;
    for (int i = 0; i <= resolution; ++i) {
        double fq = static_cast<double>(i) / resolution;
        out.f[static_cast<std::size_t>(i)] = fq;
        while (j + 2 < f.size() && f[j + 1] < fq)
            ++j;
        double lo_f = f[j], hi_f = f[j + 1];
        double v;
        if (fq <= f.front())
            v = l.front();
        else if (fq >= f.back())
            v = l.back();
        else if (hi_f <= lo_f)
            v = l[j + 1];
        else
            v = l[j] + (fq - lo_f) / (hi_f - lo_f) * (l[j + 1] - l[j]);
        out.l[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

LorenzCurve lorenz_from_density(const CanonicalDensity& p, int resolution) {
    Potentials pot = compute_potentials(p);

    // Parametric knots (F(w), L(w)). Enforce nondecreasing f against
    // cumulative-roundoff wiggles in empty tail regions.
    LorenzCurve knots;
    knots.f.reserve(p.size());
    knots.l.reserve(p.size());
    double fprev = -1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double fi = std::min(1.0, std::max(pot.F[i], fprev));
        knots.f.push_back(fi);
        knots.l.push_back(pot.L[i]);
        fprev = fi;
    }
    knots.f.back() = 1.0;
    knots.l.back() = 1.0;
    knots.terminal = 1.0;
    knots.is_supercritical = false;
    return knots.resampled(resolution);
}

CanonicalDensity density_from_lorenz(const LorenzCurve& curve, double n, double w) {
    check_curve(curve);
    if (!(n > 0.0) || !(w > 0.0))
        throw DomainError("density_from_lorenz needs positive totals");
    if (curve.is_supercritical || curve.terminal < 1.0 - 1e-9)
        throw DomainError("supercritical curve: the oligarchy atom is not representable "
                          "as a classical density");

    const double mu = w / n;
    const std::size_t m = curve.f.size();
    const auto& f = curve.f;
    const auto& l = curve.l;

    // Wealth as a function of f: w(f) = mu * dl/df, centered differences with
    // one-sided stencils at the ends.
    std::vector<double> wf(m);
    wf[0] = mu * (l[1] - l[0]) / (f[1] - f[0]);
    wf[m - 1] = mu * (l[m - 1] - l[m - 2]) / (f[m - 1] - f[m - 2]);
    for (std::size_t i = 1; i + 1 < m; ++i)
        wf[i] = mu * (l[i + 1] - l[i - 1]) / (f[i + 1] - f[i - 1]);

    const double span = std::max(std::abs(wf[m - 1]), std::abs(wf[0]));
    const double concavity_tol = 1e-8 * std::max(1.0, span);
    for (std::size_t i = 1; i < m; ++i)
        if (wf[i] < wf[i - 1] - concavity_tol)
            throw DomainError("curve is not concave up: wealth parameter decreases with f");

    // Degenerate equal-wealth curve: every agent at the mean. Narrowest
    // representable peak on a 3-point grid.
    if (wf[m - 1] - wf[0] < 1e-9 * std::max(1.0, span)) {
        const double wc = mu;
        const double h = 1e-6 * std::max(std::abs(wc), 1.0);
        CanonicalDensity peak;
        peak.grid = {wc - h, wc, wc + h};
        peak.density = {0.0, n / h, 0.0};
        peak.support_lo = wc - h;
        peak.n_total = n;
        peak.w_total = w;
        return peak;
    }

    // Keep a strictly increasing subsequence of (w(f), f) pairs.
    std::vector<double> ws, fs;
    ws.reserve(m);
    fs.reserve(m);
    ws.push_back(wf[0]);
    fs.push_back(f[0]);
    const double min_step = 1e-12 * std::max(1.0, span);
    for (std::size_t i = 1; i < m; ++i) {
        if (wf[i] > ws.back() + min_step) {
            ws.push_back(wf[i]);
            fs.push_back(f[i]);
        } else {
            fs.back() = f[i]; // flat stretch: collapse onto one abscissa
        }
    }
    if (ws.size() < 3)
        throw DomainError("curve too degenerate to recover a gridded density");

    // P(w) = N dF/dw along the recovered parametrization.
    const std::size_t k = ws.size();
    CanonicalDensity out;
    out.grid = ws;
    out.density.resize(k);
    out.density[0] = n * (fs[1] - fs[0]) / (ws[1] - ws[0]);
    out.density[k - 1] = n * (fs[k - 1] - fs[k - 2]) / (ws[k - 1] - ws[k - 2]);
    for (std::size_t i = 1; i + 1 < k; ++i)
        out.density[i] = n * (fs[i + 1] - fs[i - 1]) / (ws[i + 1] - ws[i - 1]);
    for (double& v : out.density)
        v = std::max(v, 0.0);
    out.support_lo = ws.front();
    out.n_total = n;
    out.w_total = w;
    return out;
}

double gini(const LorenzCurve& curve) {
    check_curve(curve);
    double area = 0.0;
    for (std::size_t i = 1; i < curve.f.size(); ++i)
        area += 0.5 * (curve.f[i] - curve.f[i - 1]) * (curve.l[i] + curve.l[i - 1]);
    return 1.0 - 2.0 * area;
}

double gini_density_form(const CanonicalDensity& p) {
    if (p.grid.front() < -1e-12)
        throw DomainError("gini_density_form requires nonnegative support; "
                          "use the Lorenz-curve form for shifted densities");
    Potentials pot = compute_potentials(p);
    const double w_meas = measure_wealth(p);
    double integral = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        double a = p.density[i - 1] * pot.A[i - 1] * p.grid[i - 1];
        double b = p.density[i] * pot.A[i] * p.grid[i];
        integral += 0.5 * (p.grid[i] - p.grid[i - 1]) * (a + b);
    }
    return 1.0 - 2.0 * integral / w_meas;
}

LorenzCurve dual_lorenz(const LorenzCurve& sub, double chi, double zeta) {
    check_curve(sub);
    if (!(zeta > chi))
        throw DomainError("duality applies only to supercritical targets (zeta > chi)");
    if (!(chi > 0.0))
        throw DomainError("chi must be positive");
    if (sub.terminal < 1.0 - 1e-9)
        throw DomainError("dual_lorenz input must be a subcritical curve");
    const double ratio = chi / zeta;
    LorenzCurve out;
    out.f = sub.f;
    out.l.resize(sub.l.size());
    for (std::size_t i = 0; i < sub.l.size(); ++i)
        out.l[i] = ratio * sub.l[i];
    out.terminal = ratio * sub.terminal;
    out.is_supercritical = true;
    return out;
}

LorenzCurve awm_lorenz(const LorenzCurve& eysm, const ParameterVector& theta) {
    check_curve(eysm);
    theta.validate();
    const double lambda = theta.lambda();
    LorenzCurve out;
    out.f = eysm.f;
    out.l.resize(eysm.l.size());
    for (std::size_t i = 0; i < eysm.l.size(); ++i)
        out.l[i] = (1.0 + lambda) * eysm.l[i] - lambda * eysm.f[i];
    out.is_supercritical = eysm.is_supercritical;
    out.terminal = eysm.is_supercritical
                       ? (1.0 + lambda) * eysm.terminal - lambda
                       : 1.0;
    if (!(out.terminal > 0.0))
        throw DomainError("affine shift drives the right-boundary Lorenz value "
                          "nonpositive (chi <= kappa*zeta)");
    return out;
}

double oligarchy_fraction(const ParameterVector& theta) {
    theta.validate();
    if (!(theta.zeta > theta.chi))
        return 0.0;
    return (1.0 + theta.lambda()) * (1.0 - theta.chi / theta.zeta);
}

} // namespace awm
