#include "awm/fp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "awm/errors.hpp"
#include "awm/sam.hpp"

namespace awm {

void SolverConfig::validate() const {
    if (!(w_max >= 10.0))
        throw DomainError("solver w_max must be at least 10 mean-wealth units");
    if (n_cells < 256)
        throw DomainError("solver needs at least 256 cells");
    if (!(dt > 0.0))
        throw DomainError("solver dt must be positive");
    if (!(tol_residual > 0.0))
        throw DomainError("solver tol_residual must be positive");
    if (max_steps < 1)
        throw DomainError("solver max_steps must be positive");
    if (!(grading >= 1.0))
        throw DomainError("solver grading must be at least 1 (1 = uniform)");
}

DriftDiffusionField assemble_coefficients(const CanonicalDensity& p, const Potentials& pot,
                                          double chi, double zeta) {
    const std::size_t n = p.size();
    if (pot.F.size() != n || pot.A.size() != n || pot.L.size() != n || pot.B.size() != n)
        throw DomainError("potentials do not match the density grid");
    double n_meas = measure_agents(p);
    double w_meas = measure_wealth(p);
    if (!(n_meas > 0.0) || !(w_meas > 0.0)) {
        // degenerate (e.g. identically zero) input: fall back to declared totals
        n_meas = p.n_total;
        w_meas = p.w_total;
    }
    const double mu = w_meas / n_meas;
    const double n_over_w = n_meas / w_meas;

    DriftDiffusionField field;
    field.sigma.resize(n);
    field.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = p.grid[i];
        field.d[i] = pot.B[i] + 0.5 * w * w * pot.A[i];
        field.sigma[i] = chi * (mu - w) -
                         zeta * (2.0 * n_over_w * (pot.B[i] - 0.5 * w * w * pot.A[i]) +
                                 (1.0 - 2.0 * pot.L[i]) * w);
    }
    return field;
}

namespace {

// Three-point first derivative on a possibly non-uniform grid (second order).
inline double deriv3(double um, double u0, double up, double hl, double hr) {
    return (-hr / (hl * (hl + hr))) * um + ((hr - hl) / (hl * hr)) * u0 +
           (hl / (hr * (hl + hr))) * up;
}

} // namespace

double steady_state_residual(const CanonicalDensity& p, const Potentials& pot,
                             double chi, double zeta) {
    const std::size_t n = p.size();
    DriftDiffusionField field = assemble_coefficients(p, pot, chi, zeta);

    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = field.d[i] * p.density[i];

    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double du;
        if (i == 0)
            du = (u[1] - u[0]) / (p.grid[1] - p.grid[0]);
        else if (i == n - 1)
            du = (u[n - 1] - u[n - 2]) / (p.grid[n - 1] - p.grid[n - 2]);
        else
            du = deriv3(u[i - 1], u[i], u[i + 1], p.grid[i] - p.grid[i - 1],
                        p.grid[i + 1] - p.grid[i]);
        const double r = du - field.sigma[i] * p.density[i];
        double weight;
        if (i == 0)
            weight = 0.5 * (p.grid[1] - p.grid[0]);
        else if (i == n - 1)
            weight = 0.5 * (p.grid[n - 1] - p.grid[n - 2]);
        else
            weight = 0.5 * (p.grid[i + 1] - p.grid[i - 1]);
        norm += weight * std::abs(r);
    }
    return norm;
}

namespace {

// Face coefficients of the Peclet-weighted flux J = gp*P_left - gm*P_right,
// exact for locally constant drift/diffusivity, reducing to donor-cell
// upwinding at large Peclet number and to centered differencing at small.
inline void face_weights(double s, double dh, double inv_h, double& gp, double& gm) {
    if (dh <= 1e-300) {
        gp = s > 0.0 ? s : 0.0;
        gm = s < 0.0 ? -s : 0.0;
        return;
    }
    const double base = dh * inv_h;
    const double pe = s / base;
    if (pe > 36.0) {
        gp = s;
        gm = 0.0;
        return;
    }
    if (pe < -36.0) {
        gp = 0.0;
        gm = -s;
        return;
    }
    if (std::abs(pe) < 1e-5) {
        const double q = pe * pe / 12.0;
        gm = base * (1.0 - 0.5 * pe + q);
        gp = base * (1.0 + 0.5 * pe + q);
        return;
    }
    const double e = std::expm1(pe);
    gm = base * pe / e;
    gp = gm * (e + 1.0);
}

// Nodes cluster near w = 0 where the density develops its sharp peak (the
// peak sits near w ~ chi). A small linear blend keeps the first cell from
// collapsing, which would throttle the advective step bound for no gain.
std::vector<double> graded_grid(double w_max, int n_cells, double grading) {
    const double blend = 0.02;
    std::vector<double> w(static_cast<std::size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) {
        const double x = static_cast<double>(i) / n_cells;
        w[static_cast<std::size_t>(i)] =
            w_max * ((1.0 - blend) * std::pow(x, grading) + blend * x);
    }
    w.front() = 0.0;
    w.back() = w_max;
    return w;
}

// Exact canonical moments for a starting profile: scale the mass to one,
// then tilt by 1 + b(w - m), which leaves the mass invariant and sets the
// mean exactly (b is far too small to threaten positivity).
void enforce_canonical_moments(std::vector<double>& prof, const std::vector<double>& w) {
    const std::size_t n = w.size();
    auto moments = [&](double& mass, double& mean, double& second) {
        mass = mean = second = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double hw = 0.5 * (w[i] - w[i - 1]);
            mass += hw * (prof[i] + prof[i - 1]);
            mean += hw * (prof[i] * w[i] + prof[i - 1] * w[i - 1]);
            second += hw * (prof[i] * w[i] * w[i] + prof[i - 1] * w[i - 1] * w[i - 1]);
        }
    };
    double mass, mean, second;
    moments(mass, mean, second);
    for (double& v : prof)
        v /= mass;
    mean /= mass;
    second /= mass;
    const double var = second - mean * mean;
    const double b = (var > 0.0) ? (1.0 - mean) / var : 0.0;
    for (std::size_t i = 0; i < n; ++i)
        prof[i] = std::max(0.0, prof[i] * (1.0 + b * (w[i] - mean)));
    moments(mass, mean, second);
    for (double& v : prof)
        v /= mass;
}

// SAM-shaped starting profile with both truncated moments set to one. The
// closed form has a fat tail, so its scale parameter is bisected until the
// truncated mean is exactly the canonical mean.
std::vector<double> initial_profile(double chi, const std::vector<double>& w) {
    const std::size_t n = w.size();
    std::vector<double> prof(n);
    auto fill = [&](double mu_eff) {
        prof[0] = 0.0;
        SamParams sp{chi, mu_eff};
        for (std::size_t i = 1; i < n; ++i)
            prof[i] = sam_density(w[i], sp);
    };
    auto truncated_mean = [&]() {
        double mass = 0.0, wealth = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double h = w[i] - w[i - 1];
            mass += 0.5 * h * (prof[i] + prof[i - 1]);
            wealth += 0.5 * h * (prof[i] * w[i] + prof[i - 1] * w[i - 1]);
        }
        return wealth / mass;
    };

    double lo = 1e-3, hi = w.back();
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        fill(mid);
        if (truncated_mean() < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    fill(0.5 * (lo + hi));
    double mass = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        mass += 0.5 * (w[i] - w[i - 1]) * (prof[i] + prof[i - 1]);
    for (double& v : prof)
        v /= mass;
    return prof;
}

struct RelaxResult {
    std::vector<double> grid;
    std::vector<double> density;
    double residual;
    long steps;
    double max_mass_drift;
    double max_wealth_drift;
    bool converged;
};

// Linear interpolation of a previous solution onto a new grid (zero beyond
// its old support); used to warm-start after the domain is enlarged.
std::vector<double> interpolate_profile(const std::vector<double>& w_new,
                                        const std::vector<double>& w_old,
                                        const std::vector<double>& p_old) {
    std::vector<double> out(w_new.size(), 0.0);
    std::size_t j = 0;
    for (std::size_t i = 0; i < w_new.size(); ++i) {
        const double x = w_new[i];
        if (x > w_old.back())
            break;
        while (j + 2 < w_old.size() && w_old[j + 1] < x)
            ++j;
        const double t = (x - w_old[j]) / (w_old[j + 1] - w_old[j]);
        out[i] = std::max(0.0, p_old[j] + t * (p_old[j + 1] - p_old[j]));
    }
    return out;
}

RelaxResult relax(double chi, double zeta, const SolverConfig& cfg,
                  const RelaxResult* warm = nullptr) {
    const int n = cfg.n_cells; // nodes 0..n
    const std::size_t m = static_cast<std::size_t>(n) + 1;

    std::vector<double> w = graded_grid(cfg.w_max, n, cfg.grading);
    std::vector<double> h(static_cast<std::size_t>(n)); // face spacings
    std::vector<double> cell(m);                        // control-volume widths
    for (int k = 0; k < n; ++k)
        h[static_cast<std::size_t>(k)] =
            w[static_cast<std::size_t>(k) + 1] - w[static_cast<std::size_t>(k)];
    cell[0] = 0.5 * h[0];
    for (std::size_t i = 1; i + 1 < m; ++i)
        cell[i] = 0.5 * (h[i - 1] + h[i]);
    cell[m - 1] = 0.5 * h[m - 2];

    std::vector<double> P = warm ? interpolate_profile(w, warm->grid, warm->density)
                                 : initial_profile(chi, w);
    enforce_canonical_moments(P, w);
    std::vector<double> backup(m);
    std::vector<double> F(m), L(m), B(m), d(m), sig(m), seff(m), u(m);
    std::vector<double> flux(static_cast<std::size_t>(n));
    std::vector<double> gplus(static_cast<std::size_t>(n)), gminus(static_cast<std::size_t>(n));

    const double safety = 0.9;
    const bool trace = std::getenv("AWM_SOLVER_TRACE") != nullptr;
    double dt_scale = 1.0;
    double residual = std::numeric_limits<double>::infinity();
    double max_mass_drift = 0.0, max_wealth_drift = 0.0;
    const long check_every = 200;
    // Give up once the residual stops improving: the iterate is at its
    // discrete fixed point with a floor above tolerance (under-resolved
    // parameters), and more marching cannot help.
    const long stall_window = 60000;
    double best_residual = std::numeric_limits<double>::infinity();
    long last_progress_step = 0;
    long step = 0;
    bool converged = false;

    while (step < cfg.max_steps) {
        // Cumulative trapezoid potentials of the current iterate.
        F[0] = L[0] = B[0] = 0.0;
        for (std::size_t i = 1; i < m; ++i) {
            const double pa = P[i - 1], pb = P[i];
            const double wa = w[i - 1], wb = w[i];
            const double hw = 0.5 * h[i - 1];
            F[i] = F[i - 1] + hw * (pa + pb);
            L[i] = L[i - 1] + hw * (pa * wa + pb * wb);
            B[i] = B[i - 1] + 0.5 * hw * (pa * wa * wa + pb * wb * wb);
        }
        const double n_meas = F[m - 1];
        const double w_meas = L[m - 1];
        max_mass_drift = std::max(max_mass_drift, std::abs(n_meas - 1.0));
        max_wealth_drift = std::max(max_wealth_drift, std::abs(w_meas - 1.0));

        const double inv_n = 1.0 / n_meas;
        const double inv_w = 1.0 / w_meas;
        const double mu = w_meas * inv_n;
        const double n_over_w = n_meas * inv_w;

        for (std::size_t i = 0; i < m; ++i) {
            const double fi = F[i] * inv_n;
            const double ai = 1.0 - fi;
            const double li = L[i] * inv_w;
            const double bi = B[i] * inv_n;
            const double wi = w[i];
            const double half_w2a = 0.5 * wi * wi * ai;
            d[i] = bi + half_w2a;
            sig[i] = chi * (mu - wi) -
                     zeta * (2.0 * n_over_w * (bi - half_w2a) + (1.0 - 2.0 * li) * wi);
            seff[i] = sig[i] - wi * ai;
            u[i] = d[i] * P[i];
        }

        // Residual check on the current iterate (pre-update).
        if (step % check_every == 0) {
            double norm = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double du;
                if (i == 0)
                    du = (u[1] - u[0]) / h[0];
                else if (i == m - 1)
                    du = (u[m - 1] - u[m - 2]) / h[m - 2];
                else
                    du = deriv3(u[i - 1], u[i], u[i + 1], h[i - 1], h[i]);
                norm += cell[i] * std::abs(du - sig[i] * P[i]);
            }
            residual = norm;
            if (trace && step % 100000 == 0)
                std::fprintf(stderr, "step %ld residual %.4e dt_scale %.3e\n", step, residual,
                             dt_scale);
            if (residual <= cfg.tol_residual) {
                converged = true;
                break;
            }
            if (residual < best_residual * (1.0 - 1e-4)) {
                best_residual = residual;
                last_progress_step = step;
            } else if (step - last_progress_step >= stall_window) {
                break; // stalled above tolerance
            }
        }

        // Face fluxes and the tightest positivity-preserving step.
        double j_imbalance = 0.0; // sum of J_k h_k = discrete wealth production
        double phi_total = 0.0;
        for (int k = 0; k < n; ++k) {
            const std::size_t i = static_cast<std::size_t>(k);
            const double s = 0.5 * (seff[i] + seff[i + 1]);
            const double dh = 0.5 * (d[i] + d[i + 1]);
            face_weights(s, dh, 1.0 / h[i], gplus[i], gminus[i]);
            flux[i] = gplus[i] * P[i] - gminus[i] * P[i + 1];
            j_imbalance += flux[i] * h[i];
            phi_total += std::min(P[i], P[i + 1]) * h[i];
        }

        double max_rate = 1e-300;
        for (std::size_t i = 0; i < m; ++i) {
            const double out_r = (i + 1 < m) ? gplus[i] : 0.0;
            const double out_l = (i > 0) ? gminus[i - 1] : 0.0;
            max_rate = std::max(max_rate, (out_r + out_l) / cell[i]);
        }

        // Project out the discretization-level wealth production with a
        // density-weighted face correction: it telescopes to zero for the
        // mass, cancels the first moment exactly, and uses the smaller face
        // neighbor as weight so it vanishes at the edges of the support and
        // cannot drain empty cells.
        const double alpha = (phi_total > 0.0) ? j_imbalance / phi_total : 0.0;
        for (int k = 0; k < n; ++k) {
            const std::size_t i = static_cast<std::size_t>(k);
            flux[i] -= alpha * std::min(P[i], P[i + 1]);
        }

        const double dt = std::min(cfg.dt, safety * dt_scale / max_rate);
        if (trace && step % 100000 == 0)
            std::fprintf(stderr, "   dt %.3e max_rate %.3e alpha %.3e\n", dt, max_rate, alpha);

        backup = P;
        P[0] -= dt * flux[0] / cell[0];
        for (std::size_t i = 1; i + 1 < m; ++i)
            P[i] -= dt * (flux[i] - flux[i - 1]) / cell[i];
        P[m - 1] += dt * flux[m - 2] / cell[m - 1];

        double min_p = P[0];
        for (double v : P)
            min_p = std::min(min_p, v);
        if (min_p < -1e-14) {
            P = backup;
            dt_scale *= 0.5;
            if (dt_scale < 1e-12)
                break; // step size collapsed; report non-convergence below
            continue;
        }
        if (min_p < 0.0) {
            double mass = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                P[i] = std::max(P[i], 0.0);
            for (std::size_t i = 1; i < m; ++i)
                mass += 0.5 * h[i - 1] * (P[i] + P[i - 1]);
            const double fix = 1.0 / mass;
            for (double& v : P)
                v *= fix;
        }
        dt_scale = std::min(1.0, dt_scale * 1.05);
        ++step;
    }

    return RelaxResult{std::move(w), std::move(P),       residual, step,
                       max_mass_drift, max_wealth_drift, converged};
}

} // namespace

SolveOutcome solve_steady_subcritical(double chi, double zeta, const SolverConfig& cfg0) {
    cfg0.validate();
    if (!(chi > 0.0))
        throw DomainError("chi must be positive");
    if (!(zeta >= 0.0))
        throw DomainError("zeta must be nonnegative");
    if (!(zeta < chi))
        throw DomainError("zeta >= chi is not subcritical; reduce via duality first");

    SolverConfig cfg = cfg0;
    const double tail_limit = 1e-8;
    RelaxResult previous{};
    long total_steps = 0;
    for (int attempt = 0;; ++attempt) {
        RelaxResult r = relax(chi, zeta, cfg, attempt > 0 ? &previous : nullptr);
        total_steps += r.steps;
        if (!r.converged)
            throw ConvergenceError("steady-state relaxation did not reach tolerance " +
                                       std::to_string(cfg.tol_residual) + " at chi=" +
                                       std::to_string(chi) + ", zeta=" + std::to_string(zeta),
                                   r.residual, total_steps);

        const std::size_t m = r.grid.size();
        const double tail =
            0.5 * (r.grid[m - 1] - r.grid[m - 2]) * (r.density[m - 2] + r.density[m - 1]);
        if (tail < tail_limit || attempt >= 3) {
            if (tail >= tail_limit)
                throw ConvergenceError("tail mass above threshold even after enlarging the domain",
                                       tail, r.steps);
            SolveOutcome out;
            out.density.grid = std::move(r.grid);
            out.density.density = std::move(r.density);
            out.density.support_lo = 0.0;
            out.density.n_total = 1.0;
            out.density.w_total = 1.0;
            out.residual = r.residual;
            out.steps = total_steps;
            out.mass_drift = std::abs(measure_agents(out.density) - 1.0);
            out.wealth_drift = std::abs(measure_wealth(out.density) - 1.0);
            out.max_mass_drift = r.max_mass_drift;
            out.max_wealth_drift = r.max_wealth_drift;
            out.tail_mass = tail;
            out.w_max_used = cfg.w_max;
            return out;
        }
        previous = std::move(r);
        cfg.w_max *= 2.0;
        cfg.n_cells *= 2;
    }
}

} // namespace awm
