#include "awm/fitter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "awm/errors.hpp"
#include "awm/sam.hpp"

namespace awm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int family_dimension(ModelFamily family) {
    switch (family) {
    case ModelFamily::Sam:
    case ModelFamily::EysmRedist:
        return 1;
    case ModelFamily::EysmFull:
        return 2;
    case ModelFamily::Awm:
        return 3;
    }
    return 0;
}

std::string family_name(ModelFamily family) {
    switch (family) {
    case ModelFamily::Sam:
        return "sam";
    case ModelFamily::EysmRedist:
        return "eysm-redist";
    case ModelFamily::EysmFull:
        return "eysm-full";
    case ModelFamily::Awm:
        return "awm";
    }
    return "?";
}

std::optional<ModelFamily> family_from_name(const std::string& name) {
    if (name == "sam") return ModelFamily::Sam;
    if (name == "eysm-redist") return ModelFamily::EysmRedist;
    if (name == "eysm-full") return ModelFamily::EysmFull;
    if (name == "awm") return ModelFamily::Awm;
    return std::nullopt;
}

void SearchConfig::validate() const {
    if (!(chi_range.lo > 0.0) || !(chi_range.hi > chi_range.lo))
        throw DomainError("chi_range must be a positive interval");
    if (!(zeta_range.lo >= 0.0) || !(zeta_range.hi > zeta_range.lo))
        throw DomainError("zeta_range must be a nonnegative interval");
    if (!(kappa_range.lo >= 0.0) || !(kappa_range.hi >= kappa_range.lo) ||
        !(kappa_range.hi < 1.0))
        throw DomainError("kappa_range must lie in [0, 1)");
    if (grid_density < 2)
        throw DomainError("grid_density must be at least 2");
    if (!(refine_tol > 0.0))
        throw DomainError("refine_tol must be positive");
    if (curve_resolution < 100)
        throw DomainError("curve_resolution must be at least 100");
    solver.validate();
}

double discrepancy(const LorenzCurve& a, const LorenzCurve& b, int resolution) {
    if (resolution < 2)
        throw DomainError("resolution must be at least 2");
    const double h = 1.0 / resolution;
    double prev = std::abs(a.value_at(0.0) - b.value_at(0.0));
    double sum = 0.0;
    for (int i = 1; i <= resolution; ++i) {
        const double fq = static_cast<double>(i) * h;
        const double cur = std::abs(a.value_at(fq) - b.value_at(fq));
        sum += 0.5 * h * (prev + cur);
        prev = cur;
    }
    return sum;
}

namespace {

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
    const double cx = ax + t * dx - px;
    const double cy = ay + t * dy - py;
    return std::sqrt(cx * cx + cy * cy);
}

} // namespace

double local_error(double f, double l, const LorenzCurve& model) {
    if (model.f.size() < 2)
        throw DomainError("model curve too small");

    if (model.is_supercritical) {
        if (l > model.terminal && l < 1.0)
            return std::abs(f - 1.0); // horizontal gap to the boundary segment
    }

    double best = kInf;
    if (model.is_supercritical) {
        // Vertical boundary piece from (1, terminal) to (1, 1).
        best = point_segment_distance(f, l, 1.0, model.terminal, 1.0, 1.0);
    }

    // Nearest polyline segment, searched outward from the matching f-window;
    // segments whose horizontal gap already exceeds the best distance cannot
    // win, which bounds the scan.
    const auto& xs = model.f;
    const auto& ys = model.l;
    const std::size_t nseg = xs.size() - 1;
    auto it = std::upper_bound(xs.begin(), xs.end(), f);
    std::size_t start = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    start = std::min(start, nseg - 1);

    best = std::min(best, point_segment_distance(f, l, xs[start], ys[start], xs[start + 1],
                                                 ys[start + 1]));
    for (std::size_t off = 1; off < nseg; ++off) {
        bool advanced = false;
        if (start + off < nseg) {
            const std::size_t s = start + off;
            if (xs[s] - f < best) {
                best = std::min(best,
                                point_segment_distance(f, l, xs[s], ys[s], xs[s + 1], ys[s + 1]));
                advanced = true;
            }
        }
        if (start >= off) {
            const std::size_t s = start - off;
            if (f - xs[s + 1] < best) {
                best = std::min(best,
                                point_segment_distance(f, l, xs[s], ys[s], xs[s + 1], ys[s + 1]));
                advanced = true;
            }
        }
        if (!advanced)
            break;
    }
    return best;
}

double lambda_l2_guess(const LorenzCurve& eysm, const LorenzCurve& empirical, int resolution) {
    const double h = 1.0 / resolution;
    double num = 0.0, den = 0.0;
    double prev_num = 0.0, prev_den = 0.0;
    for (int i = 0; i <= resolution; ++i) {
        const double fq = static_cast<double>(i) * h;
        const double e = eysm.value_at(fq);
        const double gap = fq - e;
        const double cur_num = (e - empirical.value_at(fq)) * gap;
        const double cur_den = gap * gap;
        if (i > 0) {
            num += 0.5 * h * (prev_num + cur_num);
            den += 0.5 * h * (prev_den + cur_den);
        }
        prev_num = cur_num;
        prev_den = cur_den;
    }
    if (!(den > 1e-14))
        throw DomainError("EYSM curve coincides with the diagonal; affine shift is undetermined");
    return num / den;
}

namespace {

// Uniform-grid view of a curve for fused J evaluations.
struct UniformCurve {
    std::vector<double> f, l;
    double terminal = 1.0;
    bool supercritical = false;

    static UniformCurve from(const LorenzCurve& c, int resolution) {
        LorenzCurve r = c.resampled(resolution);
        return UniformCurve{std::move(r.f), std::move(r.l), c.terminal, c.is_supercritical};
    }
};

// J of the affine family over a fixed EYSM curve: the model value at f is
// (1+lambda) e(f) - lambda f, so the kappa sweep never touches the solver.
double affine_discrepancy(const UniformCurve& emp, const UniformCurve& eysm, double lambda) {
    const std::size_t n = emp.f.size();
    const double h = emp.f[1] - emp.f[0];
    double sum = 0.0;
    double prev = std::abs(emp.l[0] - ((1.0 + lambda) * eysm.l[0] - lambda * eysm.f[0]));
    for (std::size_t i = 1; i < n; ++i) {
        const double model = (1.0 + lambda) * eysm.l[i] - lambda * eysm.f[i];
        const double cur = std::abs(emp.l[i] - model);
        sum += 0.5 * h * (prev + cur);
        prev = cur;
    }
    return sum;
}

double plain_discrepancy(const UniformCurve& emp, const UniformCurve& model) {
    const std::size_t n = emp.f.size();
    const double h = emp.f[1] - emp.f[0];
    double sum = 0.0;
    double prev = std::abs(emp.l[0] - model.l[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = std::abs(emp.l[i] - model.l[i]);
        sum += 0.5 * h * (prev + cur);
        prev = cur;
    }
    return sum;
}

struct KappaResult {
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double j = kInf;
};

KappaResult search_kappa(const UniformCurve& emp, const UniformCurve& eysm, double chi,
                         double zeta, const SearchConfig& cfg) {
    const bool sup = zeta > chi;
    const double lo = std::max(0.0, cfg.kappa_range.lo);
    double hi = std::min(cfg.kappa_range.hi, 1.0 - 1e-12);
    if (sup)
        hi = std::min(hi, (chi / zeta) * (1.0 - 1e-9)); // keep the terminal positive
    if (!(lo <= hi))
        return {};

    auto j_of = [&](double kappa) {
        return affine_discrepancy(emp, eysm, kappa / (1.0 - kappa));
    };

    KappaResult best{lo, j_of(lo)};
    auto consider = [&](double kappa, double j) {
        if (j < best.j || (j == best.j && kappa < best.kappa))
            best = KappaResult{kappa, j};
    };
    if (hi > lo)
        consider(hi, j_of(hi));

    // Seed at the closed-form L2 optimum and expand a bracket around it until
    // the minimum is interior (or pinned at a feasible endpoint).
    double lambda_guess = 0.0;
    {
        const std::size_t n = emp.f.size();
        const double h = emp.f[1] - emp.f[0];
        double num = 0.0, den = 0.0;
        double pn = 0.0, pd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double gap = eysm.f[i] - eysm.l[i];
            const double cn = (eysm.l[i] - emp.l[i]) * gap;
            const double cd = gap * gap;
            if (i > 0) {
                num += 0.5 * h * (pn + cn);
                den += 0.5 * h * (pd + cd);
            }
            pn = cn;
            pd = cd;
        }
        lambda_guess = (den > 1e-14) ? num / den : 0.0;
    }
    const double guess =
        std::clamp(lambda_guess > 0.0 ? lambda_guess / (1.0 + lambda_guess) : lo, lo, hi);

    double span = std::max(1e-3, 0.05 * (hi - lo));
    double a = std::max(lo, guess - span);
    double b = std::min(hi, guess + span);
    double ja = j_of(a), jb = j_of(b);
    consider(a, ja);
    consider(b, jb);
    for (int grow = 0; grow < 40; ++grow) {
        bool grew = false;
        if (ja <= jb && a > lo) {
            a = std::max(lo, a - span);
            ja = j_of(a);
            consider(a, ja);
            grew = true;
        } else if (jb < ja && b < hi) {
            b = std::min(hi, b + span);
            jb = j_of(b);
            consider(b, jb);
            grew = true;
        }
        span *= 2.0;
        if (!grew)
            break;
    }

    // Golden-section on [a, b]; the objective is convex in lambda, hence
    // unimodal in kappa.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double j1 = j_of(x1), j2 = j_of(x2);
    consider(x1, j1);
    consider(x2, j2);
    for (int it = 0; it < 200 && (b - a) > 1e-8; ++it) {
        if (j1 <= j2) {
            b = x2;
            x2 = x1;
            j2 = j1;
            x1 = b - gr * (b - a);
            j1 = j_of(x1);
            consider(x1, j1);
        } else {
            a = x1;
            x1 = x2;
            j1 = j2;
            x2 = a + gr * (b - a);
            j2 = j_of(x2);
            consider(x2, j2);
        }
    }
    return best;
}

// Objective over the outer free parameters of one family. Solver failures and
// infeasible points evaluate to +infinity.
struct Objective {
    ModelFamily family;
    const UniformCurve& emp;
    const SearchConfig& cfg;
    SolveCache& cache;
    long evaluations = 0;
    long rejected = 0;

    struct Value {
        double j = kInf;
        double kappa = 0.0;
    };

    UniformCurve eysm_at(double chi, double zeta) {
        LorenzCurve curve = eysm_lorenz(chi, zeta, cfg.solver, cfg.curve_resolution, &cache);
        return UniformCurve{std::move(curve.f), std::move(curve.l), curve.terminal,
                            curve.is_supercritical};
    }

    Value operator()(double chi, double zeta) {
        ++evaluations;
        if (!(chi >= cfg.chi_range.lo && chi <= cfg.chi_range.hi)) {
            ++rejected;
            return {};
        }
        try {
            switch (family) {
            case ModelFamily::Sam: {
                LorenzCurve model = sam_lorenz_curve(chi, cfg.curve_resolution);
                UniformCurve m{std::move(model.f), std::move(model.l), 1.0, false};
                return {plain_discrepancy(emp, m), 0.0};
            }
            case ModelFamily::EysmRedist: {
                UniformCurve m = eysm_at(chi, 0.0);
                return {plain_discrepancy(emp, m), 0.0};
            }
            case ModelFamily::EysmFull: {
                if (!zeta_ok(zeta, chi)) {
                    ++rejected;
                    return {};
                }
                UniformCurve m = eysm_at(chi, zeta);
                return {plain_discrepancy(emp, m), 0.0};
            }
            case ModelFamily::Awm: {
                if (!zeta_ok(zeta, chi)) {
                    ++rejected;
                    return {};
                }
                UniformCurve e = eysm_at(chi, zeta);
                KappaResult k = search_kappa(emp, e, chi, zeta, cfg);
                if (!std::isfinite(k.j)) {
                    ++rejected;
                    return {};
                }
                return {k.j, k.kappa};
            }
            }
        } catch (const ConvergenceError&) {
            ++rejected;
        } catch (const DomainError&) {
            ++rejected;
        }
        return {};
    }

    bool zeta_ok(double zeta, double chi) const {
        if (zeta != 0.0 && !(zeta >= cfg.zeta_range.lo && zeta <= cfg.zeta_range.hi))
            return false;
        // Exclude a narrow band around criticality where the solve stalls.
        return !(std::abs(zeta - chi) < 1e-3 * std::max(chi, zeta));
    }
};

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            std::exp(llo + (lhi - llo) * static_cast<double>(i) / (count - 1));
    return out;
}

struct BestPoint {
    double chi = 0.0, zeta = 0.0, kappa = 0.0;
    double j = kInf;
};

// Nelder-Mead over 1 or 2 outer parameters, +infinity outside the box.
BestPoint nelder_mead(Objective& objective, const BestPoint& start, std::vector<double> step,
                      double tol, int max_iter) {
    const std::size_t dim = step.size();
    using Point = std::vector<double>;

    // One-dimensional families always sit on the zeta = 0 axis.
    auto zeta_of = [&](const Point& x) { return dim > 1 ? x[1] : 0.0; };
    auto eval = [&](const Point& x) -> Objective::Value { return objective(x[0], zeta_of(x)); };

    std::vector<Point> simplex(dim + 1, Point(dim));
    simplex[0][0] = start.chi;
    if (dim > 1)
        simplex[0][1] = start.zeta;
    for (std::size_t i = 0; i < dim; ++i) {
        simplex[i + 1] = simplex[0];
        simplex[i + 1][i] += step[i];
    }

    std::vector<Objective::Value> values(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i)
        values[i] = eval(simplex[i]);

    BestPoint best = start;
    auto track = [&](const Point& x, const Objective::Value& v) {
        if (v.j < best.j) {
            best.chi = x[0];
            best.zeta = zeta_of(x);
            best.kappa = v.kappa;
            best.j = v.j;
        }
    };
    for (std::size_t i = 0; i <= dim; ++i)
        track(simplex[i], values[i]);

    for (int iter = 0; iter < max_iter; ++iter) {
        // order ascending by J
        std::vector<std::size_t> idx(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i)
            idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return values[a].j < values[b].j; });

        const double fbest = values[idx[0]].j;
        const double fworst = values[idx[dim]].j;
        if (std::isfinite(fworst) && fworst - fbest < tol)
            break;

        Point centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k)
                centroid[k] += simplex[idx[i]][k];
        }
        for (double& c : centroid)
            c /= static_cast<double>(dim);

        auto blend = [&](double coef) {
            Point x(dim);
            for (std::size_t k = 0; k < dim; ++k)
                x[k] = centroid[k] + coef * (simplex[idx[dim]][k] - centroid[k]);
            return x;
        };

        Point xr = blend(-1.0); // reflection
        Objective::Value fr = eval(xr);
        track(xr, fr);

        if (fr.j < values[idx[0]].j) {
            Point xe = blend(-2.0); // expansion
            Objective::Value fe = eval(xe);
            track(xe, fe);
            if (fe.j < fr.j) {
                simplex[idx[dim]] = xe;
                values[idx[dim]] = fe;
            } else {
                simplex[idx[dim]] = xr;
                values[idx[dim]] = fr;
            }
        } else if (fr.j < values[idx[dim - 1]].j) {
            simplex[idx[dim]] = xr;
            values[idx[dim]] = fr;
        } else {
            Point xc = blend(0.5); // contraction
            Objective::Value fc = eval(xc);
            track(xc, fc);
            if (fc.j < values[idx[dim]].j) {
                simplex[idx[dim]] = xc;
                values[idx[dim]] = fc;
            } else {
                for (std::size_t i = 1; i <= dim; ++i) { // shrink toward the best
                    for (std::size_t k = 0; k < dim; ++k)
                        simplex[idx[i]][k] =
                            simplex[idx[0]][k] + 0.5 * (simplex[idx[i]][k] - simplex[idx[0]][k]);
                    values[idx[i]] = eval(simplex[idx[i]]);
                    track(simplex[idx[i]], values[idx[i]]);
                }
            }
        }
    }
    return best;
}

} // namespace

std::pair<double, double> fit_kappa(double chi, double zeta, const LorenzCurve& empirical,
                                    const SearchConfig& cfg, SolveCache* cache) {
    cfg.validate();
    SolveCache local(cfg.cache_size);
    SolveCache* use = cache ? cache : &local;
    UniformCurve emp = UniformCurve::from(empirical, cfg.curve_resolution);
    LorenzCurve eysm = eysm_lorenz(chi, zeta, cfg.solver, cfg.curve_resolution, use);
    UniformCurve e{std::move(eysm.f), std::move(eysm.l), eysm.terminal, eysm.is_supercritical};
    KappaResult r = search_kappa(emp, e, chi, zeta, cfg);
    return {r.kappa, r.j};
}

FitReport fit(ModelFamily family, const LorenzCurve& empirical, const SearchConfig& cfg) {
    cfg.validate();
    UniformCurve emp = UniformCurve::from(empirical, cfg.curve_resolution);
    SolveCache cache(cfg.cache_size);
    Objective objective{family, emp, cfg, cache};

    const std::vector<double> chis =
        log_spaced(cfg.chi_range.lo, cfg.chi_range.hi, cfg.grid_density);
    std::vector<double> zetas{0.0};
    if (family == ModelFamily::EysmFull || family == ModelFamily::Awm) {
        // zeta = 0 stays in the scan so the nested families remain reachable.
        std::vector<double> zs = log_spaced(cfg.zeta_range.lo, cfg.zeta_range.hi,
                                            cfg.grid_density);
        zetas.insert(zetas.end(), zs.begin(), zs.end());
    }

    BestPoint best;
    for (double chi : chis) {
        for (double zeta : zetas) {
            Objective::Value v = objective(chi, zeta);
            if (v.j < best.j) {
                best = BestPoint{chi, zeta, v.kappa, v.j};
            }
            if (family == ModelFamily::Sam || family == ModelFamily::EysmRedist)
                break; // one-dimensional families ignore the zeta axis
        }
    }
    if (!std::isfinite(best.j))
        throw ConvergenceError("no feasible point in the coarse scan (all " +
                                   std::to_string(objective.evaluations) + " evaluations failed)",
                               kInf, objective.evaluations);

    // Refinement steps sized by the local grid spacing.
    const double chi_step =
        best.chi * (std::pow(cfg.chi_range.hi / cfg.chi_range.lo, 1.0 / (cfg.grid_density - 1)) -
                    1.0) * 0.5;
    std::vector<double> step{std::max(chi_step, 1e-5)};
    if (family == ModelFamily::EysmFull || family == ModelFamily::Awm) {
        const double zeta_ref = best.zeta > 0.0 ? best.zeta : cfg.zeta_range.lo;
        const double zeta_step =
            zeta_ref *
            (std::pow(cfg.zeta_range.hi / cfg.zeta_range.lo, 1.0 / (cfg.grid_density - 1)) - 1.0) *
            0.5;
        step.push_back(std::max(zeta_step, 1e-5));
    }
    best = nelder_mead(objective, best, step, cfg.refine_tol, 400);

    FitReport report;
    report.theta_opt = ParameterVector{best.chi, best.zeta, best.kappa};
    report.theta_opt.validate();
    report.j_opt = best.j;
    report.evaluations = objective.evaluations;
    report.rejected_points = objective.rejected;
    report.supercritical = report.theta_opt.supercritical();
    report.oligarchy_fraction = oligarchy_fraction(report.theta_opt);
    report.empirical_gini = gini(empirical);

    LorenzCurve model =
        family == ModelFamily::Sam
            ? sam_lorenz_curve(best.chi, cfg.curve_resolution)
            : model_lorenz(report.theta_opt, cfg.solver, cfg.curve_resolution, &cache);
    report.fitted_gini = gini(model);

    report.local_error_profile.reserve(empirical.f.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < empirical.f.size(); ++i) {
        const double e = local_error(empirical.f[i], empirical.l[i], model);
        report.local_error_profile.push_back(e);
        sum += e;
    }
    report.mean_local_error = sum / static_cast<double>(empirical.f.size());
    return report;
}

FitReport fit(ModelFamily family, const EmpiricalDistribution& empirical,
              const SearchConfig& cfg) {
    return fit(family, lorenz_ordinates(empirical), cfg);
}

std::vector<TrendRow> trend(const std::vector<std::pair<std::string, LorenzCurve>>& datasets,
                            ModelFamily family, const SearchConfig& cfg, int jobs) {
    std::vector<TrendRow> rows(datasets.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(datasets.size())));

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= datasets.size())
                return;
            rows[i].label = datasets[i].first;
            try {
                rows[i].report = fit(family, datasets[i].second, cfg);
            } catch (const std::exception& e) {
                rows[i].failed = true;
                rows[i].error = e.what();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    std::sort(rows.begin(), rows.end(),
              [](const TrendRow& a, const TrendRow& b) { return a.label < b.label; });
    return rows;
}

std::string report_to_json(const FitReport& report) {
    nlohmann::json j;
    j["theta"] = {{"chi", report.theta_opt.chi},
                  {"zeta", report.theta_opt.zeta},
                  {"kappa", report.theta_opt.kappa},
                  {"lambda", report.theta_opt.lambda()}};
    j["j_opt"] = report.j_opt;
    j["fitted_gini"] = report.fitted_gini;
    j["empirical_gini"] = report.empirical_gini;
    j["oligarchy_fraction"] = report.oligarchy_fraction;
    j["mean_local_error"] = report.mean_local_error;
    j["evaluations"] = report.evaluations;
    j["rejected_points"] = report.rejected_points;
    j["regime"] = report.supercritical ? "supercritical" : "subcritical";
    return j.dump(2);
}

std::string trend_csv_header() {
    return "label,chi,zeta,kappa,fitting_gini,empirical_gini,oligarchy_fraction";
}

std::string trend_csv_row(const TrendRow& row) {
    if (row.failed)
        return row.label + ",,,,,,failed: " + row.error;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g", row.label.c_str(),
                  row.report.theta_opt.chi, row.report.theta_opt.zeta, row.report.theta_opt.kappa,
                  row.report.fitted_gini, row.report.empirical_gini,
                  row.report.oligarchy_fraction);
    return std::string(buf);
}

} // namespace awm
