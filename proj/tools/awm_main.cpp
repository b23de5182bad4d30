// Command-line front end: solve / simulate / fit / trend / lorenz / gini /
// transform, emitting plot-ready CSV/JSON. Exit codes: 0 success, 1 I/O or
// data parse failure, 2 infeasible parameters, 3 non-convergence, 64 usage.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "awm/empirical.hpp"
#include "awm/errors.hpp"
#include "awm/fitter.hpp"
#include "awm/fp_solver.hpp"
#include "awm/lorenz.hpp"
#include "awm/model_curve.hpp"
#include "awm/monte_carlo.hpp"
#include "awm/sam.hpp"
#include "awm/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SolveArgs {
    double chi = 0.0, zeta = 0.0, kappa = 0.0;
    awm::SolverConfig solver;
    int resolution = 10000;
    std::string out = "solve";
};

int run_solve(const SolveArgs& a) {
    awm::ParameterVector theta = awm::make_params(a.chi, a.zeta, a.kappa);
    const bool sup = theta.supercritical();
    const double solve_chi = sup ? theta.zeta : theta.chi;
    const double solve_zeta = sup ? theta.chi : theta.zeta;

    awm::SolveOutcome outcome = awm::solve_steady_subcritical(solve_chi, solve_zeta, a.solver);
    awm::LorenzCurve eysm = awm::lorenz_from_density(outcome.density, a.resolution);
    if (sup)
        eysm = awm::dual_lorenz(eysm, theta.chi, theta.zeta);
    awm::LorenzCurve curve = awm::awm_lorenz(eysm, theta);

    awm::ParamMap params{{"chi", theta.chi}, {"zeta", theta.zeta}, {"kappa", theta.kappa}};
    awm::save_lorenz_csv(curve, a.out + "_lorenz.csv");
    awm::save_text(a.out + "_lorenz.json", awm::lorenz_to_json(curve, params));

    // Supercritical parameter sets only admit the dual subcritical density;
    // subcritical ones get the full affine-model density.
    awm::CanonicalDensity density = outcome.density;
    awm::ParamMap dparams = params;
    if (!sup && theta.kappa > 0.0) {
        density = awm::shift_density(awm::scale_density(outcome.density, 1.0, 1.0 + theta.lambda()),
                                     theta);
    } else if (sup) {
        dparams["dual_solve_chi"] = solve_chi;
        dparams["dual_solve_zeta"] = solve_zeta;
    }
    awm::save_text(a.out + "_density.json", awm::density_to_json(density, dparams));

    json diag;
    diag["residual"] = outcome.residual;
    diag["steps"] = outcome.steps;
    diag["mass_drift"] = outcome.mass_drift;
    diag["wealth_drift"] = outcome.wealth_drift;
    diag["tail_mass"] = outcome.tail_mass;
    diag["w_max_used"] = outcome.w_max_used;
    diag["gini"] = awm::gini(curve);
    diag["terminal"] = curve.terminal;
    diag["oligarchy_fraction"] = awm::oligarchy_fraction(theta);
    diag["regime"] = sup ? "supercritical" : "subcritical";
    awm::save_text(a.out + "_diagnostics.json", diag.dump(2));

    std::cout << "gini " << awm::gini(curve) << ", terminal " << curve.terminal << ", residual "
              << outcome.residual << " in " << outcome.steps << " steps\n";
    return 0;
}

struct SimArgs {
    std::string model = "eysm";
    double chi = 0.05, zeta = 0.0, kappa = 0.0;
    int agents = 10000;
    double dt = 0.01;
    long sweeps = 50000;
    std::uint64_t seed = 1;
    std::string json_config;
    std::string out = "simulate";
};

// JSON document route for the simulation config; explicit flags win.
void apply_sim_json(SimArgs& a, const CLI::App* cmd) {
    json j;
    try {
        j = json::parse(awm::load_text(a.json_config));
    } catch (const json::exception& e) {
        throw awm::ParseError(std::string("bad simulation JSON: ") + e.what());
    }
    auto take = [&](const char* flag, const char* key, auto& slot) {
        if (cmd->count(flag) == 0 && j.contains(key))
            slot = j[key].template get<std::decay_t<decltype(slot)>>();
    };
    take("--model", "model", a.model);
    take("--chi", "chi", a.chi);
    take("--zeta", "zeta", a.zeta);
    take("--kappa", "kappa", a.kappa);
    take("--agents", "agents", a.agents);
    take("--dt", "dt", a.dt);
    take("--sweeps", "sweeps", a.sweeps);
    take("--seed", "seed", a.seed);
}

int run_simulate(const SimArgs& a) {
    awm::SimConfig cfg;
    cfg.n_agents = a.agents;
    cfg.dt = a.dt;
    cfg.sweeps = a.sweeps;
    cfg.seed = a.seed;
    cfg.theta = awm::ParameterVector{a.chi, a.zeta, a.kappa};
    if (a.model == "sam")
        cfg.model = awm::ModelKind::Sam;
    else if (a.model == "eysm")
        cfg.model = awm::ModelKind::Eysm;
    else if (a.model == "awm")
        cfg.model = awm::ModelKind::Awm;
    else
        throw awm::ParseError("unknown simulation model '" + a.model + "'");

    awm::WealthEnsemble ens = awm::run(cfg);
    awm::LorenzCurve curve = awm::empirical_lorenz(ens);
    awm::save_lorenz_csv(curve, a.out + "_lorenz.csv");

    std::string wealths = "w\n";
    char buf[64];
    for (double w : ens.wealths) {
        std::snprintf(buf, sizeof buf, "%.17g\n", w);
        wealths += buf;
    }
    awm::save_text(a.out + "_ensemble.csv", wealths);

    const double top_agent = awm::top_wealth_share(ens, 1e-9); // clamps to one agent
    json summary;
    summary["time"] = ens.time;
    summary["seed"] = ens.seed;
    summary["clamp_events"] = ens.clamp_events;
    summary["gini"] = awm::gini(curve);
    summary["top_agent_share"] = top_agent;
    summary["top_0.1pct_share"] = awm::top_wealth_share(ens, 1e-3);
    awm::save_text(a.out + "_summary.json", summary.dump(2));

    std::cout << "gini " << awm::gini(curve) << ", top-agent share " << top_agent << "\n";
    return 0;
}

struct FitArgs {
    std::string model = "awm";
    std::string data;
    std::string extra; // optional second dataset merged in (e.g. a rich list)
    awm::SearchConfig search;
    std::string out = "fit";
};

awm::LorenzCurve load_empirical(const std::string& data, const std::string& extra) {
    awm::EmpiricalDistribution d = awm::load_households_file(data);
    if (!extra.empty())
        d = awm::merge(d, awm::load_households_file(extra));
    return awm::lorenz_ordinates(awm::canonicalize(std::move(d)));
}

int run_fit(const FitArgs& a) {
    auto family = awm::family_from_name(a.model);
    awm::LorenzCurve empirical = load_empirical(a.data, a.extra);
    awm::FitReport report = awm::fit(*family, empirical, a.search);

    awm::save_text(a.out + "_report.json", awm::report_to_json(report));

    std::string errs = "f,distance\n";
    char buf[80];
    for (std::size_t i = 0; i < report.local_error_profile.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", empirical.f[i],
                      report.local_error_profile[i]);
        errs += buf;
    }
    awm::save_text(a.out + "_local_error.csv", errs);

    awm::LorenzCurve model =
        *family == awm::ModelFamily::Sam
            ? awm::sam_lorenz_curve(report.theta_opt.chi, a.search.curve_resolution)
            : awm::model_lorenz(report.theta_opt, a.search.solver, a.search.curve_resolution);
    std::string overlay = "f,empirical,model\n";
    for (std::size_t i = 0; i < model.f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", model.f[i],
                      empirical.value_at(model.f[i]), model.l[i]);
        overlay += buf;
    }
    awm::save_text(a.out + "_overlay.csv", overlay);

    std::cout << awm::report_to_json(report) << "\n";
    return 0;
}

struct TrendArgs {
    std::string model = "awm";
    std::string data_dir;
    awm::SearchConfig search;
    std::string out = "trend.csv";
    int jobs = 1;
};

int run_trend(const TrendArgs& a) {
    auto family = awm::family_from_name(a.model);
    std::vector<std::pair<std::string, awm::LorenzCurve>> datasets;
    if (!fs::is_directory(a.data_dir))
        throw awm::IoError("'" + a.data_dir + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.data_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    if (files.empty())
        throw awm::IoError("no .csv files in '" + a.data_dir + "'");
    std::sort(files.begin(), files.end());
    for (const auto& path : files)
        datasets.emplace_back(path.stem().string(), load_empirical(path.string(), ""));

    std::vector<awm::TrendRow> rows = awm::trend(datasets, *family, a.search, a.jobs);
    std::string csv = awm::trend_csv_header() + "\n";
    for (const auto& row : rows)
        csv += awm::trend_csv_row(row) + "\n";
    awm::save_text(a.out, csv);
    std::cout << csv;
    return 0;
}

void add_solver_options(CLI::App* cmd, awm::SolverConfig& solver) {
    cmd->add_option("--grid", solver.n_cells, "Grid cells (>= 256)");
    cmd->add_option("--w-max", solver.w_max, "Upper wealth cutoff in mean units (>= 10)");
    cmd->add_option("--tol", solver.tol_residual, "Steady-state residual tolerance");
    cmd->add_option("--max-steps", solver.max_steps, "Pseudo-time iteration cap");
    cmd->add_option("--dt", solver.dt, "Pseudo-time step cap");
}

void add_search_options(CLI::App* cmd, awm::SearchConfig& search) {
    cmd->add_option("--grid-density", search.grid_density, "Coarse scan points per axis");
    cmd->add_option("--refine-tol", search.refine_tol, "Simplex convergence tolerance on J");
    cmd->add_option("--resolution", search.curve_resolution, "f-grid size for J evaluation");
    cmd->add_option("--chi-lo", search.chi_range.lo);
    cmd->add_option("--chi-hi", search.chi_range.hi);
    cmd->add_option("--zeta-lo", search.zeta_range.lo);
    cmd->add_option("--zeta-hi", search.zeta_range.hi);
    cmd->add_option("--kappa-lo", search.kappa_range.lo);
    cmd->add_option("--kappa-hi", search.kappa_range.hi);
    cmd->add_option("--solver-grid", search.solver.n_cells, "Solver cells for fit evaluations");
    cmd->add_option("--solver-w-max", search.solver.w_max);
    cmd->add_option("--solver-tol", search.solver.tol_residual);
    cmd->add_option("--solver-max-steps", search.solver.max_steps);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine wealth model toolkit: solvers, simulation, analytics, fitting"};
    app.require_subcommand(1);
    app.set_config("--config")->envname("AWM_CONFIG");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Steady-state Lorenz curve and density for theta");
    solve->add_option("--chi", solve_args.chi, "Redistribution rate")->required();
    solve->add_option("--zeta", solve_args.zeta, "Wealth-attained-advantage coefficient");
    solve->add_option("--kappa", solve_args.kappa, "Affine shift fraction");
    solve->add_option("--resolution", solve_args.resolution, "Lorenz f-grid resolution");
    solve->add_option("--out", solve_args.out, "Output file prefix");
    add_solver_options(solve, solve_args.solver);

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Agent-based Monte Carlo run");
    sim->add_option("--model", sim_args.model, "sam | eysm | awm")
        ->check(CLI::IsMember({"sam", "eysm", "awm"}));
    sim->add_option("--chi", sim_args.chi);
    sim->add_option("--zeta", sim_args.zeta);
    sim->add_option("--kappa", sim_args.kappa);
    sim->add_option("--agents", sim_args.agents);
    sim->add_option("--dt", sim_args.dt);
    sim->add_option("--sweeps", sim_args.sweeps);
    sim->add_option("--seed", sim_args.seed);
    sim->add_option("--json", sim_args.json_config, "Simulation config as a JSON document");
    sim->add_option("--out", sim_args.out, "Output file prefix");

    FitArgs fit_args;
    auto* fitcmd = app.add_subcommand("fit", "Fit a model family to weighted household data");
    fitcmd->add_option("--model", fit_args.model, "sam | eysm-redist | eysm-full | awm")
        ->check(CLI::IsMember({"sam", "eysm-redist", "eysm-full", "awm"}));
    fitcmd->add_option("--data", fit_args.data, "weight,networth CSV")->required();
    fitcmd->add_option("--merge", fit_args.extra, "Second CSV merged in before fitting");
    fitcmd->add_option("--out", fit_args.out, "Output file prefix");
    add_search_options(fitcmd, fit_args.search);

    TrendArgs trend_args;
    auto* trendcmd = app.add_subcommand("trend", "Fit every CSV in a directory; one row per file");
    trendcmd->add_option("--model", trend_args.model)
        ->check(CLI::IsMember({"sam", "eysm-redist", "eysm-full", "awm"}));
    trendcmd->add_option("--data-dir", trend_args.data_dir)->required();
    trendcmd->add_option("--out", trend_args.out, "Output CSV path");
    trendcmd->add_option("--jobs", trend_args.jobs, "Concurrent fits");
    add_search_options(trendcmd, trend_args.search);

    std::string lorenz_data, lorenz_density, lorenz_out = "lorenz.csv", lorenz_out_json;
    auto* lorenzcmd =
        app.add_subcommand("lorenz", "Lorenz ordinates from household data or a density");
    auto* opt_data = lorenzcmd->add_option("--data", lorenz_data, "weight,networth CSV");
    auto* opt_density = lorenzcmd->add_option("--density", lorenz_density, "Density JSON");
    opt_data->excludes(opt_density);
    lorenzcmd->add_option("--out", lorenz_out, "Output curve CSV path");
    lorenzcmd->add_option("--out-json", lorenz_out_json, "Also write the JSON curve here");

    std::string gini_curve;
    auto* ginicmd = app.add_subcommand("gini", "Gini coefficient of a Lorenz curve CSV");
    ginicmd->add_option("--curve", gini_curve)->required();

    std::string tr_op, tr_curve, tr_density, tr_out = "transform_out";
    double tr_chi = 0.0, tr_zeta = 0.0, tr_kappa = 0.0, tr_n = 1.0, tr_w = 1.0;
    auto* transform = app.add_subcommand("transform", "Apply one exact symmetry");
    transform->add_option("--op", tr_op, "dual | shift | scale")
        ->required()
        ->check(CLI::IsMember({"dual", "shift", "scale"}));
    transform->add_option("--curve", tr_curve, "Input curve CSV (dual)");
    transform->add_option("--density", tr_density, "Input density JSON (shift/scale)");
    transform->add_option("--chi", tr_chi);
    transform->add_option("--zeta", tr_zeta);
    transform->add_option("--kappa", tr_kappa);
    transform->add_option("--n", tr_n);
    transform->add_option("--w", tr_w);
    transform->add_option("--out", tr_out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (solve->parsed())
            return run_solve(solve_args);
        if (sim->parsed()) {
            if (!sim_args.json_config.empty())
                apply_sim_json(sim_args, sim);
            return run_simulate(sim_args);
        }
        if (fitcmd->parsed())
            return run_fit(fit_args);
        if (trendcmd->parsed())
            return run_trend(trend_args);
        if (lorenzcmd->parsed()) {
            awm::LorenzCurve curve;
            if (!lorenz_data.empty()) {
                curve = load_empirical(lorenz_data, "");
            } else if (!lorenz_density.empty()) {
                curve = awm::lorenz_from_density(
                    awm::density_from_json(awm::load_text(lorenz_density)));
            } else {
                std::cerr << "lorenz: need --data or --density\n";
                return 64;
            }
            awm::save_lorenz_csv(curve, lorenz_out);
            if (!lorenz_out_json.empty())
                awm::save_text(lorenz_out_json, awm::lorenz_to_json(curve));
            std::cout << "gini " << awm::gini(curve) << "\n";
            return 0;
        }
        if (ginicmd->parsed()) {
            awm::LorenzCurve curve = awm::load_lorenz_csv(gini_curve);
            std::printf("%.10g\n", awm::gini(curve));
            return 0;
        }
        if (transform->parsed()) {
            if (tr_op == "dual") {
                if (tr_curve.empty())
                    throw awm::DomainError("dual transform needs --curve");
                awm::LorenzCurve sub = awm::load_lorenz_csv(tr_curve);
                awm::LorenzCurve out = awm::dual_lorenz(sub, tr_chi, tr_zeta);
                awm::save_lorenz_csv(out, tr_out);
                std::cout << "terminal " << out.terminal << "\n";
            } else {
                if (tr_density.empty())
                    throw awm::DomainError(tr_op + " transform needs --density");
                awm::CanonicalDensity d = awm::density_from_json(awm::load_text(tr_density));
                awm::CanonicalDensity out;
                if (tr_op == "shift") {
                    // Only kappa matters for the shift; chi defaults keep theta valid.
                    awm::ParameterVector theta{tr_chi > 0.0 ? tr_chi : 1.0, tr_zeta, tr_kappa};
                    out = awm::shift_density(d, theta);
                } else {
                    out = awm::scale_density(d, tr_n, tr_w);
                }
                awm::save_text(tr_out, awm::density_to_json(out));
                std::cout << "support_lo " << out.support_lo << "\n";
            }
            return 0;
        }
    } catch (const awm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const awm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const awm::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const awm::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}
