#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "awm/empirical.hpp"
#include "awm/fp_solver.hpp"
#include "awm/lorenz.hpp"
#include "awm/model_curve.hpp"
#include "awm/params.hpp"

namespace awm {

// The four nested model families, by their free parameters.
enum class ModelFamily { Sam, EysmRedist, EysmFull, Awm };

int family_dimension(ModelFamily family);            // 1, 1, 2, 3
std::string family_name(ModelFamily family);         // "sam", "eysm-redist", ...
std::optional<ModelFamily> family_from_name(const std::string& name);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct SearchConfig {
    Interval chi_range{0.001, 0.2};
    Interval zeta_range{0.001, 0.2};
    Interval kappa_range{0.0, 0.15};
    int grid_density = 8;        // coarse-stage points per axis
    double refine_tol = 1e-6;    // simplex convergence tolerance on J
    int curve_resolution = 10000;
    std::size_t cache_size = 4096;
    // Scan solves run at a relaxed residual tolerance (the discretization
    // bias largely cancels between nearby parameter vectors) and on a domain
    // wide enough that the tail check rarely forces a restart.
    SolverConfig solver{.w_max = 100.0, .n_cells = 768, .tol_residual = 2e-3};

    void validate() const;
};

struct FitReport {
    ParameterVector theta_opt;
    double j_opt = 0.0;
    double fitted_gini = 0.0;
    double empirical_gini = 0.0;
    double oligarchy_fraction = 0.0;
    double mean_local_error = 0.0;
    std::vector<double> local_error_profile; // per empirical ordinate
    long evaluations = 0;                    // objective evaluations performed
    long rejected_points = 0;                // infeasible / non-converged thetas
    bool supercritical = false;
};

// L1 area between two curves, trapezoid on the shared uniform f-grid with
// `resolution` intervals. Supercritical curves contribute their terminal
// plateau at f = 1 (the vertical segment has zero f-measure).
double discrepancy(const LorenzCurve& a, const LorenzCurve& b, int resolution = 10000);

// Shortest Euclidean distance from an ordinate to the model curve. For a
// supercritical model and l strictly between the terminal value and 1 the
// perpendicular is horizontal, so the distance is |f - 1| exactly.
double local_error(double f, double l, const LorenzCurve& model);

// Closed-form L2-optimal affine shift of an EYSM curve toward an empirical
// one; the seed for the one-dimensional kappa line search.
double lambda_l2_guess(const LorenzCurve& eysm, const LorenzCurve& empirical,
                       int resolution = 10000);

// Golden-section minimization of J over kappa at fixed (chi, zeta), seeded by
// the L2 guess. Solver-free: the affine family over one cached EYSM curve is
// pure arithmetic. Returns (kappa, J); an empty feasible interval yields
// (NaN, +infinity).
std::pair<double, double> fit_kappa(double chi, double zeta, const LorenzCurve& empirical,
                                    const SearchConfig& cfg, SolveCache* cache = nullptr);

// Two-stage global search: coarse scan over the family's free parameters
// (with the nested kappa search for the affine family), then Nelder-Mead
// refinement from the best grid point until J moves less than refine_tol.
FitReport fit(ModelFamily family, const LorenzCurve& empirical, const SearchConfig& cfg = {});
FitReport fit(ModelFamily family, const EmpiricalDistribution& empirical,
              const SearchConfig& cfg = {});

struct TrendRow {
    std::string label;
    FitReport report;
    bool failed = false;
    std::string error;
};

// Independent fits over labeled datasets, optionally fanned out over `jobs`
// threads; failures are reported per row.
std::vector<TrendRow> trend(const std::vector<std::pair<std::string, LorenzCurve>>& datasets,
                            ModelFamily family, const SearchConfig& cfg = {}, int jobs = 1);

std::string report_to_json(const FitReport& report);
std::string trend_csv_header();
std::string trend_csv_row(const TrendRow& row);

} // namespace awm
