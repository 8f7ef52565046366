#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mlht/mlht.hpp"

namespace mlht {

struct MLMCConfig {
    double epsilon = 1e-3;          ///< target RMSE of the functional
    long n_ini = 10;                ///< initial realizations per level (>= 2)
    std::vector<long> histories;    ///< K_l per level (constant if size 1)
    Method method = Method::hqd;
    FunctionalSpec functional = FunctionalSpec::domain();
    std::uint64_t seed = 1;
    std::optional<double> alpha_override; ///< use instead of the fitted rate
    bool wall_clock_cost = false;   ///< optimizer cost metric: seconds instead of events
    long realization_cap = 2'000'000; ///< abort guard on total requested realizations
    bool max_variance_rule = false; ///< vector mode: use max_i V_i instead of max_i N_i
    int threads = 1;
    ClosureSource closure_source = ClosureSource::monte_carlo;
    const std::vector<ClosureSet>* exact_closures = nullptr;
    TrackingOptions tracking;

    void validate(const GridHierarchy& hierarchy) const;
    std::vector<long> histories_per_level(int num_levels) const;
};

struct LevelReport {
    int level = 0;
    long realizations = 0;
    long histories = 0;
    double mean_df = 0.0;
    double var_df = 0.0;
    double mean_f = 0.0;
    double var_f = 0.0;
    double cost_events = 0.0;
    double cost_seconds = 0.0;
    std::optional<double> kurtosis;
    std::optional<double> eta;  ///< consistency check, levels >= 1
};

struct RateFit {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    bool available = false;
};

struct WeakConvergence {
    std::vector<double> values; ///< W for l_hat = L-2, L-1, L
    bool pass = false;
    bool available = false;
};

struct CellReport {
    int cell = 0;    ///< 1-based G_0 index
    double estimate = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double max_weak = 0.0;
};

struct MLMCResult {
    double estimate = 0.0;  ///< <F_L>, the sum of stored level means
    double epsilon = 0.0;
    Method method = Method::hqd;
    std::vector<LevelReport> levels;
    RateFit rates;
    WeakConvergence weak;
    bool variance_budget_met = false;
    double variance_of_estimator = 0.0; ///< sum V_l / N_l
    double total_cost_events = 0.0;
    double total_cost_seconds = 0.0;
    bool aborted_on_budget = false;
    bool eta_ok = true; ///< all |eta_l| < 1

    // vector mode extras
    bool vector_mode = false;
    std::vector<CellReport> cells;
    double min_alpha = 0.0;
    double min_beta = 0.0;
    double max_weak = 0.0;

    std::vector<double> flux; ///< assembled mean flux on G_L
};

/// Variance-optimal sample counts: ceil((2/eps^2) sqrt(V_l/C_l) sum sqrt(V C)).
/// Levels with zero variance request zero samples.
std::vector<long> optimal_samples(std::span<const double> variance, std::span<const double> cost,
                                  double epsilon);

/// Least-squares rates over correction levels 1..L: alpha from log2 of the
/// mean corrections (decay positive), beta from log2 variances, gamma from
/// log2 costs (growth positive). Slopes are per grid-refinement octave.
RateFit fit_rates(std::span<const double> mean_df, std::span<const double> var_df,
                  std::span<const double> cost, int refinement);

/// Remaining-bias check W = |<dF>| / (2^alpha - 1) < eps/sqrt(2) for the
/// last three levels.
WeakConvergence weak_convergence(std::span<const double> mean_df_last3, double alpha,
                                 double epsilon);

/// Fourth standardized moment of the correction samples; nullopt when
/// undefined (constant samples, deterministic closures).
std::optional<double> kurtosis(std::span<const double> samples);

/// Telescoping residual normalized by 3x the summed standard errors.
/// Returns 0 when all three spreads vanish (deterministic mode).
double consistency_check(double mean_f_prev, double se_f_prev, double mean_f, double se_f,
                         double mean_df, double se_df);

/// Vector-of-functionals sample rule. Rule 1 (default): per-cell optimal N,
/// take max over cells. Rule 2 (max_variance_rule): feed max_i V_{i,l} to
/// optimal_samples. Rule 2 never requests fewer samples than rule 1.
std::vector<long> vector_mode_samples(const std::vector<std::vector<double>>& cell_variances,
                                      std::span<const double> cost, double epsilon,
                                      bool max_variance_rule);

/// Three-stage sample-allocation loop around the multilevel driver, with
/// rate fits, weak-convergence and consistency diagnostics.
MLMCResult run_mlmc(const MLMCConfig& cfg, const SlabProblem& problem,
                    const GridHierarchy& hierarchy);

} // namespace mlht
