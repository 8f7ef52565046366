#pragma once

#include "mlht/mlmc.hpp"
#include "mlht/sn_reference.hpp"

namespace mlht {

/// Direct track-length estimate of the functional (no low-order solve),
/// used as the fixed-budget comparison column. Runs whole history blocks
/// until the deterministic event budget is spent.
struct PlainMCEstimate {
    double value = 0.0;
    long histories = 0;
    double cost_events = 0.0;
};

PlainMCEstimate plain_mc_functional(const SlabProblem& problem, const GridHierarchy& hierarchy,
                                    const FunctionalSpec& spec, double event_budget,
                                    std::uint64_t seed, const TrackingOptions& opts = {});

/// Repeated independent optimizer runs scored against the grid-converged
/// reference value.
struct MSEStudy {
    double reference_value = 0.0;
    double epsilon = 0.0;
    std::vector<double> mlmc_estimates;
    std::vector<double> mlmc_squared_errors;
    std::vector<double> mc_estimates;
    std::vector<double> mc_squared_errors;
    double mean_mlmc_mse = 0.0;
    double mean_mc_mse = 0.0;
    bool all_weak_pass = true;
};

MSEStudy mse_study(const MLMCConfig& cfg, const SlabProblem& problem,
                   const GridHierarchy& hierarchy, int runs, double reference_value);

} // namespace mlht
