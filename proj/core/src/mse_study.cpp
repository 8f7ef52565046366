#include "mlht/mse_study.hpp"

#include <cmath>

#include "mlht/errors.hpp"
#include "mlht/mc_engine.hpp"
#include "mlht/stats.hpp"

namespace mlht {

PlainMCEstimate plain_mc_functional(const SlabProblem& problem, const GridHierarchy& hierarchy,
                                    const FunctionalSpec& spec, double event_budget,
                                    std::uint64_t seed, const TrackingOptions& opts)
{
    if (spec.vector_mode())
        throw ConfigError("plain MC comparison runs on a scalar functional");
    const Grid& grid = hierarchy.finest();
    spec.validate(hierarchy.coarsest().cells());

    TallySet tally(grid);
    const long block = 1000;
    long histories = 0;
    std::uint64_t realization = 0;
    while (static_cast<double>(tally.events) < event_budget) {
        ++realization;
        for (long k = 0; k < block; ++k) {
            RngStream rng(seed, 0xABCDEF, realization, static_cast<std::uint64_t>(k) + 1);
            tally.events += cost::source_sample;
            simulate_history(problem, tally, rng, opts);
        }
        histories += block;
    }
    tally.finalize(histories, problem.total_source());

    // region-aligned integral of the flux: sum of T0 over the region's cells
    int c_lo = 0, c_hi = hierarchy.coarsest().cells();
    if (spec.kind == FunctionalSpec::Kind::coarse_cell) {
        c_lo = spec.cell - 1;
        c_hi = spec.cell;
    }
    const int per = grid.cells() / hierarchy.coarsest().cells();
    double f = 0.0;
    for (int i = c_lo * per; i < c_hi * per; ++i)
        f += tally.cell_moment(0, i);

    PlainMCEstimate est;
    est.value = f;
    est.histories = histories;
    est.cost_events = static_cast<double>(tally.events);
    return est;
}

MSEStudy mse_study(const MLMCConfig& cfg, const SlabProblem& problem,
                   const GridHierarchy& hierarchy, int runs, double reference_value)
{
    if (runs < 1) throw ConfigError("mse_study needs at least one run");
    MSEStudy study;
    study.reference_value = reference_value;
    study.epsilon = cfg.epsilon;

    for (int r = 0; r < runs; ++r) {
        MLMCConfig run_cfg = cfg;
        // distinct, reproducible seed per run
        run_cfg.seed = cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1);
        const MLMCResult res = run_mlmc(run_cfg, problem, hierarchy);
        const double err = res.estimate - reference_value;
        study.mlmc_estimates.push_back(res.estimate);
        study.mlmc_squared_errors.push_back(err * err);
        if (res.weak.available && !res.weak.pass) study.all_weak_pass = false;

        const PlainMCEstimate mc = plain_mc_functional(problem, hierarchy, cfg.functional,
                                                       res.total_cost_events, run_cfg.seed,
                                                       cfg.tracking);
        const double mc_err = mc.value - reference_value;
        study.mc_estimates.push_back(mc.value);
        study.mc_squared_errors.push_back(mc_err * mc_err);
    }
    study.mean_mlmc_mse = sample_mean(study.mlmc_squared_errors);
    study.mean_mc_mse = sample_mean(study.mc_squared_errors);
    return study;
}

} // namespace mlht
