#pragma once

#include <span>
#include <string>
#include <vector>

#include "mlht/functional_spec.hpp"
#include "mlht/lo_solver.hpp"

namespace mlht {

/// Piecewise-constant injection of cell averages from `from_level` up to
/// `to_level`; every fine cell inherits its parent's value.
std::vector<double> prolongate(std::span<const double> values, const GridHierarchy& hierarchy,
                               int from_level, int to_level);

/// Integral of the flux over the spec's region, evaluated on the grid the
/// values live on. The region is aligned with G_0 cells by construction.
double functional_value(std::span<const double> phi, const Grid& grid,
                        const GridHierarchy& hierarchy, const FunctionalSpec& spec);

/// Per-coarse-cell functionals, one value per G_0 cell.
std::vector<double> functional_per_coarse_cell(std::span<const double> phi, const Grid& grid,
                                               const GridHierarchy& hierarchy);

/// Pooled statistics of one level of the multilevel loop. `realizations`
/// counts every sample ever accumulated; the mean correction and the sample
/// vectors grow together.
struct LevelEstimate {
    int level = 0;
    long histories = 0; ///< K_l per realization
    long realizations = 0;

    std::vector<double> dphi_sum; ///< sum over realizations of the correction on G_l
    double dphi_left_sum = 0.0;
    double dphi_right_sum = 0.0;

    std::vector<double> df_samples; ///< per-realization functional correction
    std::vector<double> f_samples;  ///< per-realization fine-grid functional
    std::vector<std::vector<double>> df_cell_samples; ///< [coarse cell][n], vector mode
    std::vector<std::vector<double>> f_cell_samples;

    std::vector<double> cost_events;
    std::vector<double> cost_seconds;

    std::vector<double> mean_dphi() const;
    double mean_df() const;
    double var_df() const;
    double mean_f() const;
    double var_f() const;
    double mean_cost(bool wall_clock) const;
};

enum class ClosureSource { monte_carlo, deterministic };

struct LevelRunOptions {
    ClosureSource closure_source = ClosureSource::monte_carlo;
    /// Per-level closures for ClosureSource::deterministic.
    const std::vector<ClosureSet>* exact_closures = nullptr;
    TrackingOptions tracking;
    int threads = 1;
    bool track_cells = true; ///< accumulate per-cell functional samples
};

/// Appends `count` realizations to the level estimate. Level 0 runs plain
/// hybrid realizations; higher levels pair each fine solve with the coarse
/// solve fed by the restricted tallies of the same histories. Realization
/// seeds continue from est.realizations, so extending is equivalent to one
/// longer run.
void run_realizations(const SlabProblem& problem, const GridHierarchy& hierarchy,
                      int level, long count, long histories, Method method,
                      std::uint64_t seed, const FunctionalSpec& spec,
                      const LevelRunOptions& opts, LevelEstimate& est);

LevelEstimate run_level(const SlabProblem& problem, const GridHierarchy& hierarchy,
                        int level, long realizations, long histories, Method method,
                        std::uint64_t seed, const FunctionalSpec& spec,
                        const LevelRunOptions& opts = {});

/// Telescoped multilevel solution on the target grid.
struct MultilevelSolution {
    Method method = Method::hqd;
    std::vector<double> phi; ///< mean flux on G_L
    double phi_left = 0.0;
    double phi_right = 0.0;
    std::vector<std::vector<double>> partial; ///< partial sums through level l, on G_L
};

MultilevelSolution assemble_solution(const std::vector<LevelEstimate>& levels,
                                     const GridHierarchy& hierarchy, Method method);

/// Fixed-sample multilevel run (one estimate per level).
std::vector<LevelEstimate> run_mlht(const SlabProblem& problem, const GridHierarchy& hierarchy,
                                    std::span<const long> realizations, std::span<const long> histories,
                                    Method method, std::uint64_t seed, const FunctionalSpec& spec,
                                    const LevelRunOptions& opts = {});

/// The per-level CSV behind the level-correction figures.
void write_level_csv(const std::vector<LevelEstimate>& levels, const std::string& path);
void write_dphi_csv(const std::vector<LevelEstimate>& levels, const GridHierarchy& hierarchy,
                    const std::string& path);

} // namespace mlht
