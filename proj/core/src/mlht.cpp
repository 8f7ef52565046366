#include "mlht/mlht.hpp"

#include <cmath>
#include <fstream>

#include "mlht/errors.hpp"
#include "mlht/parallel.hpp"
#include "mlht/stats.hpp"

namespace mlht {

std::vector<double> prolongate(std::span<const double> values, const GridHierarchy& hierarchy,
                               int from_level, int to_level)
{
    if (to_level < from_level)
        throw InternalError("prolongate: target level coarser than source");
    if (static_cast<int>(values.size()) != hierarchy.grid(from_level).cells())
        throw InternalError("prolongate: value/grid size mismatch");
    std::vector<double> v(values.begin(), values.end());
    const int a = hierarchy.refinement();
    for (int l = from_level; l < to_level; ++l) {
        std::vector<double> fine(v.size() * static_cast<std::size_t>(a));
        for (std::size_t i = 0; i < v.size(); ++i)
            for (int m = 0; m < a; ++m)
                fine[i * static_cast<std::size_t>(a) + static_cast<std::size_t>(m)] = v[i];
        v = std::move(fine);
    }
    return v;
}

namespace {

// Fine-cell index range [lo, hi) covered by coarse cells [c_lo, c_hi).
std::pair<int, int> fine_range(const GridHierarchy& hierarchy, const Grid& grid,
                               int c_lo, int c_hi)
{
    const int per = grid.cells() / hierarchy.coarsest().cells();
    return {c_lo * per, c_hi * per};
}

} // namespace

double functional_value(std::span<const double> phi, const Grid& grid,
                        const GridHierarchy& hierarchy, const FunctionalSpec& spec)
{
    const int coarse_cells = hierarchy.coarsest().cells();
    spec.validate(coarse_cells);
    int c_lo = 0, c_hi = coarse_cells;
    if (spec.kind == FunctionalSpec::Kind::coarse_cell) {
        c_lo = spec.cell - 1;
        c_hi = spec.cell;
    } else if (spec.kind == FunctionalSpec::Kind::per_coarse_cell_vector) {
        throw InternalError("functional_value: use functional_per_coarse_cell for vector specs");
    }
    auto [lo, hi] = fine_range(hierarchy, grid, c_lo, c_hi);
    double f = 0.0;
    for (int i = lo; i < hi; ++i)
        f += phi[static_cast<std::size_t>(i)] * grid.width(i);
    return f;
}

std::vector<double> functional_per_coarse_cell(std::span<const double> phi, const Grid& grid,
                                               const GridHierarchy& hierarchy)
{
    const int coarse_cells = hierarchy.coarsest().cells();
    std::vector<double> out(static_cast<std::size_t>(coarse_cells));
    for (int c = 0; c < coarse_cells; ++c) {
        auto [lo, hi] = fine_range(hierarchy, grid, c, c + 1);
        double f = 0.0;
        for (int i = lo; i < hi; ++i)
            f += phi[static_cast<std::size_t>(i)] * grid.width(i);
        out[static_cast<std::size_t>(c)] = f;
    }
    return out;
}

std::vector<double> LevelEstimate::mean_dphi() const
{
    std::vector<double> m(dphi_sum);
    const double inv = realizations > 0 ? 1.0 / static_cast<double>(realizations) : 0.0;
    for (double& v : m) v *= inv;
    return m;
}

double LevelEstimate::mean_df() const { return sample_mean(df_samples); }
double LevelEstimate::var_df() const { return sample_variance(df_samples); }
double LevelEstimate::mean_f() const { return sample_mean(f_samples); }
double LevelEstimate::var_f() const { return sample_variance(f_samples); }

double LevelEstimate::mean_cost(bool wall_clock) const
{
    return wall_clock ? sample_mean(cost_seconds) : sample_mean(cost_events);
}

void run_realizations(const SlabProblem& problem, const GridHierarchy& hierarchy,
                      int level, long count, long histories, Method method,
                      std::uint64_t seed, const FunctionalSpec& spec,
                      const LevelRunOptions& opts, LevelEstimate& est)
{
    if (count <= 0) return;
    if (histories < 1) throw ConfigError("histories per realization must be >= 1");
    const Grid& grid = hierarchy.grid(level);

    if (est.realizations == 0) {
        est.level = level;
        est.histories = histories;
        est.dphi_sum.assign(static_cast<std::size_t>(grid.cells()), 0.0);
        if (opts.track_cells) {
            est.df_cell_samples.assign(static_cast<std::size_t>(hierarchy.coarsest().cells()), {});
            est.f_cell_samples.assign(static_cast<std::size_t>(hierarchy.coarsest().cells()), {});
        }
    }
    if (est.level != level || est.histories != histories)
        throw InternalError("run_realizations: level estimate bound to different parameters");

    RealizationOptions ropts;
    ropts.with_coarse = level >= 1;
    ropts.tracking = opts.tracking;
    if (opts.closure_source == ClosureSource::deterministic) {
        if (!opts.exact_closures)
            throw InternalError("deterministic closure source requires a closure table");
        ropts.exact_closures = opts.exact_closures;
    }

    std::vector<RealizationPair> slots(static_cast<std::size_t>(count));
    const long base = est.realizations;
    parallel_for(static_cast<std::size_t>(count), resolve_threads(opts.threads), [&](std::size_t j) {
        StreamId id{seed, static_cast<std::uint64_t>(level),
                    static_cast<std::uint64_t>(base + static_cast<long>(j) + 1)};
        slots[j] = hybrid_realization(problem, hierarchy, level, method, histories, id, ropts);
    });

    // ordered reduction keeps results independent of the worker count
    const bool track_cells = opts.track_cells;
    for (auto& pair : slots) {
        const auto& fine = pair.fine;
        double df, f;
        std::vector<double> f_cells, df_cells;
        if (track_cells) {
            f_cells = functional_per_coarse_cell(fine.phi, grid, hierarchy);
            df_cells = f_cells;
        }
        // vector mode keeps the whole-domain functional in the scalar slots
        const FunctionalSpec scalar_spec =
            spec.vector_mode() ? FunctionalSpec::domain() : spec;
        f = functional_value(fine.phi, grid, hierarchy, scalar_spec);
        df = f;

        double cost_events = static_cast<double>(fine.cost.events);
        if (level >= 1) {
            const auto& coarse = *pair.coarse;
            const std::vector<double> coarse_on_fine =
                prolongate(coarse.phi, hierarchy, level - 1, level);
            for (std::size_t i = 0; i < fine.phi.size(); ++i)
                est.dphi_sum[i] += fine.phi[i] - coarse_on_fine[i];
            est.dphi_left_sum += fine.phi_left - coarse.phi_left;
            est.dphi_right_sum += fine.phi_right - coarse.phi_right;
            df = f - functional_value(coarse.phi, hierarchy.grid(level - 1), hierarchy, scalar_spec);
            if (track_cells) {
                const auto coarse_cells_f =
                    functional_per_coarse_cell(coarse.phi, hierarchy.grid(level - 1), hierarchy);
                for (std::size_t cidx = 0; cidx < df_cells.size(); ++cidx)
                    df_cells[cidx] -= coarse_cells_f[cidx];
            }
            cost_events += static_cast<double>(coarse.cost.events);
        } else {
            for (std::size_t i = 0; i < fine.phi.size(); ++i)
                est.dphi_sum[i] += fine.phi[i];
            est.dphi_left_sum += fine.phi_left;
            est.dphi_right_sum += fine.phi_right;
        }

        est.df_samples.push_back(df);
        est.f_samples.push_back(f);
        if (track_cells) {
            for (std::size_t cidx = 0; cidx < df_cells.size(); ++cidx) {
                est.df_cell_samples[cidx].push_back(df_cells[cidx]);
                est.f_cell_samples[cidx].push_back(f_cells[cidx]);
            }
        }
        est.cost_events.push_back(cost_events);
        est.cost_seconds.push_back(fine.cost.seconds);
        ++est.realizations;
    }
}

LevelEstimate run_level(const SlabProblem& problem, const GridHierarchy& hierarchy,
                        int level, long realizations, long histories, Method method,
                        std::uint64_t seed, const FunctionalSpec& spec,
                        const LevelRunOptions& opts)
{
    LevelEstimate est;
    run_realizations(problem, hierarchy, level, realizations, histories, method, seed, spec,
                     opts, est);
    return est;
}

MultilevelSolution assemble_solution(const std::vector<LevelEstimate>& levels,
                                     const GridHierarchy& hierarchy, Method method)
{
    if (static_cast<int>(levels.size()) != hierarchy.num_levels())
        throw InternalError("assemble_solution: expected estimates for levels 0..L");
    const int top = hierarchy.correction_levels();

    MultilevelSolution sol;
    sol.method = method;
    sol.phi.assign(static_cast<std::size_t>(hierarchy.finest().cells()), 0.0);
    for (int l = 0; l <= top; ++l) {
        const auto& est = levels[static_cast<std::size_t>(l)];
        if (est.level != l || est.realizations == 0)
            throw InternalError("assemble_solution: missing level " + std::to_string(l));
        const std::vector<double> on_target = prolongate(est.mean_dphi(), hierarchy, l, top);
        for (std::size_t i = 0; i < sol.phi.size(); ++i)
            sol.phi[i] += on_target[i];
        const double inv = 1.0 / static_cast<double>(est.realizations);
        sol.phi_left += est.dphi_left_sum * inv;
        sol.phi_right += est.dphi_right_sum * inv;
        sol.partial.push_back(sol.phi);
    }
    return sol;
}

std::vector<LevelEstimate> run_mlht(const SlabProblem& problem, const GridHierarchy& hierarchy,
                                    std::span<const long> realizations, std::span<const long> histories,
                                    Method method, std::uint64_t seed, const FunctionalSpec& spec,
                                    const LevelRunOptions& opts)
{
    if (static_cast<int>(realizations.size()) != hierarchy.num_levels() ||
        static_cast<int>(histories.size()) != hierarchy.num_levels())
        throw ConfigError("run_mlht: need realization and history counts for levels 0..L");
    std::vector<LevelEstimate> levels;
    levels.reserve(realizations.size());
    for (int l = 0; l < hierarchy.num_levels(); ++l)
        levels.push_back(run_level(problem, hierarchy, l, realizations[static_cast<std::size_t>(l)],
                                   histories[static_cast<std::size_t>(l)], method, seed, spec, opts));
    return levels;
}

void write_level_csv(const std::vector<LevelEstimate>& levels, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write level csv: " + path);
    out << "level,N,K,mean_dF,var_dF,mean_F,var_F,cost_events,cost_seconds\n";
    out.precision(16);
    for (const auto& est : levels)
        out << est.level << ',' << est.realizations << ',' << est.histories << ','
            << est.mean_df() << ',' << est.var_df() << ',' << est.mean_f() << ','
            << est.var_f() << ',' << est.mean_cost(false) << ',' << est.mean_cost(true) << '\n';
}

void write_dphi_csv(const std::vector<LevelEstimate>& levels, const GridHierarchy& hierarchy,
                    const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write correction csv: " + path);
    out << "level,cell,x_mid,mean_dphi\n";
    out.precision(16);
    for (const auto& est : levels) {
        const Grid& g = hierarchy.grid(est.level);
        const std::vector<double> m = est.mean_dphi();
        for (int i = 0; i < g.cells(); ++i)
            out << est.level << ',' << i + 1 << ',' << g.center(i) << ','
                << m[static_cast<std::size_t>(i)] << '\n';
    }
}

} // namespace mlht
