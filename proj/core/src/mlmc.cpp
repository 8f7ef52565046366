#include "mlht/mlmc.hpp"

#include <algorithm>
#include <cmath>

#include "mlht/errors.hpp"
#include "mlht/stats.hpp"

namespace mlht {

void MLMCConfig::validate(const GridHierarchy& hierarchy) const
{
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (n_ini < 2) throw ConfigError("n_ini must be >= 2 (variance needs two samples)");
    if (realization_cap < 1) throw ConfigError("realization cap must be positive");
    functional.validate(hierarchy.coarsest().cells());
    if (!histories.empty() && histories.size() != 1 &&
        static_cast<int>(histories.size()) != hierarchy.num_levels())
        throw ConfigError("histories vector must have one entry or one per level");
    if (closure_source == ClosureSource::deterministic && exact_closures == nullptr)
        throw ConfigError("deterministic closure source needs a closure table");
}

std::vector<long> MLMCConfig::histories_per_level(int num_levels) const
{
    std::vector<long> k(static_cast<std::size_t>(num_levels), 10000);
    if (histories.size() == 1)
        std::fill(k.begin(), k.end(), histories.front());
    else if (!histories.empty())
        k.assign(histories.begin(), histories.end());
    for (long v : k)
        if (v < 1) throw ConfigError("histories per level must be >= 1");
    return k;
}

std::vector<long> optimal_samples(std::span<const double> variance, std::span<const double> cost,
                                  double epsilon)
{
    if (variance.size() != cost.size())
        throw InternalError("optimal_samples: variance/cost size mismatch");
    if (!(epsilon > 0.0)) throw ConfigError("optimal_samples: epsilon must be positive");
    double vc_sum = 0.0;
    for (std::size_t l = 0; l < variance.size(); ++l) {
        if (variance[l] < 0.0 || !(cost[l] > 0.0))
            throw InternalError("optimal_samples: needs V >= 0 and C > 0");
        vc_sum += std::sqrt(variance[l] * cost[l]);
    }
    std::vector<long> n(variance.size(), 0);
    for (std::size_t l = 0; l < variance.size(); ++l) {
        if (variance[l] == 0.0) continue;
        const double raw = 2.0 / (epsilon * epsilon) * std::sqrt(variance[l] / cost[l]) * vc_sum;
        n[l] = static_cast<long>(std::ceil(raw));
    }
    return n;
}

RateFit fit_rates(std::span<const double> mean_df, std::span<const double> var_df,
                  std::span<const double> cost, int refinement)
{
    RateFit fit;
    // correction levels only (index 1..L); need >= 2 usable levels
    std::vector<double> ls, la, lv, lc;
    for (std::size_t l = 1; l < mean_df.size(); ++l) {
        if (!(std::abs(mean_df[l]) > 0.0) || !(var_df[l] > 0.0) || !(cost[l] > 0.0))
            continue;
        ls.push_back(static_cast<double>(l));
        la.push_back(std::log2(std::abs(mean_df[l])));
        lv.push_back(std::log2(var_df[l]));
        lc.push_back(std::log2(cost[l]));
    }
    if (ls.size() < 2) return fit;
    const double per_octave = std::log2(static_cast<double>(refinement));
    fit.alpha = -least_squares_slope(ls, la) / per_octave;
    fit.beta = -least_squares_slope(ls, lv) / per_octave;
    fit.gamma = least_squares_slope(ls, lc) / per_octave;
    fit.available = true;
    return fit;
}

WeakConvergence weak_convergence(std::span<const double> mean_df_last3, double alpha,
                                 double epsilon)
{
    WeakConvergence w;
    if (mean_df_last3.empty()) return w;
    const double denom = std::pow(2.0, alpha) - 1.0;
    double worst = 0.0;
    for (double m : mean_df_last3) {
        const double v = std::abs(m) / denom;
        w.values.push_back(v);
        worst = std::max(worst, v);
    }
    w.pass = worst < epsilon / std::sqrt(2.0);
    w.available = true;
    return w;
}

std::optional<double> kurtosis(std::span<const double> samples)
{
    return sample_kurtosis(samples);
}

double consistency_check(double mean_f_prev, double se_f_prev, double mean_f, double se_f,
                         double mean_df, double se_df)
{
    const double denom = 3.0 * (se_f_prev + se_f + se_df);
    const double num = mean_f_prev - mean_f + mean_df;
    if (denom == 0.0) return 0.0; // deterministic closures
    return num / denom;
}

std::vector<long> vector_mode_samples(const std::vector<std::vector<double>>& cell_variances,
                                      std::span<const double> cost, double epsilon,
                                      bool max_variance_rule)
{
    const std::size_t n_cells = cell_variances.size();
    if (n_cells == 0) throw InternalError("vector_mode_samples: no cells");
    const std::size_t n_levels = cell_variances.front().size();
    if (n_levels != cost.size())
        throw InternalError("vector_mode_samples: level count mismatch");

    if (max_variance_rule) {
        std::vector<double> vmax(n_levels, 0.0);
        for (const auto& row : cell_variances)
            for (std::size_t l = 0; l < n_levels; ++l)
                vmax[l] = std::max(vmax[l], row[l]);
        return optimal_samples(vmax, cost, epsilon);
    }

    std::vector<long> n(n_levels, 0);
    for (const auto& row : cell_variances) {
        const std::vector<long> ni = optimal_samples(row, cost, epsilon);
        for (std::size_t l = 0; l < n_levels; ++l)
            n[l] = std::max(n[l], ni[l]);
    }
    return n;
}

namespace {

std::vector<double> level_variances(const std::vector<LevelEstimate>& levels)
{
    std::vector<double> v;
    v.reserve(levels.size());
    for (const auto& est : levels) v.push_back(est.var_df());
    return v;
}

std::vector<double> level_costs(const std::vector<LevelEstimate>& levels, bool wall_clock)
{
    std::vector<double> c;
    c.reserve(levels.size());
    for (const auto& est : levels) c.push_back(std::max(est.mean_cost(wall_clock), 1e-300));
    return c;
}

// per-cell variance table [cell][level]
std::vector<std::vector<double>> cell_variance_table(const std::vector<LevelEstimate>& levels)
{
    const std::size_t n_cells = levels.front().df_cell_samples.size();
    std::vector<std::vector<double>> v(n_cells, std::vector<double>(levels.size(), 0.0));
    for (std::size_t l = 0; l < levels.size(); ++l)
        for (std::size_t c = 0; c < n_cells; ++c)
            v[c][l] = sample_variance(levels[l].df_cell_samples[c]);
    return v;
}

} // namespace

MLMCResult run_mlmc(const MLMCConfig& cfg, const SlabProblem& problem,
                    const GridHierarchy& hierarchy)
{
    cfg.validate(hierarchy);
    const int num_levels = hierarchy.num_levels();
    const std::vector<long> k_per_level = cfg.histories_per_level(num_levels);

    LevelRunOptions lopts;
    lopts.closure_source = cfg.closure_source;
    lopts.exact_closures = cfg.exact_closures;
    lopts.tracking = cfg.tracking;
    lopts.threads = cfg.threads;
    lopts.track_cells = true;

    std::vector<LevelEstimate> levels(static_cast<std::size_t>(num_levels));
    std::vector<long> pending(static_cast<std::size_t>(num_levels), cfg.n_ini);

    MLMCResult result;
    result.epsilon = cfg.epsilon;
    result.method = cfg.method;
    result.vector_mode = cfg.functional.vector_mode();

    for (int stage = 1; stage <= 3; ++stage) {
        for (int l = 0; l < num_levels; ++l) {
            if (pending[static_cast<std::size_t>(l)] <= 0) continue;
            run_realizations(problem, hierarchy, l, pending[static_cast<std::size_t>(l)],
                             k_per_level[static_cast<std::size_t>(l)], cfg.method, cfg.seed,
                             cfg.functional, lopts, levels[static_cast<std::size_t>(l)]);
            pending[static_cast<std::size_t>(l)] = 0;
        }
        if (stage == 3) break;

        const std::vector<double> cost = level_costs(levels, cfg.wall_clock_cost);
        std::vector<long> required;
        if (cfg.functional.vector_mode()) {
            required = vector_mode_samples(cell_variance_table(levels), cost, cfg.epsilon,
                                           cfg.max_variance_rule);
        } else {
            // deficit uses the floored estimate, total counts never shrink
            const std::vector<double> variance = level_variances(levels);
            double vc_sum = 0.0;
            for (std::size_t l = 0; l < variance.size(); ++l)
                vc_sum += std::sqrt(variance[l] * cost[l]);
            required.assign(static_cast<std::size_t>(num_levels), 0);
            for (std::size_t l = 0; l < variance.size(); ++l) {
                const double raw =
                    2.0 / (cfg.epsilon * cfg.epsilon) * std::sqrt(variance[l] / cost[l]) * vc_sum;
                required[l] = static_cast<long>(std::floor(raw));
            }
        }

        long grand_total = 0;
        for (int l = 0; l < num_levels; ++l) {
            const long have = levels[static_cast<std::size_t>(l)].realizations;
            pending[static_cast<std::size_t>(l)] =
                std::max<long>(required[static_cast<std::size_t>(l)] - have, 0);
            grand_total += have + pending[static_cast<std::size_t>(l)];
        }
        if (grand_total > cfg.realization_cap) {
            result.aborted_on_budget = true;
            break;
        }
    }

    // --- final statistics and diagnostics
    std::vector<double> mean_df, var_df, cost_ev;
    for (int l = 0; l < num_levels; ++l) {
        const auto& est = levels[static_cast<std::size_t>(l)];
        LevelReport rep;
        rep.level = l;
        rep.realizations = est.realizations;
        rep.histories = est.histories;
        rep.mean_df = est.mean_df();
        rep.var_df = est.var_df();
        rep.mean_f = est.mean_f();
        rep.var_f = est.var_f();
        rep.cost_events = est.mean_cost(false);
        rep.cost_seconds = est.mean_cost(true);
        rep.kurtosis = kurtosis(est.df_samples);
        result.levels.push_back(rep);

        mean_df.push_back(rep.mean_df);
        var_df.push_back(rep.var_df);
        cost_ev.push_back(std::max(rep.cost_events, 1e-300));
        result.total_cost_events +=
            rep.cost_events * static_cast<double>(est.realizations);
        result.total_cost_seconds +=
            rep.cost_seconds * static_cast<double>(est.realizations);
    }

    for (int l = 1; l < num_levels; ++l) {
        const auto& prev = levels[static_cast<std::size_t>(l - 1)];
        const auto& cur = levels[static_cast<std::size_t>(l)];
        const double eta = consistency_check(prev.mean_f(), standard_error(prev.f_samples),
                                             cur.mean_f(), standard_error(cur.f_samples),
                                             cur.mean_df(), standard_error(cur.df_samples));
        result.levels[static_cast<std::size_t>(l)].eta = eta;
        if (std::abs(eta) >= 1.0) result.eta_ok = false;
    }

    double estimate = 0.0;
    double est_var = 0.0;
    for (int l = 0; l < num_levels; ++l) {
        estimate += mean_df[static_cast<std::size_t>(l)];
        if (result.levels[static_cast<std::size_t>(l)].realizations > 0)
            est_var += var_df[static_cast<std::size_t>(l)] /
                       static_cast<double>(result.levels[static_cast<std::size_t>(l)].realizations);
    }
    result.estimate = estimate;
    result.variance_of_estimator = est_var;
    result.variance_budget_met = est_var <= cfg.epsilon * cfg.epsilon / 2.0;

    result.rates = fit_rates(mean_df, var_df, cost_ev, hierarchy.refinement());
    double alpha = cfg.alpha_override.value_or(result.rates.available ? result.rates.alpha : 2.0);
    if (!cfg.alpha_override)
        alpha = std::clamp(alpha, 0.5, 3.0); // keep a noisy fit from trivializing the test

    if (num_levels >= 3) {
        if (cfg.functional.vector_mode()) {
            const std::size_t n_cells = levels[0].df_cell_samples.size();
            result.max_weak = 0.0;
            double min_alpha = 1e300, min_beta = 1e300;
            for (std::size_t c = 0; c < n_cells; ++c) {
                std::vector<double> mdf, vdf;
                for (const auto& est : levels) {
                    mdf.push_back(sample_mean(est.df_cell_samples[c]));
                    vdf.push_back(sample_variance(est.df_cell_samples[c]));
                }
                const RateFit cell_fit = fit_rates(mdf, vdf, cost_ev, hierarchy.refinement());
                double cell_alpha = cfg.alpha_override.value_or(
                    cell_fit.available ? std::clamp(cell_fit.alpha, 0.5, 3.0) : 2.0);
                const std::span<const double> tail(mdf.data() + mdf.size() - 3, 3);
                const WeakConvergence cw = weak_convergence(tail, cell_alpha, cfg.epsilon);
                CellReport cr;
                cr.cell = static_cast<int>(c) + 1;
                double cell_estimate = 0.0;
                for (double m : mdf) cell_estimate += m;
                cr.estimate = cell_estimate;
                cr.alpha = cell_fit.alpha;
                cr.beta = cell_fit.beta;
                cr.max_weak = cw.values.empty() ? 0.0 : *std::max_element(cw.values.begin(), cw.values.end());
                result.cells.push_back(cr);
                if (cell_fit.available) {
                    min_alpha = std::min(min_alpha, cell_fit.alpha);
                    min_beta = std::min(min_beta, cell_fit.beta);
                }
                result.max_weak = std::max(result.max_weak, cr.max_weak);
            }
            result.min_alpha = min_alpha < 1e300 ? min_alpha : 0.0;
            result.min_beta = min_beta < 1e300 ? min_beta : 0.0;
            result.weak.available = true;
            result.weak.pass = result.max_weak < cfg.epsilon / std::sqrt(2.0);
            result.weak.values = {result.max_weak};
        } else {
            const std::span<const double> tail(mean_df.data() + mean_df.size() - 3, 3);
            result.weak = weak_convergence(tail, alpha, cfg.epsilon);
            result.max_weak =
                result.weak.values.empty()
                    ? 0.0
                    : *std::max_element(result.weak.values.begin(), result.weak.values.end());
        }
    }

    MultilevelSolution sol = assemble_solution(levels, hierarchy, cfg.method);
    result.flux = std::move(sol.phi);
    return result;
}

} // namespace mlht
