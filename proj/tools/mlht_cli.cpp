#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mlht/errors.hpp"
#include "mlht/mse_study.hpp"
#include "mlht/result_io.hpp"
#include "mlht/sn_reference.hpp"
#include "mlht/stats.hpp"

using namespace mlht;

namespace {

struct CommonArgs {
    std::string config;
    std::string method = "hqd";
    std::string functional = "domain";
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    long histories = 10000;
    int levels = -1; ///< override of the config's L when >= 0
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool wants_method = true)
{
    cmd->add_option("--config", args.config, "problem configuration JSON")->required();
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", args.seed, "master RNG seed");
    cmd->add_option("--levels", args.levels, "override the config's correction level count");
    cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
    if (wants_method)
        cmd->add_option("--method", args.method, "low-order system: hqd or hsm");
}

ProblemConfig load(const CommonArgs& args)
{
    ProblemConfig cfg = load_problem_config(args.config);
    if (args.levels >= 0) cfg.hierarchy.levels = args.levels;
    return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name)
{
    std::filesystem::create_directories(args.out_dir);
    return (std::filesystem::path(args.out_dir) / name).string();
}

FunctionalSpec parse_functional(const std::string& text)
{
    if (text == "domain") return FunctionalSpec::domain();
    if (text == "all-cells") return FunctionalSpec::all_cells();
    if (text.rfind("cell:", 0) == 0) return FunctionalSpec::coarse_cell(std::stoi(text.substr(5)));
    throw ConfigError("unknown functional '" + text + "' (domain, cell:<i>, all-cells)");
}

int run_reference(const CommonArgs& args, int base_refinement, std::vector<int> angles,
                  double tol)
{
    const ProblemConfig cfg = load(args);
    const GridHierarchy hierarchy = build_hierarchy(cfg.problem, cfg.hierarchy);
    AitkenSchedule schedule;
    schedule.base_refinement = base_refinement;
    if (!angles.empty()) {
        if (angles.size() != 3) throw ConfigError("--angles needs three comma-separated orders");
        schedule.n_angles = angles;
    }
    schedule.tol = tol;
    const ReferenceSolution ref = aitken_reference(cfg.problem, hierarchy.finest(), schedule);
    write_reference_json(ref, hierarchy, out_path(args, "reference.json"));
    write_flux_csv(ref.phi, ref.grid, out_path(args, "reference_flux.csv"));
    std::printf("reference: %d cells, F_domain = %.6f (fallback cells: %d)\n", ref.grid.cells(),
                ref.functional_whole_domain(), ref.fallback_cells);
    return 0;
}

int run_single(const CommonArgs& args, int cells, int runs, bool dump_closures)
{
    ProblemConfig cfg = load(args);
    if (cells > 0) cfg.hierarchy.coarse_cells = cells;
    cfg.hierarchy.levels = 0;
    const GridHierarchy hierarchy = build_hierarchy(cfg.problem, cfg.hierarchy);
    const Grid& grid = hierarchy.coarsest();
    const Method method = method_from_string(args.method);

    const ReferenceSolution ref = aitken_reference(cfg.problem, grid, {16, {16, 32, 64}, 1e-12});

    std::vector<double> errors;
    std::vector<double> mean_flux(static_cast<std::size_t>(grid.cells()), 0.0);
    for (int run = 0; run < runs; ++run) {
        const RealizationPair pair = hybrid_realization(
            cfg.problem, hierarchy, 0, method, args.histories,
            {args.seed, 0, static_cast<std::uint64_t>(run) + 1});
        errors.push_back(relative_l2(pair.fine.phi, ref.phi, grid));
        for (std::size_t i = 0; i < mean_flux.size(); ++i)
            mean_flux[i] += pair.fine.phi[i] / runs;
    }
    write_flux_csv(mean_flux, grid, out_path(args, "flux.csv"));
    if (dump_closures) {
        const TallySet tally =
            run_ensemble(cfg.problem, grid, args.histories, {args.seed, 0, 1});
        write_closure_csv(closures_from_tally(tally), grid, out_path(args, "closures.csv"));
    }
    std::printf("single %s: cells=%d K=%ld runs=%d  mean RE_L2 = %.4e +- %.2e\n",
                to_string(method).c_str(), grid.cells(), args.histories, runs,
                sample_mean(errors), standard_error(errors));
    return 0;
}

int run_mlht_cmd(const CommonArgs& args, const std::string& realizations_text,
                 bool exact_closures_mode)
{
    const ProblemConfig cfg = load(args);
    const GridHierarchy hierarchy = build_hierarchy(cfg.problem, cfg.hierarchy);
    const Method method = method_from_string(args.method);
    const FunctionalSpec spec = parse_functional(args.functional);

    std::vector<long> n;
    {
        std::stringstream ss(realizations_text);
        std::string item;
        while (std::getline(ss, item, ','))
            n.push_back(std::stol(item));
    }
    if (n.size() == 1) n.assign(static_cast<std::size_t>(hierarchy.num_levels()), n.front());
    const std::vector<long> k(static_cast<std::size_t>(hierarchy.num_levels()), args.histories);

    LevelRunOptions opts;
    opts.threads = args.threads;
    std::vector<ClosureSet> table;
    if (exact_closures_mode) {
        table = exact_closure_table(sn_solve(cfg.problem, hierarchy.finest(), 64, 1e-12),
                                    hierarchy);
        opts.closure_source = ClosureSource::deterministic;
        opts.exact_closures = &table;
    }

    const std::vector<LevelEstimate> levels =
        run_mlht(cfg.problem, hierarchy, n, k, method, args.seed, spec, opts);
    const MultilevelSolution sol = assemble_solution(levels, hierarchy, method);
    write_level_csv(levels, out_path(args, "levels.csv"));
    write_dphi_csv(levels, hierarchy, out_path(args, "dphi.csv"));
    write_flux_csv(sol.phi, hierarchy.finest(), out_path(args, "flux.csv"));
    std::printf("mlht %s: levels 0..%d, F = %.6f\n", to_string(method).c_str(),
                hierarchy.correction_levels(),
                functional_value(sol.phi, hierarchy.finest(), hierarchy,
                                 spec.vector_mode() ? FunctionalSpec::domain() : spec));
    return 0;
}

int run_mlmc_cmd(const CommonArgs& args, double epsilon, long n_ini,
                 std::optional<double> alpha, bool strict, bool wall_clock, long cap,
                 bool max_variance_rule, int runs, const std::string& reference_path)
{
    const ProblemConfig pcfg = load(args);
    const GridHierarchy hierarchy = build_hierarchy(pcfg.problem, pcfg.hierarchy);

    MLMCConfig cfg;
    cfg.epsilon = epsilon;
    cfg.n_ini = n_ini;
    cfg.histories = {args.histories};
    cfg.method = method_from_string(args.method);
    cfg.functional = parse_functional(args.functional);
    cfg.seed = args.seed;
    cfg.alpha_override = alpha;
    cfg.wall_clock_cost = wall_clock;
    cfg.realization_cap = cap;
    cfg.max_variance_rule = max_variance_rule;
    cfg.threads = args.threads;

    if (runs > 0) {
        if (reference_path.empty())
            throw ConfigError("--runs (MSE study) needs --reference reference.json");
        if (cfg.functional.vector_mode())
            throw ConfigError("the MSE study runs on a scalar functional: domain or cell:<i>");
        const double f_ref = read_reference_functional(reference_path, cfg.functional);
        const MSEStudy study = mse_study(cfg, pcfg.problem, hierarchy, runs, f_ref);
        write_mse_study_json(study, out_path(args, "mse.json"));
        std::printf("mse study (%d runs): mean MLMC MSE = %.3e, mean MC MSE = %.3e, eps^2 = %.3e\n",
                    runs, study.mean_mlmc_mse, study.mean_mc_mse, epsilon * epsilon);
        return study.mean_mlmc_mse < epsilon * epsilon ? 0 : 1;
    }

    const MLMCResult result = run_mlmc(cfg, pcfg.problem, hierarchy);
    write_mlmc_result_json(result, out_path(args, "result.json"));
    write_mlmc_levels_csv(result, out_path(args, "levels.csv"));
    write_flux_csv(result.flux, hierarchy.finest(), out_path(args, "flux.csv"));

    std::printf("mlmc-%s eps=%.2e: F = %.6f, alpha=%.2f beta=%.2f gamma=%.2f\n",
                to_string(cfg.method).c_str(), epsilon, result.estimate, result.rates.alpha,
                result.rates.beta, result.rates.gamma);
    for (const auto& rep : result.levels)
        std::printf("  level %d: N=%ld K=%ld mean_dF=%+.4e V=%.3e C=%.3e\n", rep.level,
                    rep.realizations, rep.histories, rep.mean_df, rep.var_df, rep.cost_events);
    std::printf("  weak convergence: %s (max W = %.2e, bound %.2e); eta checks: %s\n",
                result.weak.available ? (result.weak.pass ? "pass" : "FAIL") : "n/a",
                result.max_weak, epsilon / std::sqrt(2.0), result.eta_ok ? "pass" : "FAIL");
    if (result.aborted_on_budget)
        std::printf("  WARNING: realization budget exhausted, partial result\n");

    if (strict && ((result.weak.available && !result.weak.pass) || !result.eta_ok)) return 2;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multilevel hybrid transport solver for 1-D slab problems"};
    app.require_subcommand(1);

    CommonArgs ref_args, single_args, mlht_args, mlmc_args;

    auto* ref_cmd = app.add_subcommand("reference", "grid-converged deterministic benchmark");
    int base_refinement = 4;
    std::string angles_text;
    double ref_tol = 1e-12;
    add_common(ref_cmd, ref_args, false);
    ref_cmd->add_option("--base-refinement", base_refinement,
                        "coarsest solve refinement over the target grid");
    ref_cmd->add_option("--angles", angles_text, "three quadrature orders, e.g. 16,32,64");
    ref_cmd->add_option("--tol", ref_tol, "source-iteration tolerance");

    auto* single_cmd = app.add_subcommand("single", "repeated one-grid hybrid solves");
    int single_cells = 0, single_runs = 1;
    bool dump_closures = false;
    add_common(single_cmd, single_args);
    single_cmd->add_option("--cells", single_cells, "override the grid cell count");
    single_cmd->add_option("--runs", single_runs, "independent repetitions");
    single_cmd->add_option("--histories", single_args.histories, "histories per run");
    single_cmd->add_flag("--dump-closures", dump_closures, "write one realization's closures");

    auto* mlht_cmd = app.add_subcommand("mlht", "fixed-sample multilevel run");
    std::string realizations_text = "10";
    bool exact = false;
    add_common(mlht_cmd, mlht_args);
    mlht_cmd->add_option("--realizations,--n", realizations_text,
                         "per-level realization counts, e.g. 100,50,25,10");
    mlht_cmd->add_option("--histories", mlht_args.histories, "histories per realization");
    mlht_cmd->add_option("--functional", mlht_args.functional, "domain | cell:<i> | all-cells");
    mlht_cmd->add_flag("--exact-closures", exact, "deterministic closure mode");

    auto* mlmc_cmd = app.add_subcommand("mlmc", "sample-optimized multilevel run");
    double epsilon = 1e-3;
    long n_ini = 10, cap = 2000000;
    int mse_runs = 0;
    double alpha_val = 0.0;
    bool strict = false, wall_clock = false, max_var_rule = false;
    std::string mlmc_reference;
    add_common(mlmc_cmd, mlmc_args);
    mlmc_cmd->add_option("--epsilon", epsilon, "target RMSE")->required();
    mlmc_cmd->add_option("--n-ini", n_ini, "initial realizations per level");
    mlmc_cmd->add_option("--histories", mlmc_args.histories, "histories per realization");
    mlmc_cmd->add_option("--functional", mlmc_args.functional, "domain | cell:<i> | all-cells");
    auto* alpha_opt = mlmc_cmd->add_option("--alpha", alpha_val, "weak-convergence rate override");
    mlmc_cmd->add_flag("--strict", strict, "nonzero exit if weak or eta checks fail");
    mlmc_cmd->add_flag("--wall-clock-cost", wall_clock, "optimize with seconds instead of events");
    mlmc_cmd->add_flag("--max-variance-rule", max_var_rule,
                       "vector mode: allocate with max-variance instead of max-N");
    mlmc_cmd->add_option("--max-realizations", cap, "abort guard");
    mlmc_cmd->add_option("--runs", mse_runs, "repeat as an MSE study with this many runs");
    mlmc_cmd->add_option("--reference", mlmc_reference, "reference.json for the MSE study");

    auto* report_cmd = app.add_subcommand("report", "convert result files to table CSVs");
    std::vector<std::string> report_inputs;
    std::string report_reference, report_out = ".";
    report_cmd->add_option("--in", report_inputs, "result.json files")->required();
    report_cmd->add_option("--reference", report_reference, "optional reference.json");
    report_cmd->add_option("--out", report_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ref_cmd->parsed()) {
            std::vector<int> angles;
            if (!angles_text.empty()) {
                std::stringstream ss(angles_text);
                std::string item;
                while (std::getline(ss, item, ','))
                    angles.push_back(std::stoi(item));
            }
            return run_reference(ref_args, base_refinement, angles, ref_tol);
        }
        if (single_cmd->parsed())
            return run_single(single_args, single_cells, single_runs, dump_closures);
        if (mlht_cmd->parsed()) return run_mlht_cmd(mlht_args, realizations_text, exact);
        if (mlmc_cmd->parsed())
            return run_mlmc_cmd(mlmc_args, epsilon, n_ini,
                                alpha_opt->count() ? std::optional<double>(alpha_val)
                                                   : std::nullopt,
                                strict, wall_clock, cap, max_var_rule, mse_runs, mlmc_reference);
        if (report_cmd->parsed()) {
            std::filesystem::create_directories(report_out);
            write_report(report_inputs, report_reference, report_out);
            std::printf("report written to %s\n", report_out.c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 64;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 65;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 70;
    }
    return 0;
}
