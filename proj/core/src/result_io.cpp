#include "mlht/result_io.hpp"

#include <fstream>

#include "json.hpp"

#include "mlht/errors.hpp"

namespace mlht {

namespace {

using nlohmann::json;

json level_to_json(const LevelReport& rep)
{
    json j{{"level", rep.level},
           {"N", rep.realizations},
           {"K", rep.histories},
           {"mean_dF", rep.mean_df},
           {"var_dF", rep.var_df},
           {"mean_F", rep.mean_f},
           {"var_F", rep.var_f},
           {"cost_events", rep.cost_events},
           {"cost_seconds", rep.cost_seconds}};
    if (rep.kurtosis) j["kurtosis"] = *rep.kurtosis;
    if (rep.eta) j["eta"] = *rep.eta;
    return j;
}

void dump(const json& j, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

json load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

} // namespace

void write_mlmc_result_json(const MLMCResult& result, const std::string& path)
{
    json j;
    j["kind"] = "mlmc";
    j["method"] = to_string(result.method);
    j["epsilon"] = result.epsilon;
    j["estimate"] = result.estimate;
    j["variance_of_estimator"] = result.variance_of_estimator;
    j["variance_budget_met"] = result.variance_budget_met;
    j["eta_ok"] = result.eta_ok;
    j["aborted_on_budget"] = result.aborted_on_budget;
    j["total_cost_events"] = result.total_cost_events;
    j["total_cost_seconds"] = result.total_cost_seconds;
    j["rates"] = {{"alpha", result.rates.alpha},
                  {"beta", result.rates.beta},
                  {"gamma", result.rates.gamma},
                  {"available", result.rates.available}};
    j["weak"] = {{"available", result.weak.available},
                 {"pass", result.weak.pass},
                 {"values", result.weak.values},
                 {"max", result.max_weak}};
    j["levels"] = json::array();
    for (const auto& rep : result.levels) j["levels"].push_back(level_to_json(rep));
    if (result.vector_mode) {
        j["vector_mode"] = true;
        j["min_alpha"] = result.min_alpha;
        j["min_beta"] = result.min_beta;
        json cells = json::array();
        for (const auto& c : result.cells)
            cells.push_back({{"cell", c.cell},
                             {"estimate", c.estimate},
                             {"alpha", c.alpha},
                             {"beta", c.beta},
                             {"max_W", c.max_weak}});
        j["cells"] = cells;
    }
    j["flux"] = result.flux;
    dump(j, path);
}

void write_mlmc_levels_csv(const MLMCResult& result, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out.precision(16);
    out << "level,N,K,mean_dF,var_dF,mean_F,var_F,cost_events,cost_seconds,kurtosis,eta,W\n";
    for (std::size_t l = 0; l < result.levels.size(); ++l) {
        const auto& rep = result.levels[l];
        out << rep.level << ',' << rep.realizations << ',' << rep.histories << ','
            << rep.mean_df << ',' << rep.var_df << ',' << rep.mean_f << ',' << rep.var_f << ','
            << rep.cost_events << ',' << rep.cost_seconds << ',';
        if (rep.kurtosis) out << *rep.kurtosis;
        out << ',';
        if (rep.eta) out << *rep.eta;
        out << ',';
        const std::size_t first_checked = result.levels.size() >= 3 ? result.levels.size() - 3 : 0;
        if (result.weak.available && !result.vector_mode && l >= first_checked)
            out << result.weak.values[l - first_checked];
        out << '\n';
    }
}

void write_flux_csv(std::span<const double> phi, const Grid& grid, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out.precision(16);
    out << "cell,x_mid,dx,phi\n";
    for (int i = 0; i < grid.cells(); ++i)
        out << i + 1 << ',' << grid.center(i) << ',' << grid.width(i) << ','
            << phi[static_cast<std::size_t>(i)] << '\n';
}

void write_closure_csv(const ClosureSet& closures, const Grid& grid, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out.precision(16);
    out << "level,cell,x_mid,eddington,h\n";
    for (int i = 0; i < grid.cells(); ++i)
        out << grid.level << ',' << i + 1 << ',' << grid.center(i) << ','
            << closures.qd.eddington[static_cast<std::size_t>(i)] << ','
            << closures.sm.h[static_cast<std::size_t>(i)] << '\n';
    out << "# boundaries: E_left=" << closures.qd.eddington_left
        << " E_right=" << closures.qd.eddington_right << " B_L=" << closures.qd.boundary_left
        << " B_R=" << closures.qd.boundary_right << " H_left=" << closures.sm.h_left
        << " H_right=" << closures.sm.h_right << " W_L=" << closures.sm.w_left
        << " W_R=" << closures.sm.w_right << '\n';
}

void write_reference_json(const ReferenceSolution& ref, const GridHierarchy& hierarchy,
                          const std::string& path)
{
    json j;
    j["kind"] = "reference";
    j["cells"] = ref.grid.cells();
    j["F_domain"] = ref.functional_whole_domain();
    json per_cell = json::array();
    for (int c = 1; c <= hierarchy.coarsest().cells(); ++c)
        per_cell.push_back(ref.functional(FunctionalSpec::coarse_cell(c), hierarchy));
    j["F_coarse_cells"] = per_cell;
    j["fallback_cells"] = ref.fallback_cells;
    j["phi"] = ref.phi;
    j["uncertainty"] = ref.uncertainty;
    json x = json::array();
    for (int i = 0; i < ref.grid.cells(); ++i) x.push_back(ref.grid.center(i));
    j["x_mid"] = x;
    dump(j, path);
}

double read_reference_functional(const std::string& path, const FunctionalSpec& spec)
{
    const json j = load(path);
    if (spec.kind == FunctionalSpec::Kind::whole_domain) return j.at("F_domain").get<double>();
    if (spec.kind == FunctionalSpec::Kind::coarse_cell) {
        const auto& cells = j.at("F_coarse_cells");
        if (spec.cell < 1 || spec.cell > static_cast<int>(cells.size()))
            throw ConfigError("reference file has no coarse cell " + std::to_string(spec.cell));
        return cells[static_cast<std::size_t>(spec.cell - 1)].get<double>();
    }
    throw ConfigError("vector functionals have per-cell references; query one cell");
}

void write_mse_study_json(const MSEStudy& study, const std::string& path)
{
    json j;
    j["kind"] = "mse_study";
    j["reference_value"] = study.reference_value;
    j["epsilon"] = study.epsilon;
    j["epsilon_squared"] = study.epsilon * study.epsilon;
    j["mlmc_estimates"] = study.mlmc_estimates;
    j["mlmc_squared_errors"] = study.mlmc_squared_errors;
    j["mc_estimates"] = study.mc_estimates;
    j["mc_squared_errors"] = study.mc_squared_errors;
    j["mean_mlmc_mse"] = study.mean_mlmc_mse;
    j["mean_mc_mse"] = study.mean_mc_mse;
    j["all_weak_pass"] = study.all_weak_pass;
    dump(j, path);
}

void write_report(const std::vector<std::string>& result_paths,
                  const std::string& reference_path, const std::string& out_dir)
{
    double f_ref = 0.0;
    bool have_ref = !reference_path.empty();
    if (have_ref)
        f_ref = read_reference_functional(reference_path, FunctionalSpec::domain());

    std::ofstream summary(out_dir + "/summary.csv");
    if (!summary) throw ConfigError("cannot write report summary in " + out_dir);
    summary.precision(10);
    summary << "file,method,epsilon,alpha,beta,gamma,N0,N1,N2,N3,max_W,weak_pass,estimate,"
               "total_cost_events";
    if (have_ref) summary << ",squared_error";
    summary << '\n';

    std::ofstream levels(out_dir + "/levels_long.csv");
    if (!levels) throw ConfigError("cannot write report levels in " + out_dir);
    levels.precision(10);
    levels << "file,method,epsilon,level,N,K,mean_dF,var_dF,mean_F,var_F,cost_events,"
              "kurtosis,eta\n";

    for (const std::string& path : result_paths) {
        const json j = load(path);
        const std::string method = j.value("method", "?");
        const double eps = j.value("epsilon", 0.0);
        const auto& rates = j.at("rates");
        summary << path << ',' << method << ',' << eps << ',' << rates.value("alpha", 0.0) << ','
                << rates.value("beta", 0.0) << ',' << rates.value("gamma", 0.0);
        const auto& lv = j.at("levels");
        for (std::size_t l = 0; l < 4; ++l) {
            summary << ',';
            if (l < lv.size()) summary << lv[l].value("N", 0L);
        }
        summary << ',' << j.at("weak").value("max", 0.0) << ','
                << (j.at("weak").value("pass", false) ? 1 : 0) << ','
                << j.value("estimate", 0.0) << ',' << j.value("total_cost_events", 0.0);
        if (have_ref) {
            const double err = j.value("estimate", 0.0) - f_ref;
            summary << ',' << err * err;
        }
        summary << '\n';

        for (const auto& rep : lv) {
            levels << path << ',' << method << ',' << eps << ',' << rep.value("level", 0) << ','
                   << rep.value("N", 0L) << ',' << rep.value("K", 0L) << ','
                   << rep.value("mean_dF", 0.0) << ',' << rep.value("var_dF", 0.0) << ','
                   << rep.value("mean_F", 0.0) << ',' << rep.value("var_F", 0.0) << ','
                   << rep.value("cost_events", 0.0) << ',';
            if (rep.contains("kurtosis")) levels << rep["kurtosis"].get<double>();
            levels << ',';
            if (rep.contains("eta")) levels << rep["eta"].get<double>();
            levels << '\n';
        }
    }
}

} // namespace mlht
