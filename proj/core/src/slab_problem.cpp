#include "mlht/slab_problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "mlht/errors.hpp"

namespace mlht {

void SlabProblem::validate() const
{
    if (!(length > 0.0)) throw ConfigError("slab length must be positive");
    if (regions.empty()) throw ConfigError("problem has no material regions");

    const double tol = 1e-12 * std::max(1.0, length);
    double cursor = 0.0;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        const Region& reg = regions[r];
        std::ostringstream tag;
        tag << "region " << r << " [" << reg.x_lo << ", " << reg.x_hi << "]";
        if (!(reg.x_hi > reg.x_lo)) throw ConfigError(tag.str() + ": empty or inverted extent");
        if (std::abs(reg.x_lo - cursor) > tol)
            throw ConfigError(tag.str() + ": does not start at previous region end " + std::to_string(cursor));
        if (reg.sigma_t < 0.0) throw ConfigError(tag.str() + ": sigma_t < 0");
        if (reg.sigma_s < 0.0 || reg.sigma_s > reg.sigma_t * (1.0 + 1e-12))
            throw ConfigError(tag.str() + ": sigma_s outside [0, sigma_t]");
        if (reg.q < 0.0) throw ConfigError(tag.str() + ": q < 0");
        cursor = reg.x_hi;
    }
    if (std::abs(cursor - length) > tol)
        throw ConfigError("regions end at " + std::to_string(cursor) + ", expected " + std::to_string(length));
    if (left.phi_in < 0.0 || left.j_in < 0.0 || right.phi_in < 0.0 || right.j_in < 0.0)
        throw ConfigError("incident boundary data must be nonnegative");
}

int SlabProblem::region_index_at(double x) const
{
    if (x < 0.0 || x > length) throw ConfigError("position " + std::to_string(x) + " outside [0, length]");
    // right-side tie-break: x on an interface belongs to the region starting there
    int lo = 0;
    int hi = static_cast<int>(regions.size()) - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (x < regions[static_cast<std::size_t>(mid)].x_hi)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

double SlabProblem::volumetric_source() const
{
    double s = 0.0;
    for (const Region& r : regions) s += r.q * r.width();
    return s;
}

double SlabProblem::total_source() const
{
    return volumetric_source() + left.j_in + right.j_in;
}

double SlabProblem::max_scattering_ratio() const
{
    double c = 0.0;
    for (const Region& r : regions) c = std::max(c, r.scattering_ratio());
    return c;
}

MaterialSample material_at(const SlabProblem& problem, double x)
{
    const Region& r = problem.region_at(x);
    return {r.sigma_t, r.sigma_s, r.q};
}

namespace {

BoundarySource parse_bc(const nlohmann::json& j, const char* side)
{
    BoundarySource bc;
    if (j.is_null()) return bc;
    const std::string type = j.value("type", "vacuum");
    if (type == "vacuum") {
        if (j.contains("phi_in") && j["phi_in"].get<double>() != 0.0)
            throw ConfigError(std::string(side) + " bc: vacuum with nonzero phi_in");
        return bc;
    }
    if (type != "isotropic")
        throw ConfigError(std::string(side) + " bc: unknown type '" + type + "'");
    bc.phi_in = j.value("phi_in", 0.0);
    // isotropic incident flux has J_in = phi_in/2 unless overridden
    bc.j_in = j.value("J_in", 0.5 * bc.phi_in);
    return bc;
}

} // namespace

ProblemConfig parse_problem_config(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ProblemConfig cfg;
    cfg.problem.length = j.at("length").get<double>();
    for (const auto& jr : j.at("regions")) {
        Region r;
        r.x_lo = jr.at("x_lo").get<double>();
        r.x_hi = jr.at("x_hi").get<double>();
        r.sigma_t = jr.at("sigma_t").get<double>();
        if (jr.contains("scattering_ratio")) {
            if (jr.contains("sigma_s"))
                throw ConfigError("region specifies both sigma_s and scattering_ratio");
            r.sigma_s = jr["scattering_ratio"].get<double>() * r.sigma_t;
        } else {
            r.sigma_s = jr.at("sigma_s").get<double>();
        }
        r.q = jr.value("q", 0.0);
        cfg.problem.regions.push_back(r);
    }
    if (j.contains("bc")) {
        cfg.problem.left = parse_bc(j["bc"].value("left", nlohmann::json()), "left");
        cfg.problem.right = parse_bc(j["bc"].value("right", nlohmann::json()), "right");
    }
    if (j.contains("hierarchy")) {
        const auto& jh = j["hierarchy"];
        cfg.hierarchy.coarse_cells = jh.value("I0", 1);
        cfg.hierarchy.refinement = jh.value("a", 2);
        cfg.hierarchy.levels = jh.value("L", 0);
    }
    cfg.problem.validate();
    return cfg;
}

ProblemConfig load_problem_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_problem_config(buf.str());
}

} // namespace mlht
