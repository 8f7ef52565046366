#include "mlht/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlht/errors.hpp"

namespace mlht {

namespace {

// Region lookup for a particle sitting exactly on an interface: the region
// ahead of it. Interior queries fall back to the right-side rule.
int tracking_region(const SlabProblem& problem, double x, double mu)
{
    if (x <= 0.0) return 0;
    if (x >= problem.length) return static_cast<int>(problem.regions.size()) - 1;
    int idx = problem.region_index_at(x);
    if (mu < 0.0 && problem.regions[static_cast<std::size_t>(idx)].x_lo == x)
        --idx;
    return idx;
}

} // namespace

Particle sample_source(const SlabProblem& problem, RngStream& rng)
{
    const double q_vol = problem.volumetric_source();
    const double q_total = q_vol + problem.left.j_in + problem.right.j_in;
    if (!(q_total > 0.0)) throw ConfigError("total source strength is zero");

    Particle p;
    p.weight = 1.0;
    double pick = rng.uniform() * q_total;
    if (pick < q_vol) {
        // region proportional to q * width, uniform position inside
        for (std::size_t r = 0; r < problem.regions.size(); ++r) {
            const Region& reg = problem.regions[r];
            const double mass = reg.q * reg.width();
            if (pick < mass || r + 1 == problem.regions.size()) {
                p.x = reg.x_lo + rng.uniform() * reg.width();
                p.x = std::min(p.x, reg.x_hi);
                break;
            }
            pick -= mass;
        }
        p.mu = rng.direction_cosine();
    } else if (pick < q_vol + problem.left.j_in) {
        p.x = 0.0;
        p.mu = std::sqrt(rng.uniform()); // entering rate weighted by |mu|
        if (p.mu == 0.0) p.mu = 1.0;
    } else {
        p.x = problem.length;
        p.mu = -std::sqrt(rng.uniform());
        if (p.mu == 0.0) p.mu = -1.0;
    }
    return p;
}

void simulate_particle(const SlabProblem& problem, Particle p, TallySet& tally,
                       RngStream& rng, const TrackingOptions& opts)
{
    std::uint64_t history_events = 0;

    int region = tracking_region(problem, p.x, p.mu);
    for (;;) {
        double tau = rng.exponential();
        // one flight: advance through regions until collision or escape
        bool collided = false;
        double collision_c = 0.0;
        while (!collided) {
            const Region& reg = problem.regions[static_cast<std::size_t>(region)];
            const double bound = p.mu > 0.0 ? reg.x_hi : reg.x_lo;
            const double path_to_bound = (bound - p.x) / p.mu; // >= 0
            const double path_to_collision =
                reg.sigma_t > 0.0 ? tau / reg.sigma_t : std::numeric_limits<double>::infinity();

            if (path_to_collision < path_to_bound) {
                double x_new = p.x + p.mu * path_to_collision;
                x_new = p.mu > 0.0 ? std::min(x_new, bound) : std::max(x_new, bound);
                tally.score_segment(std::min(p.x, x_new), std::max(p.x, x_new), p.mu, p.weight);
                p.x = x_new;
                collided = true;
                collision_c = reg.scattering_ratio();
            } else {
                tally.score_segment(std::min(p.x, bound), std::max(p.x, bound), p.mu, p.weight);
                tau -= path_to_bound * reg.sigma_t;
                p.x = bound;
                if (p.mu > 0.0) {
                    if (region == static_cast<int>(problem.regions.size()) - 1) {
                        tally.score_surface(Side::right, p.mu, p.weight);
                        tally.leaked_weight[1] += p.weight;
                        return;
                    }
                    ++region;
                } else {
                    if (region == 0) {
                        tally.score_surface(Side::left, p.mu, p.weight);
                        tally.leaked_weight[0] += p.weight;
                        return;
                    }
                    --region;
                }
            }
            if (++history_events > opts.max_history_events)
                throw SolverError("history exceeded " + std::to_string(opts.max_history_events) +
                                  " events at x=" + std::to_string(p.x) +
                                  " w=" + std::to_string(p.weight));
        }

        // implicit capture: deposit the absorbed fraction, keep the rest
        tally.absorbed_weight += p.weight * (1.0 - collision_c);
        p.weight *= collision_c;
        tally.events += cost::collision;

        if (p.weight < opts.weight_min) {
            tally.events += cost::roulette;
            const double survival = p.weight / opts.weight_survival;
            if (rng.uniform() < survival) {
                p.weight = opts.weight_survival;
            } else {
                tally.absorbed_weight += p.weight;
                return;
            }
        }
        p.mu = rng.direction_cosine();
    }
}

void simulate_history(const SlabProblem& problem, TallySet& tally, RngStream& rng,
                      const TrackingOptions& opts)
{
    Particle p = sample_source(problem, rng);
    tally.events += cost::source_sample;
    if (p.x == 0.0 && p.mu > 0.0 && problem.left.j_in > 0.0)
        tally.score_surface(Side::left, p.mu, p.weight);
    else if (p.x == problem.length && p.mu < 0.0 && problem.right.j_in > 0.0)
        tally.score_surface(Side::right, p.mu, p.weight);
    simulate_particle(problem, p, tally, rng, opts);
}

TallySet run_ensemble(const SlabProblem& problem, const Grid& grid, long histories,
                      const StreamId& id, const TrackingOptions& opts)
{
    if (histories < 1) throw ConfigError("history count must be >= 1");
    TallySet tally(grid);
    for (long k = 0; k < histories; ++k) {
        RngStream rng(id.seed, id.level, id.realization, static_cast<std::uint64_t>(k) + 1);
        simulate_history(problem, tally, rng, opts);
    }
    tally.finalize(histories, problem.total_source());
    return tally;
}

} // namespace mlht
