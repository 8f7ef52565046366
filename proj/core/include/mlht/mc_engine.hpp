#pragma once

#include <cstdint>

#include "mlht/rng.hpp"
#include "mlht/slab_problem.hpp"
#include "mlht/tally.hpp"

namespace mlht {

struct Particle {
    double x = 0.0;
    double mu = 0.0;    ///< direction cosine in [-1,1] \ {0}
    double weight = 1.0;
};

struct TrackingOptions {
    double weight_min = 1e-4;      ///< roulette trigger
    double weight_survival = 2e-4; ///< post-roulette weight (survival p = w / this)
    std::uint64_t max_history_events = 1'000'000;
};

/// Seed coordinates of one realization: all histories k of the realization
/// draw from streams (seed, level, realization, k+1).
struct StreamId {
    std::uint64_t seed = 0;
    std::uint64_t level = 0;
    std::uint64_t realization = 0;
};

/// Samples a birth site, direction, and unit weight from the volumetric and
/// incident boundary sources. Throws ConfigError when the total source is 0.
Particle sample_source(const SlabProblem& problem, RngStream& rng);

/// Tracks one particle from the given state to termination, scoring
/// track-length and boundary-crossing tallies. Implicit capture at every
/// collision, Russian roulette below weight_min. Trajectories depend only on
/// the problem and the stream, never on the tally grid.
void simulate_particle(const SlabProblem& problem, Particle p, TallySet& tally,
                       RngStream& rng, const TrackingOptions& opts = {});

/// Birth plus tracking. Boundary-born particles score the birth-face
/// crossing tally on entry.
void simulate_history(const SlabProblem& problem, TallySet& tally, RngStream& rng,
                      const TrackingOptions& opts = {});

/// Runs `histories` sequential histories on the given grid and finalizes the
/// tally with the physical source normalization. Bit-reproducible for a
/// given stream id.
TallySet run_ensemble(const SlabProblem& problem, const Grid& grid, long histories,
                      const StreamId& id, const TrackingOptions& opts = {});

} // namespace mlht
