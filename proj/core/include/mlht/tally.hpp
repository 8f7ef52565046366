#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mlht/grid_hierarchy.hpp"

namespace mlht {

enum class Side : int { left = 0, right = 1 };
enum class Sign : int { plus = 0, minus = 1 }; ///< plus: mu > 0, minus: mu < 0

/// Track-length and surface-crossing tally accumulators for one history
/// ensemble on one grid.
///
/// Track-length moments are stored as per-edge crossing functions
/// A_r[e] = sum over flights of (w mu^r / |mu|) * clamp(e, xa, xb) (up to a
/// per-flight constant), so the cell moment is the difference of adjacent
/// edge values. Edge values depend only on the edge position and the flight
/// sequence, never on the rest of the grid; restriction to a nested coarser
/// grid therefore just subsamples edges and is exact, and a direct coarse
/// tally of the same histories reproduces the same accumulator bits.
struct TallySet {
    explicit TallySet(Grid grid);

    // --- accumulation (raw sums over histories, weight-1 source particles)
    void score_segment(double xa, double xb, double mu, double w);
    void score_surface(Side side, double mu, double w);
    void finalize(long histories, double source_strength);

    // --- finalized views (scaled by source_strength / histories)
    double norm() const;
    /// Cell moment T^[r]_i, i in 0..cells-1 (track length units).
    double cell_moment(int r, int i) const;
    /// Track-length estimate of the cell-average scalar flux.
    double flux(int i) const;
    /// Partial surface moment S^[r]+/- at the given face.
    double surface(Side side, int r, Sign sign) const;
    /// Full-range surface moment S+ + (-1)^r S-.
    double surface_full(Side side, int r) const;
    /// Absolute surface moment S+ + S-.
    double surface_abs(Side side, int r) const;

    /// Coarse-grid tally over the same histories: edge accumulators are
    /// subsampled, surface sums and counters copied. Throws on non-nested
    /// grids.
    TallySet restricted(const Grid& coarse) const;

    /// FNV-1a digest of the raw accumulators (lineage checks in tests).
    std::uint64_t checksum() const;

    void write_csv(const std::string& path) const;

    // --- state
    Grid grid;
    std::array<std::vector<double>, 3> edge_acc;   ///< A_r per edge, r = 0,1,2
    double surf[2][3][2] = {};                     ///< [side][r][sign] raw sums
    long histories = 0;
    double source_strength = 0.0;
    std::uint64_t events = 0;                      ///< deterministic cost counter
    double absorbed_weight = 0.0;
    double leaked_weight[2] = {0.0, 0.0};
};

/// Sum of all cell T^[0] entries: the total (weighted) track length.
double total_track_length(const TallySet& t);

TallySet restrict_tallies(const TallySet& fine, const GridHierarchy& hierarchy);

// Deterministic event-cost weights shared by the tracker and the low-order
// pipeline. They model the constant-vs-grid-linear split of tracking work so
// per-level cost growth matches wall clock behavior.
namespace cost {
inline constexpr std::uint64_t source_sample = 5;
inline constexpr std::uint64_t collision = 5;
inline constexpr std::uint64_t flight = 2;
inline constexpr std::uint64_t edge_update = 1;
inline constexpr std::uint64_t surface_crossing = 2;
inline constexpr std::uint64_t roulette = 1;
inline constexpr std::uint64_t solve_per_unknown = 10;
inline constexpr std::uint64_t closure_per_cell = 1;
} // namespace cost

} // namespace mlht
