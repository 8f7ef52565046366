#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlht/banded.hpp"
#include "mlht/closures.hpp"
#include "mlht/grid_hierarchy.hpp"
#include "mlht/mc_engine.hpp"
#include "mlht/slab_problem.hpp"

namespace mlht {

enum class Method { hqd, hsm };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct Cost {
    double seconds = 0.0;
    std::uint64_t events = 0;

    Cost& operator+=(const Cost& o)
    {
        seconds += o.seconds;
        events += o.events;
        return *this;
    }
};

/// One realization of the low-order flux solution on a grid.
struct HybridRealization {
    int level = 0;
    std::vector<double> phi;      ///< cell averages, size I
    double phi_left = 0.0;        ///< boundary-face flux at x=0
    double phi_right = 0.0;       ///< boundary-face flux at x=X
    std::vector<double> current;  ///< edge currents J_0..J_I, size I+1
    Cost cost;
    int starved_cells = 0;
    bool starved_boundary = false;
};

/// Tridiagonal system in the interleaved unknown ordering
/// (phi_left, J_0, phi_1, J_1, ..., phi_I, J_I, phi_right); 2I+3 unknowns.
struct LinearSystem {
    BandedMatrix matrix;
    std::vector<double> rhs;
    int cells = 0;
    int level = 0;
};

/// Finite-volume low-order QD system: I balance rows, I+1 first-moment rows
/// on the staggered dual cells (boundary half-cells use the face Eddington
/// factors), and the two boundary-factor conditions.
LinearSystem assemble_loqd(const SlabProblem& problem, const Grid& grid, const QDClosures& c);

/// Same layout with the second-moment linear closure and Marshak-type
/// boundary conditions.
LinearSystem assemble_losm(const SlabProblem& problem, const Grid& grid, const SMClosures& c);

/// Direct banded solve with partial pivoting; verifies the relative
/// residual to 1e-10 and throws SolverError otherwise.
HybridRealization solve_banded(const LinearSystem& sys);

/// Closure inputs for one grid, either estimated from tallies or supplied
/// externally (deterministic studies).
struct ClosureSet {
    QDClosures qd;
    SMClosures sm;
};

ClosureSet closures_from_tally(const TallySet& tally);

HybridRealization solve_low_order(const SlabProblem& problem, const Grid& grid,
                                  const ClosureSet& closures, Method method);

struct RealizationPair {
    HybridRealization fine;
    std::optional<HybridRealization> coarse;
};

struct RealizationOptions {
    bool with_coarse = false;
    /// When set, skip the MC run and use these per-level closures
    /// (index = grid level); realizations become deterministic.
    const std::vector<ClosureSet>* exact_closures = nullptr;
    TrackingOptions tracking;
};

/// One hybrid realization at `level`: runs the history ensemble on G_level,
/// optionally restricts the tallies to G_{level-1}, and solves the low-order
/// system(s) from the shared ensemble. Cost covers tracking plus solves.
RealizationPair hybrid_realization(const SlabProblem& problem, const GridHierarchy& hierarchy,
                                   int level, Method method, long histories,
                                   const StreamId& id, const RealizationOptions& opts = {});

} // namespace mlht
