#pragma once

#include <vector>

#include "mlht/functional_spec.hpp"
#include "mlht/grid_hierarchy.hpp"
#include "mlht/lo_solver.hpp"
#include "mlht/slab_problem.hpp"

namespace mlht {

/// Angular quadrature on [-1, 1]; weights sum to 2.
struct AngularQuadrature {
    std::vector<double> mu;
    std::vector<double> weight;
    int order() const { return static_cast<int>(mu.size()); }
};

AngularQuadrature gauss_legendre(int order);

/// Gauss-Legendre per half range. Handles the mu = 0 kink of slab
/// boundary fluxes, so half-range moments converge fast.
AngularQuadrature double_gauss(int order);

/// Converged discrete-ordinates angular flux on one grid.
struct AngularFluxGrid {
    Grid grid;
    AngularQuadrature quad;
    std::vector<double> psi_avg;  ///< [m * cells + i]
    std::vector<double> psi_edge; ///< [m * (cells+1) + i]
    int iterations = 0;

    double avg(int m, int i) const { return psi_avg[static_cast<std::size_t>(m) * grid.cells() + i]; }
    double edge(int m, int i) const
    {
        return psi_edge[static_cast<std::size_t>(m) * (grid.cells() + 1) + i];
    }
    double scalar_flux(int i) const;
    double scalar_flux_edge(int i) const;
    double current_edge(int i) const;
};

/// Diamond-difference source iteration. Converges when successive scalar
/// flux iterates differ by < tol*(1-c_max) in max norm; throws SolverError
/// with a spectral-radius estimate past 1e5 iterations, or if the converged
/// angular flux has negative entries (no fixup is applied).
AngularFluxGrid sn_solve(const SlabProblem& problem, const Grid& grid,
                         AngularQuadrature quad, double tol = 1e-12);

/// Convenience overload: double-Gauss quadrature of the given order.
AngularFluxGrid sn_solve(const SlabProblem& problem, const Grid& grid, int n_angles,
                         double tol = 1e-12);

/// Quadrature evaluation of the exact low-order closures from an angular
/// flux (cells from cell averages, boundaries from edge fluxes).
ClosureSet exact_closures(const AngularFluxGrid& af);

/// Closures of a coarser nested grid extracted from a fine angular flux:
/// cell moments are volume integrals over the target cells, boundary
/// functionals come from the fine edge flux. This is the infinite-history
/// limit of the track-length tally ratios.
ClosureSet closures_on_grid(const AngularFluxGrid& fine, const Grid& target);

/// Per-level closure tables for deterministic multilevel studies, all
/// extracted from one fine angular flux.
std::vector<ClosureSet> exact_closure_table(const AngularFluxGrid& fine,
                                            const GridHierarchy& hierarchy);

/// Grid-converged deterministic benchmark on a target grid.
struct ReferenceSolution {
    Grid grid;
    std::vector<double> phi;          ///< extrapolated cell averages
    std::vector<double> uncertainty;  ///< |extrapolated - finest input| per cell
    int fallback_cells = 0;           ///< cells where extrapolation fell back to the finest value
    double functional(const FunctionalSpec& spec, const GridHierarchy& hierarchy) const;
    double functional_whole_domain() const;
};

struct AitkenSchedule {
    int base_refinement = 4;              ///< finest-input multiplier is base*4
    std::vector<int> n_angles = {16, 32, 64};
    double tol = 1e-12;
};

/// Solves on three nested refinements of the target grid with the angular
/// order schedule, restricts to the target grid, and applies per-cell
/// Aitken (delta-squared) extrapolation with a finest-value fallback when
/// the denominator degenerates.
ReferenceSolution aitken_reference(const SlabProblem& problem, const Grid& target,
                                   const AitkenSchedule& schedule = {});

/// Cell-width-weighted relative L2 error against a reference.
double relative_l2(std::span<const double> phi, std::span<const double> phi_ref,
                   const Grid& grid);

} // namespace mlht
