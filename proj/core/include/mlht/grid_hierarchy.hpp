#pragma once

#include <span>
#include <vector>

#include "mlht/slab_problem.hpp"

namespace mlht {

/// One uniform spatial grid. Edges of nested grids compare equal bit for
/// bit (finer levels are built by subdividing parent cells).
struct Grid {
    int level = 0;
    double length = 0.0;
    std::vector<double> edges; ///< size cells()+1, edges.front()==0, edges.back()==length

    int cells() const { return static_cast<int>(edges.size()) - 1; }
    double edge(int i) const { return edges[static_cast<std::size_t>(i)]; }
    double width(int i) const { return edges[static_cast<std::size_t>(i) + 1] - edges[static_cast<std::size_t>(i)]; }
    double nominal_dx() const { return length / cells(); }
    double center(int i) const { return 0.5 * (edge(i) + edge(i + 1)); }

    /// Cell index containing x; x == edge belongs to the right cell except
    /// x == length which belongs to the last cell.
    int cell_of(double x) const;
};

/// Nested uniform grids G_0 .. G_L with I_l = a^l * I_0. Immutable after
/// construction; safe to share across threads.
class GridHierarchy {
public:
    GridHierarchy() = default;
    GridHierarchy(std::vector<Grid> levels, int refinement);

    int correction_levels() const { return static_cast<int>(levels_.size()) - 1; } ///< L
    int num_levels() const { return static_cast<int>(levels_.size()); }            ///< L+1
    int refinement() const { return refinement_; }
    const Grid& grid(int level) const;
    const Grid& finest() const { return levels_.back(); }
    const Grid& coarsest() const { return levels_.front(); }

private:
    std::vector<Grid> levels_;
    int refinement_ = 2;
};

/// Builds the nested hierarchy. Throws ConfigError when a region interface
/// of the problem does not land on a G_0 edge (identifying the interface).
GridHierarchy build_hierarchy(const SlabProblem& problem, int coarse_cells,
                              int refinement, int levels);

inline GridHierarchy build_hierarchy(const SlabProblem& problem, const HierarchySpec& spec)
{
    return build_hierarchy(problem, spec.coarse_cells, spec.refinement, spec.levels);
}

/// Volume-weighted restriction of cell averages from `from_level` down to
/// `to_level` of the hierarchy.
std::vector<double> restrict_cell_averages(std::span<const double> fine,
                                           const GridHierarchy& hierarchy,
                                           int from_level, int to_level);

/// Volume-weighted restriction between two grids whose cell counts differ
/// by an integer factor (used to project refined reference solves).
std::vector<double> restrict_cell_averages(std::span<const double> fine,
                                           const Grid& fine_grid, const Grid& coarse_grid);

} // namespace mlht
