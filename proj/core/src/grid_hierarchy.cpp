#include "mlht/grid_hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlht/errors.hpp"

namespace mlht {

int Grid::cell_of(double x) const
{
    const int n = cells();
    int i = static_cast<int>(x / nominal_dx());
    i = std::clamp(i, 0, n - 1);
    while (i > 0 && x < edges[static_cast<std::size_t>(i)]) --i;
    while (i < n - 1 && x >= edges[static_cast<std::size_t>(i) + 1]) ++i;
    return i;
}

GridHierarchy::GridHierarchy(std::vector<Grid> levels, int refinement)
    : levels_(std::move(levels)), refinement_(refinement)
{
}

const Grid& GridHierarchy::grid(int level) const
{
    if (level < 0 || level >= num_levels())
        throw InternalError("hierarchy level " + std::to_string(level) + " out of range");
    return levels_[static_cast<std::size_t>(level)];
}

namespace {

Grid make_coarsest(double length, int cells)
{
    Grid g;
    g.level = 0;
    g.length = length;
    g.edges.resize(static_cast<std::size_t>(cells) + 1);
    for (int i = 1; i < cells; ++i)
        g.edges[static_cast<std::size_t>(i)] = (static_cast<double>(i) * length) / cells;
    g.edges.front() = 0.0;
    g.edges.back() = length;
    return g;
}

// Subdivide every parent cell into `a` children. Parent edges are copied
// verbatim so nested edges compare equal exactly, for any a.
Grid refine(const Grid& parent, int a)
{
    Grid g;
    g.level = parent.level + 1;
    g.length = parent.length;
    g.edges.reserve(static_cast<std::size_t>(parent.cells()) * static_cast<std::size_t>(a) + 1);
    for (int i = 0; i < parent.cells(); ++i) {
        const double lo = parent.edge(i);
        const double h = parent.width(i) / a;
        g.edges.push_back(lo);
        for (int m = 1; m < a; ++m)
            g.edges.push_back(lo + m * h);
    }
    g.edges.push_back(parent.edges.back());
    return g;
}

} // namespace

GridHierarchy build_hierarchy(const SlabProblem& problem, int coarse_cells,
                              int refinement, int levels)
{
    if (coarse_cells < 1) throw ConfigError("hierarchy needs I0 >= 1");
    if (refinement < 2) throw ConfigError("hierarchy refinement factor must be >= 2");
    if (levels < 0) throw ConfigError("hierarchy level count must be >= 0");
    problem.validate();

    Grid g0 = make_coarsest(problem.length, coarse_cells);

    // every interior region interface must be resolved by G_0
    const double tol = 1e-12 * std::max(1.0, problem.length);
    for (std::size_t r = 0; r + 1 < problem.regions.size(); ++r) {
        const double x = problem.regions[r].x_hi;
        const double ratio = x / problem.length * coarse_cells;
        const double nearest = std::round(ratio);
        bool ok = std::abs(ratio - nearest) * problem.length / coarse_cells <= tol &&
                  nearest >= 1 && nearest <= coarse_cells - 1;
        if (!ok) {
            std::ostringstream msg;
            msg << "region interface at x=" << x << " is not a multiple of X/I0="
                << problem.length / coarse_cells << "; refine I0 or move the interface";
            throw ConfigError(msg.str());
        }
    }

    std::vector<Grid> grids;
    grids.reserve(static_cast<std::size_t>(levels) + 1);
    grids.push_back(std::move(g0));
    for (int l = 1; l <= levels; ++l)
        grids.push_back(refine(grids.back(), refinement));
    return GridHierarchy(std::move(grids), refinement);
}

std::vector<double> restrict_cell_averages(std::span<const double> fine,
                                           const Grid& fine_grid, const Grid& coarse_grid)
{
    if (static_cast<int>(fine.size()) != fine_grid.cells())
        throw InternalError("restrict_cell_averages: value/grid size mismatch");
    if (fine_grid.cells() % coarse_grid.cells() != 0)
        throw InternalError("restrict_cell_averages: grids are not nested");
    const int a = fine_grid.cells() / coarse_grid.cells();
    std::vector<double> coarse(static_cast<std::size_t>(coarse_grid.cells()));
    for (int i = 0; i < coarse_grid.cells(); ++i) {
        double acc = 0.0;
        for (int m = 0; m < a; ++m) {
            const int k = i * a + m;
            acc += fine[static_cast<std::size_t>(k)] * fine_grid.width(k);
        }
        coarse[static_cast<std::size_t>(i)] = acc / coarse_grid.width(i);
    }
    return coarse;
}

std::vector<double> restrict_cell_averages(std::span<const double> fine,
                                           const GridHierarchy& hierarchy,
                                           int from_level, int to_level)
{
    if (to_level > from_level)
        throw InternalError("restrict_cell_averages: target level finer than source");
    std::vector<double> v(fine.begin(), fine.end());
    for (int l = from_level; l > to_level; --l)
        v = restrict_cell_averages(v, hierarchy.grid(l), hierarchy.grid(l - 1));
    return v;
}

} // namespace mlht
