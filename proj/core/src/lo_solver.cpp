#include "mlht/lo_solver.hpp"

#include <chrono>
#include <cmath>

#include "mlht/errors.hpp"

namespace mlht {

std::string to_string(Method m)
{
    return m == Method::hqd ? "hqd" : "hsm";
}

Method method_from_string(const std::string& s)
{
    if (s == "hqd" || s == "HQD" || s == "qd") return Method::hqd;
    if (s == "hsm" || s == "HSM" || s == "sm") return Method::hsm;
    throw ConfigError("unknown method '" + s + "' (expected hqd or hsm)");
}

namespace {

// Unknown ordering: phi_left -> 0, J_i -> 2i+1, phi_i -> 2i (i = 1..I),
// phi_right -> 2I+2. All equations touch neighbors only, so the system is
// tridiagonal in this ordering.
struct Layout {
    int cells;
    int size() const { return 2 * cells + 3; }
    int phi_left() const { return 0; }
    int phi(int i) const { return 2 * i; }        // 1-based cell
    int current(int i) const { return 2 * i + 1; } // 0-based edge
    int phi_right() const { return 2 * cells + 2; }
};

struct DualCell {
    double sigma_hat;
    double dx_hat;
};

// Dual (staggered) cell i = 1..I+1 around edge i-1; boundary half-cells use
// the adjacent cell's cross section and half width.
DualCell dual_cell(const SlabProblem& problem, const Grid& grid, int i)
{
    const int n = grid.cells();
    if (i == 1) {
        const double sig = material_at(problem, grid.center(0)).sigma_t;
        return {sig, 0.5 * grid.width(0)};
    }
    if (i == n + 1) {
        const double sig = material_at(problem, grid.center(n - 1)).sigma_t;
        return {sig, 0.5 * grid.width(n - 1)};
    }
    const double dx_l = grid.width(i - 2);
    const double dx_r = grid.width(i - 1);
    const double sig_l = material_at(problem, grid.center(i - 2)).sigma_t;
    const double sig_r = material_at(problem, grid.center(i - 1)).sigma_t;
    return {(sig_r * dx_r + sig_l * dx_l) / (dx_r + dx_l), 0.5 * (dx_r + dx_l)};
}

LinearSystem make_system(const Grid& grid)
{
    Layout lay{grid.cells()};
    LinearSystem sys{BandedMatrix(lay.size(), 1, 1), std::vector<double>(static_cast<std::size_t>(lay.size()), 0.0),
                     grid.cells(), grid.level};
    return sys;
}

void add_balance_rows(LinearSystem& sys, const SlabProblem& problem, const Grid& grid)
{
    Layout lay{grid.cells()};
    for (int i = 1; i <= grid.cells(); ++i) {
        const MaterialSample m = material_at(problem, grid.center(i - 1));
        const double dx = grid.width(i - 1);
        const int row = 2 * i;
        sys.matrix.at(row, lay.current(i)) += 1.0;
        sys.matrix.at(row, lay.current(i - 1)) -= 1.0;
        sys.matrix.at(row, lay.phi(i)) += (m.sigma_t - m.sigma_s) * dx;
        sys.rhs[static_cast<std::size_t>(row)] = m.q * dx;
    }
}

} // namespace

LinearSystem assemble_loqd(const SlabProblem& problem, const Grid& grid, const QDClosures& c)
{
    const int n = grid.cells();
    if (static_cast<int>(c.eddington.size()) != n)
        throw InternalError("assemble_loqd: closure size mismatch");
    LinearSystem sys = make_system(grid);
    Layout lay{n};

    add_balance_rows(sys, problem, grid);

    // first-moment rows on dual cells i = 1..I+1 (edge current J_{i-1})
    for (int i = 1; i <= n + 1; ++i) {
        const DualCell d = dual_cell(problem, grid, i);
        const int row = 2 * i - 1;
        const double e_right = i <= n ? c.eddington[static_cast<std::size_t>(i - 1)] : c.eddington_right;
        const double e_left = i >= 2 ? c.eddington[static_cast<std::size_t>(i - 2)] : c.eddington_left;
        const int col_right = i <= n ? lay.phi(i) : lay.phi_right();
        const int col_left = i >= 2 ? lay.phi(i - 1) : lay.phi_left();
        sys.matrix.at(row, col_right) += e_right;
        sys.matrix.at(row, col_left) -= e_left;
        sys.matrix.at(row, lay.current(i - 1)) += d.sigma_hat * d.dx_hat;
    }

    // boundary conditions J_0 = B_L (phi_0 - phi_in+) + J_in+ and mirror
    sys.matrix.at(0, lay.current(0)) = 1.0;
    sys.matrix.at(0, lay.phi_left()) = -c.boundary_left;
    sys.rhs[0] = problem.left.j_in - c.boundary_left * problem.left.phi_in;

    const int last = lay.phi_right();
    sys.matrix.at(last, lay.current(n)) = 1.0;
    sys.matrix.at(last, lay.phi_right()) = -c.boundary_right;
    sys.rhs[static_cast<std::size_t>(last)] = problem.right.j_in - c.boundary_right * problem.right.phi_in;
    return sys;
}

LinearSystem assemble_losm(const SlabProblem& problem, const Grid& grid, const SMClosures& c)
{
    const int n = grid.cells();
    if (static_cast<int>(c.h.size()) != n)
        throw InternalError("assemble_losm: closure size mismatch");
    LinearSystem sys = make_system(grid);
    Layout lay{n};

    add_balance_rows(sys, problem, grid);

    for (int i = 1; i <= n + 1; ++i) {
        const DualCell d = dual_cell(problem, grid, i);
        const int row = 2 * i - 1;
        const double h_right = i <= n ? c.h[static_cast<std::size_t>(i - 1)] : c.h_right;
        const double h_left = i >= 2 ? c.h[static_cast<std::size_t>(i - 2)] : c.h_left;
        const int col_right = i <= n ? lay.phi(i) : lay.phi_right();
        const int col_left = i >= 2 ? lay.phi(i - 1) : lay.phi_left();
        sys.matrix.at(row, col_right) += 1.0 / 3.0;
        sys.matrix.at(row, col_left) -= 1.0 / 3.0;
        sys.matrix.at(row, lay.current(i - 1)) += d.sigma_hat * d.dx_hat;
        sys.rhs[static_cast<std::size_t>(row)] = h_right - h_left;
    }

    // J_0 = -phi_0/2 + 2 J_in+ + W_L,  J_I = phi_{I+1}/2 + 2 J_in- - W_R
    sys.matrix.at(0, lay.current(0)) = 1.0;
    sys.matrix.at(0, lay.phi_left()) = 0.5;
    sys.rhs[0] = 2.0 * problem.left.j_in + c.w_left;

    const int last = lay.phi_right();
    sys.matrix.at(last, lay.current(n)) = 1.0;
    sys.matrix.at(last, lay.phi_right()) = -0.5;
    sys.rhs[static_cast<std::size_t>(last)] = 2.0 * problem.right.j_in - c.w_right;
    return sys;
}

HybridRealization solve_banded(const LinearSystem& sys)
{
    const int n = sys.matrix.size();
    std::vector<double> x;
    try {
        BandedLU lu(sys.matrix);
        x = lu.solve(sys.rhs);
    } catch (const SolverError& e) {
        throw SolverError("low-order solve on level " + std::to_string(sys.level) +
                          " failed: " + e.what());
    }

    std::vector<double> ax(static_cast<std::size_t>(n));
    sys.matrix.matvec(x, ax);
    double res = 0.0, bnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        res = std::max(res, std::abs(ax[static_cast<std::size_t>(i)] - sys.rhs[static_cast<std::size_t>(i)]));
        bnorm = std::max(bnorm, std::abs(sys.rhs[static_cast<std::size_t>(i)]));
    }
    const double scale = std::max(bnorm, sys.matrix.inf_norm() * 1e-30);
    if (scale > 0.0 && res / scale > 1e-10)
        throw SolverError("low-order solve on level " + std::to_string(sys.level) +
                          ": relative residual " + std::to_string(res / scale) +
                          " exceeds 1e-10 (norm(A)=" + std::to_string(sys.matrix.inf_norm()) + ")");

    Layout lay{sys.cells};
    HybridRealization r;
    r.level = sys.level;
    r.phi_left = x[static_cast<std::size_t>(lay.phi_left())];
    r.phi_right = x[static_cast<std::size_t>(lay.phi_right())];
    r.phi.resize(static_cast<std::size_t>(sys.cells));
    for (int i = 1; i <= sys.cells; ++i)
        r.phi[static_cast<std::size_t>(i - 1)] = x[static_cast<std::size_t>(lay.phi(i))];
    r.current.resize(static_cast<std::size_t>(sys.cells) + 1);
    for (int i = 0; i <= sys.cells; ++i)
        r.current[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(lay.current(i))];
    r.cost.events = static_cast<std::uint64_t>(n) * cost::solve_per_unknown;
    return r;
}

ClosureSet closures_from_tally(const TallySet& tally)
{
    return {qd_closures(tally), sm_closures(tally)};
}

HybridRealization solve_low_order(const SlabProblem& problem, const Grid& grid,
                                  const ClosureSet& closures, Method method)
{
    LinearSystem sys = method == Method::hqd ? assemble_loqd(problem, grid, closures.qd)
                                             : assemble_losm(problem, grid, closures.sm);
    HybridRealization r = solve_banded(sys);
    r.starved_cells = closures.qd.starved_cells;
    r.starved_boundary = closures.qd.starved_boundary;
    r.cost.events += static_cast<std::uint64_t>(grid.cells()) * cost::closure_per_cell;
    return r;
}

RealizationPair hybrid_realization(const SlabProblem& problem, const GridHierarchy& hierarchy,
                                   int level, Method method, long histories,
                                   const StreamId& id, const RealizationOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Grid& fine_grid = hierarchy.grid(level);
    RealizationPair pair;

    if (opts.exact_closures) {
        const auto& table = *opts.exact_closures;
        pair.fine = solve_low_order(problem, fine_grid, table.at(static_cast<std::size_t>(level)), method);
        if (opts.with_coarse && level >= 1)
            pair.coarse = solve_low_order(problem, hierarchy.grid(level - 1),
                                          table.at(static_cast<std::size_t>(level - 1)), method);
    } else {
        TallySet tally = run_ensemble(problem, fine_grid, histories, id, opts.tracking);
        pair.fine = solve_low_order(problem, fine_grid, closures_from_tally(tally), method);
        pair.fine.cost.events += tally.events;
        if (opts.with_coarse && level >= 1) {
            TallySet coarse_tally = restrict_tallies(tally, hierarchy);
            pair.coarse = solve_low_order(problem, hierarchy.grid(level - 1),
                                          closures_from_tally(coarse_tally), method);
        }
    }

    const auto t1 = std::chrono::steady_clock::now();
    pair.fine.cost.seconds = std::chrono::duration<double>(t1 - t0).count();
    return pair;
}

} // namespace mlht
