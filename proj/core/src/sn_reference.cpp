#include "mlht/sn_reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mlht/errors.hpp"

namespace mlht {

AngularQuadrature gauss_legendre(int order)
{
    if (order < 2 || order % 2 != 0)
        throw ConfigError("angular quadrature order must be even and >= 2");
    AngularQuadrature q;
    q.mu.resize(static_cast<std::size_t>(order));
    q.weight.resize(static_cast<std::size_t>(order));
    const int half = order / 2;
    for (int k = 0; k < half; ++k) {
        // Newton iteration from the Chebyshev-angle initial guess
        double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= order; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= order; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const double dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.mu[static_cast<std::size_t>(half - 1 - k)] = -x;
        q.mu[static_cast<std::size_t>(half + k)] = x;
        q.weight[static_cast<std::size_t>(half - 1 - k)] = w;
        q.weight[static_cast<std::size_t>(half + k)] = w;
    }
    return q;
}

AngularQuadrature double_gauss(int order)
{
    if (order < 4 || order % 4 != 0)
        throw ConfigError("double-Gauss order must be a multiple of 4");
    const AngularQuadrature half = gauss_legendre(order / 2);
    AngularQuadrature q;
    q.mu.resize(static_cast<std::size_t>(order));
    q.weight.resize(static_cast<std::size_t>(order));
    const int h = order / 2;
    for (int k = 0; k < h; ++k) {
        const double x = 0.5 * (half.mu[static_cast<std::size_t>(k)] + 1.0); // (0, 1)
        const double w = 0.5 * half.weight[static_cast<std::size_t>(k)];
        q.mu[static_cast<std::size_t>(h + k)] = x;
        q.weight[static_cast<std::size_t>(h + k)] = w;
        q.mu[static_cast<std::size_t>(h - 1 - k)] = -x;
        q.weight[static_cast<std::size_t>(h - 1 - k)] = w;
    }
    return q;
}

double AngularFluxGrid::scalar_flux(int i) const
{
    double s = 0.0;
    for (int m = 0; m < quad.order(); ++m)
        s += quad.weight[static_cast<std::size_t>(m)] * avg(m, i);
    return s;
}

double AngularFluxGrid::scalar_flux_edge(int i) const
{
    double s = 0.0;
    for (int m = 0; m < quad.order(); ++m)
        s += quad.weight[static_cast<std::size_t>(m)] * edge(m, i);
    return s;
}

double AngularFluxGrid::current_edge(int i) const
{
    double s = 0.0;
    for (int m = 0; m < quad.order(); ++m)
        s += quad.weight[static_cast<std::size_t>(m)] * quad.mu[static_cast<std::size_t>(m)] * edge(m, i);
    return s;
}

AngularFluxGrid sn_solve(const SlabProblem& problem, const Grid& grid, int n_angles, double tol)
{
    return sn_solve(problem, grid, double_gauss(n_angles), tol);
}

AngularFluxGrid sn_solve(const SlabProblem& problem, const Grid& grid,
                         AngularQuadrature quad, double tol)
{
    problem.validate();
    if (!(tol > 0.0)) throw ConfigError("sn_solve tolerance must be positive");

    AngularFluxGrid af;
    af.grid = grid;
    af.quad = std::move(quad);
    const int cells = grid.cells();
    const int order = af.quad.order();
    af.psi_avg.assign(static_cast<std::size_t>(order) * static_cast<std::size_t>(cells), 0.0);
    af.psi_edge.assign(static_cast<std::size_t>(order) * static_cast<std::size_t>(cells + 1), 0.0);

    std::vector<MaterialSample> mat(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i)
        mat[static_cast<std::size_t>(i)] = material_at(problem, grid.center(i));

    std::vector<double> phi(static_cast<std::size_t>(cells), 0.0);
    std::vector<double> phi_new(static_cast<std::size_t>(cells));
    const double c_max = problem.max_scattering_ratio();
    const double stop = tol * std::max(1e-300, 1.0 - c_max);
    const int max_iters = 100000;

    double prev_diff = 0.0;
    for (int iter = 1; iter <= max_iters; ++iter) {
        std::fill(phi_new.begin(), phi_new.end(), 0.0);
        for (int m = 0; m < order; ++m) {
            const double mu = af.quad.mu[static_cast<std::size_t>(m)];
            const double w = af.quad.weight[static_cast<std::size_t>(m)];
            double* edge = &af.psi_edge[static_cast<std::size_t>(m) * (cells + 1)];
            double* avg = &af.psi_avg[static_cast<std::size_t>(m) * cells];
            if (mu > 0.0) {
                edge[0] = problem.left.phi_in; // isotropic incident distribution
                for (int i = 0; i < cells; ++i) {
                    const auto& mt = mat[static_cast<std::size_t>(i)];
                    const double src = 0.5 * (mt.sigma_s * phi[static_cast<std::size_t>(i)] + mt.q);
                    const double h = mu / grid.width(i);
                    const double out =
                        ((h - 0.5 * mt.sigma_t) * edge[i] + src) / (h + 0.5 * mt.sigma_t);
                    edge[i + 1] = out;
                    avg[i] = 0.5 * (edge[i] + out);
                    phi_new[static_cast<std::size_t>(i)] += w * avg[i];
                }
            } else {
                edge[cells] = problem.right.phi_in;
                for (int i = cells - 1; i >= 0; --i) {
                    const auto& mt = mat[static_cast<std::size_t>(i)];
                    const double src = 0.5 * (mt.sigma_s * phi[static_cast<std::size_t>(i)] + mt.q);
                    const double h = -mu / grid.width(i);
                    const double out =
                        ((h - 0.5 * mt.sigma_t) * edge[i + 1] + src) / (h + 0.5 * mt.sigma_t);
                    edge[i] = out;
                    avg[i] = 0.5 * (edge[i + 1] + out);
                    phi_new[static_cast<std::size_t>(i)] += w * avg[i];
                }
            }
        }
        double diff = 0.0;
        for (int i = 0; i < cells; ++i)
            diff = std::max(diff, std::abs(phi_new[static_cast<std::size_t>(i)] - phi[static_cast<std::size_t>(i)]));
        phi.swap(phi_new);
        af.iterations = iter;
        if (diff < stop) break;
        if (iter == max_iters) {
            const double rho = prev_diff > 0.0 ? diff / prev_diff : 1.0;
            throw SolverError("source iteration did not converge in 1e5 iterations"
                              " (estimated spectral radius " + std::to_string(rho) + ")");
        }
        prev_diff = diff;
    }

    for (double v : af.psi_avg)
        if (v < 0.0)
            throw SolverError("diamond difference produced a negative angular flux; refine the grid");
    return af;
}

ClosureSet closures_on_grid(const AngularFluxGrid& af, const Grid& target)
{
    if (af.grid.cells() % target.cells() != 0)
        throw InternalError("closures_on_grid: angular flux grid does not nest over the target");
    const int per = af.grid.cells() / target.cells();
    const int cells = target.cells();
    const int order = af.quad.order();
    ClosureSet cs;
    cs.qd.eddington.resize(static_cast<std::size_t>(cells));
    cs.sm.h.resize(static_cast<std::size_t>(cells));

    for (int i = 0; i < cells; ++i) {
        double m0 = 0.0, m2 = 0.0; // volume integrals over the target cell
        for (int k = i * per; k < (i + 1) * per; ++k) {
            double s0 = 0.0, s2 = 0.0;
            for (int m = 0; m < order; ++m) {
                const double w = af.quad.weight[static_cast<std::size_t>(m)];
                const double mu = af.quad.mu[static_cast<std::size_t>(m)];
                const double psi = af.avg(m, k);
                s0 += w * psi;
                s2 += w * mu * mu * psi;
            }
            m0 += s0 * af.grid.width(k);
            m2 += s2 * af.grid.width(k);
        }
        if (m0 > 0.0) {
            cs.qd.eddington[static_cast<std::size_t>(i)] = m2 / m0;
        } else {
            cs.qd.eddington[static_cast<std::size_t>(i)] = 1.0 / 3.0;
            ++cs.qd.starved_cells;
        }
        cs.sm.h[static_cast<std::size_t>(i)] = (m0 - 3.0 * m2) / (3.0 * target.width(i));
    }

    auto face = [&](int edge_index, bool left) {
        double s0 = 0.0, s1_half = 0.0, s0_half = 0.0, s2 = 0.0, s1_abs = 0.0;
        for (int m = 0; m < order; ++m) {
            const double w = af.quad.weight[static_cast<std::size_t>(m)];
            const double mu = af.quad.mu[static_cast<std::size_t>(m)];
            const double psi = af.edge(m, edge_index);
            s0 += w * psi;
            s2 += w * mu * mu * psi;
            s1_abs += w * std::abs(mu) * psi;
            const bool outgoing_half = left ? (mu < 0.0) : (mu > 0.0);
            if (outgoing_half) {
                s0_half += w * psi;
                s1_half += w * mu * psi;
            }
        }
        struct FaceMoments {
            double s0, s2, s1_abs, s0_half, s1_half;
        };
        return FaceMoments{s0, s2, s1_abs, s0_half, s1_half};
    };

    const auto fl = face(0, true);
    const auto fr = face(af.grid.cells(), false);
    cs.qd.eddington_left = fl.s0 > 0.0 ? fl.s2 / fl.s0 : 1.0 / 3.0;
    cs.qd.eddington_right = fr.s0 > 0.0 ? fr.s2 / fr.s0 : 1.0 / 3.0;
    cs.qd.boundary_left = fl.s0_half > 0.0 ? fl.s1_half / fl.s0_half : -0.5;
    cs.qd.boundary_right = fr.s0_half > 0.0 ? fr.s1_half / fr.s0_half : 0.5;
    cs.sm.h_left = (fl.s0 - 3.0 * fl.s2) / 3.0;
    cs.sm.h_right = (fr.s0 - 3.0 * fr.s2) / 3.0;
    cs.sm.w_left = 0.5 * (fl.s0 - 2.0 * fl.s1_abs);
    cs.sm.w_right = 0.5 * (fr.s0 - 2.0 * fr.s1_abs);
    return cs;
}

ClosureSet exact_closures(const AngularFluxGrid& af)
{
    return closures_on_grid(af, af.grid);
}

std::vector<ClosureSet> exact_closure_table(const AngularFluxGrid& fine,
                                            const GridHierarchy& hierarchy)
{
    std::vector<ClosureSet> table;
    table.reserve(static_cast<std::size_t>(hierarchy.num_levels()));
    for (int l = 0; l < hierarchy.num_levels(); ++l)
        table.push_back(closures_on_grid(fine, hierarchy.grid(l)));
    return table;
}

double ReferenceSolution::functional_whole_domain() const
{
    double f = 0.0;
    for (int i = 0; i < grid.cells(); ++i)
        f += phi[static_cast<std::size_t>(i)] * grid.width(i);
    return f;
}

double ReferenceSolution::functional(const FunctionalSpec& spec, const GridHierarchy& hierarchy) const
{
    if (spec.kind == FunctionalSpec::Kind::whole_domain) return functional_whole_domain();
    if (spec.kind != FunctionalSpec::Kind::coarse_cell)
        throw InternalError("reference functional: vector specs are evaluated per cell");
    const Grid& coarse = hierarchy.coarsest();
    spec.validate(coarse.cells());
    if (grid.cells() % coarse.cells() != 0)
        throw InternalError("reference grid does not nest in the coarse grid");
    const int per = grid.cells() / coarse.cells();
    double f = 0.0;
    for (int k = (spec.cell - 1) * per; k < spec.cell * per; ++k)
        f += phi[static_cast<std::size_t>(k)] * grid.width(k);
    return f;
}

ReferenceSolution aitken_reference(const SlabProblem& problem, const Grid& target,
                                   const AitkenSchedule& schedule)
{
    if (schedule.n_angles.size() != 3)
        throw ConfigError("aitken_reference needs exactly three angular orders");
    if (schedule.base_refinement < 1)
        throw ConfigError("aitken_reference base refinement must be >= 1");

    // three nested refinements of the target grid: base, 2x, 4x
    std::vector<std::vector<double>> levels;
    for (int k = 0; k < 3; ++k) {
        const int mult = schedule.base_refinement << k;
        Grid g = target;
        if (mult > 1) {
            Grid refined;
            refined.level = target.level;
            refined.length = target.length;
            refined.edges.reserve(static_cast<std::size_t>(target.cells()) * mult + 1);
            for (int i = 0; i < target.cells(); ++i) {
                const double lo = target.edge(i);
                const double h = target.width(i) / mult;
                refined.edges.push_back(lo);
                for (int m = 1; m < mult; ++m)
                    refined.edges.push_back(lo + m * h);
            }
            refined.edges.push_back(target.edges.back());
            g = std::move(refined);
        }
        AngularFluxGrid af = sn_solve(problem, g, schedule.n_angles[static_cast<std::size_t>(k)],
                                      schedule.tol);
        std::vector<double> phi(static_cast<std::size_t>(g.cells()));
        for (int i = 0; i < g.cells(); ++i)
            phi[static_cast<std::size_t>(i)] = af.scalar_flux(i);
        levels.push_back(restrict_cell_averages(phi, g, target));
    }

    ReferenceSolution ref;
    ref.grid = target;
    ref.phi.resize(static_cast<std::size_t>(target.cells()));
    ref.uncertainty.resize(static_cast<std::size_t>(target.cells()));
    for (int i = 0; i < target.cells(); ++i) {
        const double p0 = levels[0][static_cast<std::size_t>(i)];
        const double p1 = levels[1][static_cast<std::size_t>(i)];
        const double p2 = levels[2][static_cast<std::size_t>(i)];
        const double d0 = p1 - p0;
        const double d1 = p2 - p1;
        const double denom = d1 - d0;
        double value;
        if (std::abs(denom) < 1e-14 * std::abs(p2) || d0 * d1 < 0.0) {
            value = p2; // converged, degenerate, or non-monotone triple
            ++ref.fallback_cells;
        } else {
            value = p2 - d1 * d1 / denom;
        }
        ref.phi[static_cast<std::size_t>(i)] = value;
        ref.uncertainty[static_cast<std::size_t>(i)] = std::abs(value - p2);
    }
    return ref;
}

double relative_l2(std::span<const double> phi, std::span<const double> phi_ref, const Grid& grid)
{
    if (phi.size() != phi_ref.size() || static_cast<int>(phi.size()) != grid.cells())
        throw InternalError("relative_l2: length mismatch");
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid.cells(); ++i) {
        const double d = phi[static_cast<std::size_t>(i)] - phi_ref[static_cast<std::size_t>(i)];
        num += d * d * grid.width(i);
        den += phi_ref[static_cast<std::size_t>(i)] * phi_ref[static_cast<std::size_t>(i)] * grid.width(i);
    }
    if (!(den > 0.0)) throw InternalError("relative_l2: reference norm is zero");
    return std::sqrt(num / den);
}

} // namespace mlht
