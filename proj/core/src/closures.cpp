#include "mlht/closures.hpp"

namespace mlht {

QDClosures qd_closures(const TallySet& t)
{
    const int n = t.grid.cells();
    QDClosures c;
    c.eddington.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t0 = t.cell_moment(0, i);
        if (t0 > 0.0) {
            c.eddington[static_cast<std::size_t>(i)] = t.cell_moment(2, i) / t0;
        } else {
            c.eddington[static_cast<std::size_t>(i)] = 1.0 / 3.0;
            ++c.starved_cells;
        }
    }

    const double s0_left = t.surface_full(Side::left, 0);
    if (s0_left > 0.0)
        c.eddington_left = t.surface_full(Side::left, 2) / s0_left;
    else
        c.starved_boundary = true;
    const double s0_right = t.surface_full(Side::right, 0);
    if (s0_right > 0.0)
        c.eddington_right = t.surface_full(Side::right, 2) / s0_right;
    else
        c.starved_boundary = true;

    const double s0m = t.surface(Side::left, 0, Sign::minus);
    if (s0m > 0.0)
        c.boundary_left = -t.surface(Side::left, 1, Sign::minus) / s0m;
    else
        c.starved_boundary = true;
    const double s0p = t.surface(Side::right, 0, Sign::plus);
    if (s0p > 0.0)
        c.boundary_right = t.surface(Side::right, 1, Sign::plus) / s0p;
    else
        c.starved_boundary = true;

    return c;
}

SMClosures sm_closures(const TallySet& t)
{
    const int n = t.grid.cells();
    SMClosures c;
    c.h.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t0 = t.cell_moment(0, i);
        c.h[static_cast<std::size_t>(i)] =
            t0 != 0.0 ? (t0 - 3.0 * t.cell_moment(2, i)) / (3.0 * t.grid.width(i)) : 0.0;
    }
    c.h_left = (t.surface_full(Side::left, 0) - 3.0 * t.surface_full(Side::left, 2)) / 3.0;
    c.h_right = (t.surface_full(Side::right, 0) - 3.0 * t.surface_full(Side::right, 2)) / 3.0;
    c.w_left = 0.5 * (t.surface_abs(Side::left, 0) - 2.0 * t.surface_abs(Side::left, 1));
    c.w_right = 0.5 * (t.surface_abs(Side::right, 0) - 2.0 * t.surface_abs(Side::right, 1));
    return c;
}

} // namespace mlht
