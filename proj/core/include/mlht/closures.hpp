#pragma once

#include <vector>

#include "mlht/tally.hpp"

namespace mlht {

/// Eddington-factor closures of the low-order QD system.
struct QDClosures {
    std::vector<double> eddington;  ///< cell averages E_i
    double eddington_left = 1.0 / 3.0;
    double eddington_right = 1.0 / 3.0;
    double boundary_left = -0.5;    ///< B_L in [-1, 0)
    double boundary_right = 0.5;    ///< B_R in (0, 1]
    int starved_cells = 0;          ///< cells that fell back to 1/3
    bool starved_boundary = false;

    static QDClosures diffusion(int cells)
    {
        QDClosures c;
        c.eddington.assign(static_cast<std::size_t>(cells), 1.0 / 3.0);
        return c;
    }
};

/// Second-moment closures of the low-order SM system.
struct SMClosures {
    std::vector<double> h; ///< cell averages H_i (flux units)
    double h_left = 0.0;
    double h_right = 0.0;
    double w_left = 0.0;   ///< W_L (current units)
    double w_right = 0.0;  ///< W_R

    static SMClosures diffusion(int cells)
    {
        SMClosures c;
        c.h.assign(static_cast<std::size_t>(cells), 0.0);
        return c;
    }
};

/// E_i = T2/T0 per cell, boundary factors from surface-crossing moments.
/// Cells or faces without scores fall back to the diffusion values and are
/// counted in the starved fields.
QDClosures qd_closures(const TallySet& tally);

/// H_i = (T0 - 3 T2)/(3 dx), boundary functionals from full-range and
/// absolute surface moments. Empty cells give H = 0.
SMClosures sm_closures(const TallySet& tally);

} // namespace mlht
