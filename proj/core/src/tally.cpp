#include "mlht/tally.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "mlht/errors.hpp"

namespace mlht {

TallySet::TallySet(Grid g) : grid(std::move(g))
{
    const std::size_t n_edges = grid.edges.size();
    for (auto& a : edge_acc)
        a.assign(n_edges, 0.0);
}

void TallySet::score_segment(double xa, double xb, double mu, double w)
{
    if (!(xb > xa)) return;
    const double abs_mu = std::abs(mu);
    const double b0 = w / abs_mu;
    const double b1 = b0 * mu;
    const double b2 = b1 * mu;
    const auto& e = grid.edges;
    const int n_edges = static_cast<int>(e.size());
    auto* a0 = edge_acc[0].data();
    auto* a1 = edge_acc[1].data();
    auto* a2 = edge_acc[2].data();

    // The per-flight shift (zero value on the longer side of the segment)
    // keeps the loop proportional to the shorter side. The choice depends
    // only on the flight, so edge values stay grid-independent.
    std::uint64_t touched = 0;
    if (xa + xb <= grid.length) {
        // contributions vanish for edges >= xb: value = clamp(e) - xb
        int i = grid.cell_of(std::min(xb, grid.length));
        while (i + 1 < n_edges && e[static_cast<std::size_t>(i) + 1] < xb) ++i;
        for (; i >= 0; --i) {
            const double ei = e[static_cast<std::size_t>(i)];
            if (ei >= xb) continue;
            const double v = (ei <= xa ? xa : ei) - xb;
            a0[i] += b0 * v;
            a1[i] += b1 * v;
            a2[i] += b2 * v;
            ++touched;
        }
    } else {
        // contributions vanish for edges <= xa: value = clamp(e) - xa
        int i = grid.cell_of(std::max(xa, 0.0));
        while (i > 0 && e[static_cast<std::size_t>(i)] > xa) --i;
        for (; i < n_edges; ++i) {
            const double ei = e[static_cast<std::size_t>(i)];
            if (ei <= xa) continue;
            const double v = (ei >= xb ? xb : ei) - xa;
            a0[i] += b0 * v;
            a1[i] += b1 * v;
            a2[i] += b2 * v;
            ++touched;
        }
    }
    events += cost::flight + touched * cost::edge_update;
}

void TallySet::score_surface(Side side, double mu, double w)
{
    const int s = static_cast<int>(side);
    const int sgn = mu > 0.0 ? 0 : 1;
    const double abs_mu = std::abs(mu);
    // flux-estimator guard: score for r=0 capped at w*1e3 for grazing angles
    surf[s][0][sgn] += w / std::max(abs_mu, 1e-3);
    surf[s][1][sgn] += w;
    surf[s][2][sgn] += w * abs_mu;
    events += cost::surface_crossing;
}

void TallySet::finalize(long k, double q_total)
{
    histories = k;
    source_strength = q_total;
}

double TallySet::norm() const
{
    if (histories <= 0) throw InternalError("tally not finalized");
    return source_strength / static_cast<double>(histories);
}

double TallySet::cell_moment(int r, int i) const
{
    const auto& a = edge_acc[static_cast<std::size_t>(r)];
    return norm() * (a[static_cast<std::size_t>(i) + 1] - a[static_cast<std::size_t>(i)]);
}

double TallySet::flux(int i) const
{
    return cell_moment(0, i) / grid.width(i);
}

double TallySet::surface(Side side, int r, Sign sign) const
{
    return norm() * surf[static_cast<int>(side)][r][static_cast<int>(sign)];
}

double TallySet::surface_full(Side side, int r) const
{
    const double sp = surface(side, r, Sign::plus);
    const double sm = surface(side, r, Sign::minus);
    return (r % 2 == 0) ? sp + sm : sp - sm;
}

double TallySet::surface_abs(Side side, int r) const
{
    return surface(side, r, Sign::plus) + surface(side, r, Sign::minus);
}

TallySet TallySet::restricted(const Grid& coarse) const
{
    if (grid.cells() % coarse.cells() != 0)
        throw InternalError("tally restriction: grids are not nested");
    const int a = grid.cells() / coarse.cells();
    for (int j = 0; j <= coarse.cells(); ++j) {
        if (coarse.edge(j) != grid.edge(a * j))
            throw InternalError("tally restriction: edges do not nest bit-exactly");
    }
    TallySet out(coarse);
    for (int r = 0; r < 3; ++r)
        for (int j = 0; j <= coarse.cells(); ++j)
            out.edge_acc[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
                edge_acc[static_cast<std::size_t>(r)][static_cast<std::size_t>(a * j)];
    std::memcpy(out.surf, surf, sizeof(surf));
    out.histories = histories;
    out.source_strength = source_strength;
    out.events = events;
    out.absorbed_weight = absorbed_weight;
    out.leaked_weight[0] = leaked_weight[0];
    out.leaked_weight[1] = leaked_weight[1];
    return out;
}

std::uint64_t TallySet::checksum() const
{
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& a : edge_acc)
        mix(a.data(), a.size() * sizeof(double));
    mix(surf, sizeof(surf));
    mix(&histories, sizeof(histories));
    return h;
}

void TallySet::write_csv(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write tally csv: " + path);
    out << "level,cell,T0,T1,T2\n";
    for (int i = 0; i < grid.cells(); ++i)
        out << grid.level << ',' << i + 1 << ',' << cell_moment(0, i) << ','
            << cell_moment(1, i) << ',' << cell_moment(2, i) << '\n';
}

double total_track_length(const TallySet& t)
{
    double s = 0.0;
    for (int i = 0; i < t.grid.cells(); ++i)
        s += t.cell_moment(0, i);
    return s;
}

TallySet restrict_tallies(const TallySet& fine, const GridHierarchy& hierarchy)
{
    const int level = fine.grid.level;
    if (level < 1) throw InternalError("restrict_tallies: already at the coarsest level");
    return fine.restricted(hierarchy.grid(level - 1));
}

} // namespace mlht
