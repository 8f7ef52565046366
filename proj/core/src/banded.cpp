#include "mlht/banded.hpp"

#include <algorithm>
#include <cmath>

#include "mlht/errors.hpp"

namespace mlht {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(ldab_), 0.0)
{
    if (n < 1 || kl < 0 || ku < 0)
        throw InternalError("banded matrix: invalid shape");
}

double& BandedMatrix::at(int i, int j)
{
    const int d = i - j;
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || d > kl_ || d < -(kl_ + ku_))
        throw InternalError("banded matrix: index outside band");
    return a_[static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab_) +
              static_cast<std::size_t>(kl_ + ku_ + d)];
}

double BandedMatrix::get(int i, int j) const
{
    const int d = i - j;
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || d > kl_ || d < -(kl_ + ku_))
        return 0.0;
    return a_[static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab_) +
              static_cast<std::size_t>(kl_ + ku_ + d)];
}

void BandedMatrix::matvec(std::span<const double> x, std::span<double> y) const
{
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        const int j_lo = std::max(0, i - kl_);
        const int j_hi = std::min(n_ - 1, i + kl_ + ku_);
        for (int j = j_lo; j <= j_hi; ++j)
            s += get(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
}

double BandedMatrix::inf_norm() const
{
    double norm = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + kl_ + ku_); ++j)
            row += std::abs(get(i, j));
        norm = std::max(norm, row);
    }
    return norm;
}

BandedLU::BandedLU(const BandedMatrix& m) : f_(m), pivots_(static_cast<std::size_t>(m.size()))
{
    const int n = f_.n_;
    const int kl = f_.kl_;
    const int ku = f_.ku_;
    int ju = 0; // last column touched by eliminations so far

    for (int j = 0; j < n; ++j) {
        const int km = std::min(kl, n - 1 - j);
        int p = 0;
        double best = std::abs(f_.get(j, j));
        for (int i = 1; i <= km; ++i) {
            const double v = std::abs(f_.get(j + i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        pivots_[static_cast<std::size_t>(j)] = j + p;
        if (best == 0.0)
            throw SolverError("banded LU: zero pivot in column " + std::to_string(j));

        ju = std::min(std::max(ju, j + ku + p), n - 1);
        if (p != 0) {
            for (int c = j; c <= ju; ++c)
                std::swap(f_.at(j + p, c), f_.at(j, c));
        }
        const double inv_piv = 1.0 / f_.get(j, j);
        for (int i = 1; i <= km; ++i)
            f_.at(j + i, j) *= inv_piv;
        for (int c = j + 1; c <= ju; ++c) {
            const double u = f_.get(j, c);
            if (u == 0.0) continue;
            for (int i = 1; i <= km; ++i)
                f_.at(j + i, c) -= f_.get(j + i, j) * u;
        }
    }
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const
{
    const int n = f_.n_;
    if (static_cast<int>(rhs.size()) != n)
        throw InternalError("banded solve: rhs size mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());

    for (int j = 0; j < n; ++j) {
        const int pj = pivots_[static_cast<std::size_t>(j)];
        if (pj != j) std::swap(x[static_cast<std::size_t>(j)], x[static_cast<std::size_t>(pj)]);
        const int km = std::min(f_.kl_, n - 1 - j);
        for (int i = 1; i <= km; ++i)
            x[static_cast<std::size_t>(j + i)] -= f_.get(j + i, j) * x[static_cast<std::size_t>(j)];
    }
    for (int i = n - 1; i >= 0; --i) {
        const int j_hi = std::min(n - 1, i + f_.kl_ + f_.ku_);
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j <= j_hi; ++j)
            s -= f_.get(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / f_.get(i, i);
    }
    return x;
}

} // namespace mlht
