#pragma once

#include <span>
#include <vector>

namespace mlht {

/// Square banded matrix with kl sub- and ku superdiagonals, stored in
/// LAPACK band layout with room for kl fill rows from partial pivoting.
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    double& at(int i, int j);
    double get(int i, int j) const;

    void matvec(std::span<const double> x, std::span<double> y) const;
    double inf_norm() const;

private:
    friend class BandedLU;
    int n_, kl_, ku_, ldab_;
    std::vector<double> a_; ///< column-major: a_[j*ldab + kl + ku + i - j]
};

/// LU factorization with row partial pivoting of a banded matrix.
class BandedLU {
public:
    /// Factors a copy of m. Throws SolverError on an exactly zero pivot.
    explicit BandedLU(const BandedMatrix& m);

    std::vector<double> solve(std::span<const double> rhs) const;

private:
    BandedMatrix f_;
    std::vector<int> pivots_;
};

} // namespace mlht
