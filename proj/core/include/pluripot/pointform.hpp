#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "pluripot/hermitian.hpp"

namespace pluripot {

/// Multi-index helpers: subsets of {0,...,n-1} are bitmasks; a (p,q) basis
/// element is dz_I ^ dzbar_J with I, J strictly increasing, all dz factors
/// written before all dzbar factors.
namespace multi_index {

int binomial(int n, int k);

/// Combinatorial rank of bitmask `mask` among all popcount(mask)-subsets
/// of {0..n-1}, in lexicographic order of the increasing index tuple.
int rank(int n, int mask);

/// Inverse of rank.
int unrank(int n, int p, int r);

/// Sign of merging two disjoint increasing tuples (given as bitmasks) into
/// one increasing tuple, counting transpositions. Returns 0 if they overlap.
int merge_sign(int maskA, int maskB);

}  // namespace multi_index

/// A (p,q)-form at a single point of C^n, n <= 3. Coefficients are indexed
/// by (rank(I), rank(J)) pairs, flattened row-major: idx = rI * C(n,q) + rJ.
class PointForm {
  public:
    PointForm() = default;
    PointForm(int n, int p, int q);

    int n() const { return n_; }
    int p() const { return p_; }
    int q() const { return q_; }
    int num_coeffs() const { return int(c_.size()); }

    cplx& coeff(int rI, int rJ) { return c_[std::size_t(rI * nq_ + rJ)]; }
    const cplx& coeff(int rI, int rJ) const { return c_[std::size_t(rI * nq_ + rJ)]; }
    cplx& flat(int i) { return c_[std::size_t(i)]; }
    const cplx& flat(int i) const { return c_[std::size_t(i)]; }

    double norm_inf() const;

    /// Deviation from realness: for a (p,p)-form, sup |c[I][J] - conj(c[J][I])|.
    double reality_defect() const;

    PointForm& operator+=(const PointForm& o);
    PointForm& operator*=(cplx s);
    friend PointForm operator+(PointForm a, const PointForm& b) { return a += b; }
    friend PointForm operator*(cplx s, PointForm a) { return a *= s; }

    /// The (1,1)-form i * sum_jk A_jk dz_j ^ dzbar_k.
    static PointForm from_hermitian(const HermitianMatrix& a);

    /// Pairing matrix of an (n-1,n-1)-form: S_jk = density(f ^ i dz_j ^ dzbar_k)
    /// in the repository convention divided by (n-1)!. For f = theta^{n-1}
    /// with theta of matrix T this equals (n-1)! * adj(T) / (n-1)! = adj(T).
    HermitianMatrix pairing_matrix() const;

  private:
    int n_ = 1, p_ = 0, q_ = 0, np_ = 1, nq_ = 1;
    std::vector<cplx> c_;
};

PointForm wedge(const PointForm& a, const PointForm& b);

/// Density of a top (n,n)-form in the repository volume convention: for
/// constant Hermitian matrices, alpha_1^...^alpha_n has density
/// n! * mixed_discriminant. Asserts a small imaginary part for real forms.
double top_density(const PointForm& f);
cplx top_density_complex(const PointForm& f);

/// i gamma ^ conj(gamma) for a (1,0)-covector gamma: the rank-one positive
/// (1,1)-form with matrix g g^*.
PointForm rank_one_11(int n, const cplx* gamma);

struct WeakPositivityResult {
    bool flag;
    double worst_pairing;
    int worst_direction;
};

/// Weak positivity test for a (2,2)-form in n=3: evaluates
/// density(theta ^ i gamma^conj(gamma)) over a deterministic direction set
/// (low-discrepancy lattice plus seeded pseudo-random unit covectors).
WeakPositivityResult is_weakly_positive_22(const PointForm& theta, int directions, double tol,
                                           std::uint64_t seed = 20240901);

/// The deterministic direction sample shared by all weak-positivity scans.
std::vector<std::array<cplx, 3>> direction_sample(int n, int count, std::uint64_t seed = 20240901);

}  // namespace pluripot
