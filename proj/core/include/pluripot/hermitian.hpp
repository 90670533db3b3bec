#pragma once

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace pluripot {

using cplx = std::complex<double>;

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct PositivityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Coefficient matrix of a real (1,1)-form at a point of C^n, n <= 3.
/// Entries are stored row-major; a(j,k) must equal conj(a(k,j)).
class HermitianMatrix {
  public:
    HermitianMatrix() : n_(1) { a_.fill(cplx{0.0, 0.0}); }
    explicit HermitianMatrix(int n) : n_(n) {
        check_dim(n);
        a_.fill(cplx{0.0, 0.0});
    }

    static HermitianMatrix identity(int n) {
        HermitianMatrix m(n);
        for (int j = 0; j < n; ++j) m(j, j) = 1.0;
        return m;
    }
    static HermitianMatrix diagonal(std::span<const double> d) {
        HermitianMatrix m(int(d.size()));
        for (int j = 0; j < m.n_; ++j) m(j, j) = d[j];
        return m;
    }

    int dim() const { return n_; }

    cplx& operator()(int j, int k) { return a_[std::size_t(3 * j + k)]; }
    const cplx& operator()(int j, int k) const { return a_[std::size_t(3 * j + k)]; }

    /// Enforce exact conjugate-symmetry (averages the off-diagonal pair,
    /// drops imaginary parts on the diagonal).
    void symmetrize();

    double hermitian_defect() const;
    double norm_inf() const;

    double trace_real() const;
    cplx det() const;
    double det_real() const { return det().real(); }

    /// Adjugate matrix (det * inverse for invertible input).
    HermitianMatrix adjugate() const;
    HermitianMatrix inverse() const;  // throws PositivityError if |det| == 0

    /// Eigenvalues in increasing order (selfadjoint; closed-form for n<=3).
    std::array<double, 3> eigenvalues() const;
    double min_eigenvalue() const { return eigenvalues()[0]; }
    double max_eigenvalue() const { return eigenvalues()[std::size_t(n_ - 1)]; }

    HermitianMatrix& operator+=(const HermitianMatrix& o);
    HermitianMatrix& operator-=(const HermitianMatrix& o);
    HermitianMatrix& operator*=(double s);
    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
    friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

  private:
    static void check_dim(int n) {
        if (n < 1 || n > 3) throw DimensionMismatch("HermitianMatrix: dimension must be 1..3");
    }
    int n_;
    std::array<cplx, 9> a_;  // row-major with fixed stride 3
};

/// Fully polarized determinant D(A_1,...,A_n): the coefficient of
/// t_1...t_n in det(t_1 A_1 + ... + t_n A_n), divided by n!.
/// Symmetric and multilinear; D(A,...,A) = det(A).
double mixed_discriminant(std::span<const HermitianMatrix> mats);

/// n! * mixed_discriminant: the density of alpha_1 ^ ... ^ alpha_n in the
/// repository volume convention (Lebesgue mass 1 on the unit torus).
double wedge_top_density(std::span<const HermitianMatrix> mats);

/// Convenience overloads for mixed powers: j copies of `a`, n-j of `b`.
double wedge_top_density_pow(const HermitianMatrix& a, int j, const HermitianMatrix& b);

/// Roots of det(a - mu*m) = 0 in increasing order, for Hermitian a and
/// positive definite m (the spectrum of m^{-1/2} a m^{-1/2}); closed-form
/// for n <= 3 via mixed-discriminant coefficients.
std::array<double, 3> generalized_eigenvalues(const HermitianMatrix& a, const HermitianMatrix& m);

/// trace(b^{-1} a); requires b positive definite (min eigenvalue > tol).
double relative_trace(const HermitianMatrix& a, const HermitianMatrix& b, double tol = 1e-12);

struct PopoviciPointResult {
    double lhs;
    double rhs;
};

/// Pointwise Popovici inequality between density ratios:
///   [t1^t3^{n-1}/t1^n] * [t2^t1^{n-1}/t1^n]  >=  (1/n) [t2^t3^{n-1}/t1^n].
/// All three inputs must be positive definite.
PopoviciPointResult popovici_pointwise(const HermitianMatrix& t1, const HermitianMatrix& t2,
                                       const HermitianMatrix& t3);

struct PositivityResult {
    bool flag;
    double worst_eigenvalue;
};

/// flag is true iff the smallest eigenvalue is >= -tol.
PositivityResult is_positive_11(const HermitianMatrix& a, double tol);

/// Default positivity tolerance used throughout: 1e-10 * (1 + ||a||_inf).
double default_positivity_tol(const HermitianMatrix& a);

}  // namespace pluripot
