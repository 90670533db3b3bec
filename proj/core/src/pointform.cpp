#include "pluripot/pointform.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pluripot {

namespace multi_index {

int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    static constexpr int table[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    return table[n][k];
}

// Subsets of a fixed size are ordered by their bitmask value; for n <= 3
// this coincides with lexicographic order of the index tuples.
int rank(int n, int mask) {
    int p = std::popcount(unsigned(mask));
    int r = 0;
    for (int m = 0; m < mask; ++m)
        if (std::popcount(unsigned(m)) == p) ++r;
    (void)n;
    return r;
}

int unrank(int n, int p, int r) {
    int count = 0;
    for (int m = 0; m < (1 << n); ++m) {
        if (std::popcount(unsigned(m)) == p) {
            if (count == r) return m;
            ++count;
        }
    }
    throw std::out_of_range("multi_index::unrank");
}

int merge_sign(int maskA, int maskB) {
    if (maskA & maskB) return 0;
    // Count inversions: pairs (a in A, b in B) with a > b.
    int inv = 0;
    for (int a = 0; a < 8; ++a)
        if (maskA & (1 << a))
            inv += std::popcount(unsigned(maskB & ((1 << a) - 1)));
    return (inv % 2 == 0) ? 1 : -1;
}

}  // namespace multi_index

PointForm::PointForm(int n, int p, int q) : n_(n), p_(p), q_(q) {
    if (n < 1 || n > 3 || p < 0 || q < 0 || p > n || q > n)
        throw DimensionMismatch("PointForm: invalid (n, p, q)");
    np_ = multi_index::binomial(n, p);
    nq_ = multi_index::binomial(n, q);
    c_.assign(std::size_t(np_ * nq_), cplx{0.0, 0.0});
}

double PointForm::norm_inf() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

double PointForm::reality_defect() const {
    if (p_ != q_) return norm_inf();
    double d = 0.0;
    for (int rI = 0; rI < np_; ++rI)
        for (int rJ = 0; rJ < nq_; ++rJ)
            d = std::max(d, std::abs(coeff(rI, rJ) - std::conj(coeff(rJ, rI))));
    return d;
}

PointForm& PointForm::operator+=(const PointForm& o) {
    if (o.n_ != n_ || o.p_ != p_ || o.q_ != q_)
        throw DimensionMismatch("PointForm: bidegree mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

PointForm& PointForm::operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
}

PointForm PointForm::from_hermitian(const HermitianMatrix& a) {
    const int n = a.dim();
    PointForm f(n, 1, 1);
    const cplx iu{0.0, 1.0};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) f.coeff(j, k) = iu * a(j, k);
    return f;
}

PointForm wedge(const PointForm& a, const PointForm& b) {
    const int n = a.n();
    if (b.n() != n) throw DimensionMismatch("wedge: dimension mismatch");
    const int p = a.p() + b.p(), q = a.q() + b.q();
    if (p > n || q > n) throw DimensionMismatch("wedge: degree exceeds n");
    PointForm out(n, p, q);
    const int npa = multi_index::binomial(n, a.p()), nqa = multi_index::binomial(n, a.q());
    const int npb = multi_index::binomial(n, b.p()), nqb = multi_index::binomial(n, b.q());
    for (int rIa = 0; rIa < npa; ++rIa) {
        int Ia = multi_index::unrank(n, a.p(), rIa);
        for (int rJa = 0; rJa < nqa; ++rJa) {
            int Ja = multi_index::unrank(n, a.q(), rJa);
            cplx ca = a.coeff(rIa, rJa);
            if (ca == cplx{0.0, 0.0}) continue;
            for (int rIb = 0; rIb < npb; ++rIb) {
                int Ib = multi_index::unrank(n, b.p(), rIb);
                int sI = multi_index::merge_sign(Ia, Ib);
                if (sI == 0) continue;
                for (int rJb = 0; rJb < nqb; ++rJb) {
                    int Jb = multi_index::unrank(n, b.q(), rJb);
                    int sJ = multi_index::merge_sign(Ja, Jb);
                    if (sJ == 0) continue;
                    // move the b.p() dz factors of b past the a.q() dzbar
                    // factors of a
                    int s = ((b.p() * a.q()) % 2 == 0) ? 1 : -1;
                    s *= sI * sJ;
                    int rI = multi_index::rank(n, Ia | Ib);
                    int rJ = multi_index::rank(n, Ja | Jb);
                    out.coeff(rI, rJ) += double(s) * ca * b.coeff(rIb, rJb);
                }
            }
        }
    }
    return out;
}

namespace {

// Top coefficient of (i sum_j dz_j ^ dzbar_j)^n, used to normalize densities.
cplx top_reference(int n) {
    static cplx cache[4] = {cplx{0, 0}, cplx{0, 0}, cplx{0, 0}, cplx{0, 0}};
    if (cache[n] != cplx{0.0, 0.0}) return cache[n];
    PointForm f = PointForm::from_hermitian(HermitianMatrix::identity(n));
    PointForm acc = f;
    for (int k = 1; k < n; ++k) acc = wedge(acc, f);
    // acc is the n-th wedge power of the reference Kaehler form; its single
    // coefficient times n!/n! carries the i^n and reordering signs.
    cache[n] = acc.flat(0) / double(n == 3 ? 6 : (n == 2 ? 2 : 1));
    return cache[n];
}

}  // namespace

cplx top_density_complex(const PointForm& f) {
    const int n = f.n();
    if (f.p() != n || f.q() != n) throw DimensionMismatch("top_density: not a top form");
    double fact = (n == 3) ? 6.0 : (n == 2 ? 2.0 : 1.0);
    return fact * f.flat(0) / (fact * top_reference(n));
}

double top_density(const PointForm& f) { return top_density_complex(f).real(); }

HermitianMatrix PointForm::pairing_matrix() const {
    const int n = n_;
    if (p_ != n - 1 || q_ != n - 1)
        throw DimensionMismatch("pairing_matrix: expected an (n-1,n-1)-form");
    double factm1 = (n == 3) ? 2.0 : 1.0;  // (n-1)!
    HermitianMatrix s(n);
    const cplx iu{0.0, 1.0};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            PointForm e(n, 1, 1);
            e.coeff(k, j) = iu;  // i dz_k ^ dzbar_j
            s(j, k) = top_density_complex(wedge(*this, e)) / factm1;
        }
    return s;
}

PointForm rank_one_11(int n, const cplx* gamma) {
    HermitianMatrix g(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) g(j, k) = gamma[j] * std::conj(gamma[k]);
    return PointForm::from_hermitian(g);
}

namespace {

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

double inv_normal_cdf(double u) {
    // Acklam's rational approximation; adequate for direction sampling.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (u < plow) {
        q = std::sqrt(-2 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (u > phigh) {
        q = std::sqrt(-2 * std::log(1 - u));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = u - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace

std::vector<std::array<cplx, 3>> direction_sample(int n, int count, std::uint64_t seed) {
    std::vector<std::array<cplx, 3>> dirs;
    dirs.reserve(std::size_t(count));
    static constexpr int bases[6] = {2, 3, 5, 7, 11, 13};
    const int half = count / 2;
    for (int i = 0; i < count; ++i) {
        std::array<cplx, 3> g{};
        if (i < half) {
            // low-discrepancy half: Halton points mapped through the normal
            // quantile, then normalized
            for (int j = 0; j < n; ++j) {
                double re = inv_normal_cdf(halton(i + 1, bases[2 * j]) * 0.998 + 0.001);
                double im = inv_normal_cdf(halton(i + 1, bases[2 * j + 1]) * 0.998 + 0.001);
                g[std::size_t(j)] = cplx{re, im};
            }
        } else {
            std::mt19937_64 rng(seed + std::uint64_t(i));
            std::normal_distribution<double> nd(0.0, 1.0);
            for (int j = 0; j < n; ++j) {
                double re = nd(rng), im = nd(rng);
                g[std::size_t(j)] = cplx{re, im};
            }
        }
        double norm = 0.0;
        for (int j = 0; j < n; ++j) norm += std::norm(g[std::size_t(j)]);
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            g[0] = cplx{1.0, 0.0};
            norm = 1.0;
        }
        for (int j = 0; j < n; ++j) g[std::size_t(j)] /= norm;
        dirs.push_back(g);
    }
    return dirs;
}

WeakPositivityResult is_weakly_positive_22(const PointForm& theta, int directions, double tol,
                                           std::uint64_t seed) {
    if (theta.n() != 3 || theta.p() != 2 || theta.q() != 2)
        throw DimensionMismatch("is_weakly_positive_22: expected a (2,2)-form in n=3");
    auto dirs = direction_sample(3, directions, seed);
    double worst = std::numeric_limits<double>::infinity();
    int worst_dir = -1;
    for (int i = 0; i < int(dirs.size()); ++i) {
        PointForm g = rank_one_11(3, dirs[std::size_t(i)].data());
        double v = top_density(wedge(theta, g));
        if (v < worst) {
            worst = v;
            worst_dir = i;
        }
    }
    return {worst >= -tol, worst, worst_dir};
}

}  // namespace pluripot
