#include "pluripot/hermitian.hpp"

#include <algorithm>
#include <cmath>

namespace pluripot {

void HermitianMatrix::symmetrize() {
    for (int j = 0; j < n_; ++j) {
        (*this)(j, j) = cplx{(*this)(j, j).real(), 0.0};
        for (int k = j + 1; k < n_; ++k) {
            cplx avg = 0.5 * ((*this)(j, k) + std::conj((*this)(k, j)));
            (*this)(j, k) = avg;
            (*this)(k, j) = std::conj(avg);
        }
    }
}

double HermitianMatrix::hermitian_defect() const {
    double d = 0.0;
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
            d = std::max(d, std::abs((*this)(j, k) - std::conj((*this)(k, j))));
    return d;
}

double HermitianMatrix::norm_inf() const {
    double m = 0.0;
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) m = std::max(m, std::abs((*this)(j, k)));
    return m;
}

double HermitianMatrix::trace_real() const {
    double t = 0.0;
    for (int j = 0; j < n_; ++j) t += (*this)(j, j).real();
    return t;
}

cplx HermitianMatrix::det() const {
    const HermitianMatrix& m = *this;
    switch (n_) {
        case 1: return m(0, 0);
        case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        default:
            return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                   m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                   m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
}

HermitianMatrix HermitianMatrix::adjugate() const {
    const HermitianMatrix& m = *this;
    HermitianMatrix r(n_);
    switch (n_) {
        case 1:
            r(0, 0) = 1.0;
            break;
        case 2:
            r(0, 0) = m(1, 1);
            r(1, 1) = m(0, 0);
            r(0, 1) = -m(0, 1);
            r(1, 0) = -m(1, 0);
            break;
        default:
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    int j1 = (k + 1) % 3, j2 = (k + 2) % 3;  // adj = transpose of cofactor
                    int k1 = (j + 1) % 3, k2 = (j + 2) % 3;
                    r(j, k) = m(j1, k1) * m(j2, k2) - m(j1, k2) * m(j2, k1);
                }
            break;
    }
    return r;
}

HermitianMatrix HermitianMatrix::inverse() const {
    cplx d = det();
    if (std::abs(d) == 0.0) throw PositivityError("HermitianMatrix::inverse: singular matrix");
    HermitianMatrix r = adjugate();
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) r(j, k) /= d;
    return r;
}

std::array<double, 3> HermitianMatrix::eigenvalues() const {
    const HermitianMatrix& m = *this;
    std::array<double, 3> ev{0.0, 0.0, 0.0};
    if (n_ == 1) {
        ev[0] = m(0, 0).real();
        return ev;
    }
    if (n_ == 2) {
        double tr = m(0, 0).real() + m(1, 1).real();
        double dt = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
        double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - dt));
        ev[0] = 0.5 * tr - disc;
        ev[1] = 0.5 * tr + disc;
        return ev;
    }
    // 3x3 selfadjoint: trigonometric solution of the characteristic cubic.
    double q = trace_real() / 3.0;
    double a00 = m(0, 0).real() - q, a11 = m(1, 1).real() - q, a22 = m(2, 2).real() - q;
    double p2 = a00 * a00 + a11 * a11 + a22 * a22 +
                2.0 * (std::norm(m(0, 1)) + std::norm(m(0, 2)) + std::norm(m(1, 2)));
    double p = std::sqrt(p2 / 6.0);
    if (p < 1e-300) {
        ev.fill(q);
        return ev;
    }
    // det of (A - q I) / p
    HermitianMatrix b(3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) b(j, k) = m(j, k);
    for (int j = 0; j < 3; ++j) b(j, j) -= q;
    double r = b.det().real() / (2.0 * p * p * p);
    r = std::clamp(r, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e0 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e2 = q + 2.0 * p * std::cos(phi);
    double e1 = 3.0 * q - e0 - e2;
    ev[0] = e0;
    ev[1] = e1;
    ev[2] = e2;
    return ev;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
    if (o.n_ != n_) throw DimensionMismatch("HermitianMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}
HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
    if (o.n_ != n_) throw DimensionMismatch("HermitianMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}
HermitianMatrix& HermitianMatrix::operator*=(double s) {
    for (auto& v : a_) v *= s;
    return *this;
}

namespace {

// det of a matrix assembled column-wise: column k taken from mats[pick[k]].
cplx column_det(std::span<const HermitianMatrix> mats, const int* pick, int n) {
    HermitianMatrix m(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) m(j, k) = mats[std::size_t(pick[k])](j, k);
    return m.det();
}

}  // namespace

double mixed_discriminant(std::span<const HermitianMatrix> mats) {
    const int n = mats.empty() ? 0 : mats[0].dim();
    if (int(mats.size()) != n)
        throw DimensionMismatch("mixed_discriminant: need exactly n matrices of dimension n");
    for (const auto& m : mats)
        if (m.dim() != n) throw DimensionMismatch("mixed_discriminant: dimension mismatch");

    // Average of column-permuted determinants over S_n.
    static constexpr int perms2[2][2] = {{0, 1}, {1, 0}};
    static constexpr int perms3[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                         {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    cplx acc{0.0, 0.0};
    switch (n) {
        case 1: return mats[0](0, 0).real();
        case 2:
            for (auto& p : perms2) acc += column_det(mats, p, 2);
            return acc.real() / 2.0;
        default:
            for (auto& p : perms3) acc += column_det(mats, p, 3);
            return acc.real() / 6.0;
    }
}

double wedge_top_density(std::span<const HermitianMatrix> mats) {
    const int n = mats.empty() ? 0 : mats[0].dim();
    double fact = (n == 3) ? 6.0 : (n == 2 ? 2.0 : 1.0);
    return fact * mixed_discriminant(mats);
}

double wedge_top_density_pow(const HermitianMatrix& a, int j, const HermitianMatrix& b) {
    const int n = a.dim();
    if (b.dim() != n || j < 0 || j > n)
        throw DimensionMismatch("wedge_top_density_pow: bad arguments");
    std::vector<HermitianMatrix> mats;
    mats.reserve(std::size_t(n));
    for (int i = 0; i < j; ++i) mats.push_back(a);
    for (int i = j; i < n; ++i) mats.push_back(b);
    return wedge_top_density(mats);
}

std::array<double, 3> generalized_eigenvalues(const HermitianMatrix& a, const HermitianMatrix& m) {
    const int n = a.dim();
    if (m.dim() != n) throw DimensionMismatch("generalized_eigenvalues: dimension mismatch");
    double dm = m.det_real();
    if (m.min_eigenvalue() <= 0.0 || dm <= 0.0)
        throw PositivityError("generalized_eigenvalues: second argument not positive definite");
    std::array<double, 3> ev{0.0, 0.0, 0.0};
    if (n == 1) {
        ev[0] = a(0, 0).real() / m(0, 0).real();
        return ev;
    }
    if (n == 2) {
        // det(a - mu m) = det(m) mu^2 - 2 D(a,m) mu + det(a)
        HermitianMatrix mats[2] = {a, m};
        double dam = mixed_discriminant(std::span<const HermitianMatrix>(mats, 2));
        double da = a.det_real();
        double disc = std::sqrt(std::max(0.0, dam * dam - dm * da));
        ev[0] = (dam - disc) / dm;
        ev[1] = (dam + disc) / dm;
        return ev;
    }
    // det(a - mu m) = -det(m) mu^3 + 3 D(a,m,m) mu^2 - 3 D(a,a,m) mu + det(a);
    // monic cubic mu^3 + c2 mu^2 + c1 mu + c0 with all-real roots.
    HermitianMatrix amm[3] = {a, m, m};
    HermitianMatrix aam[3] = {a, a, m};
    double c2 = -3.0 * mixed_discriminant(std::span<const HermitianMatrix>(amm, 3)) / dm;
    double c1 = 3.0 * mixed_discriminant(std::span<const HermitianMatrix>(aam, 3)) / dm;
    double c0 = -a.det_real() / dm;
    double q = c2 / 3.0;
    double p2 = (c2 * c2 - 3.0 * c1) / 9.0;  // depressed cubic: (mu+q)^3 - 3 p2 (mu+q) + ...
    double p = std::sqrt(std::max(0.0, p2));
    if (p < 1e-300) {
        ev.fill(-q);
        return ev;
    }
    double r = (-c0 + q * (c1 - 2.0 * q * q)) / (2.0 * p * p * p);
    r = std::clamp(r, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e2 = -q + 2.0 * p * std::cos(phi);
    double e0 = -q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e1 = -3.0 * q - e0 - e2;
    ev[0] = e0;
    ev[1] = e1;
    ev[2] = e2;
    std::sort(ev.begin(), ev.end());
    return ev;
}

double relative_trace(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
    if (a.dim() != b.dim()) throw DimensionMismatch("relative_trace: dimension mismatch");
    if (b.min_eigenvalue() <= tol)
        throw PositivityError("relative_trace: second argument not positive definite");
    HermitianMatrix binv = b.inverse();
    cplx t{0.0, 0.0};
    for (int j = 0; j < a.dim(); ++j)
        for (int k = 0; k < a.dim(); ++k) t += binv(j, k) * a(k, j);
    return t.real();
}

PopoviciPointResult popovici_pointwise(const HermitianMatrix& t1, const HermitianMatrix& t2,
                                       const HermitianMatrix& t3) {
    const int n = t1.dim();
    if (t2.dim() != n || t3.dim() != n) throw DimensionMismatch("popovici_pointwise: dims");
    for (const HermitianMatrix* m : {&t1, &t2, &t3})
        if (m->min_eigenvalue() <= default_positivity_tol(*m))
            throw PositivityError("popovici_pointwise: inputs must be positive definite");
    double t1n = wedge_top_density_pow(t1, n, t1);
    double a = wedge_top_density_pow(t1, 1, t3) / t1n;   // t1 ^ t3^{n-1} / t1^n
    double b = wedge_top_density_pow(t2, 1, t1) / t1n;   // t2 ^ t1^{n-1} / t1^n
    double c = wedge_top_density_pow(t2, 1, t3) / t1n;   // t2 ^ t3^{n-1} / t1^n
    return {a * b, c / double(n)};
}

PositivityResult is_positive_11(const HermitianMatrix& a, double tol) {
    double ev = a.min_eigenvalue();
    return {ev >= -tol, ev};
}

double default_positivity_tol(const HermitianMatrix& a) { return 1e-10 * (1.0 + a.norm_inf()); }

}  // namespace pluripot
