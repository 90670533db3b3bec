#include "pluripot/field.hpp"

#include <algorithm>
#include <cmath>

namespace pluripot {

double ScalarField::sup() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}
double ScalarField::inf() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) m = std::min(m, x);
    return m;
}
double ScalarField::norm_inf() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
bool ScalarField::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    if (!(o.grid == grid)) throw GridMismatch("ScalarField: grid mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
    if (!(o.grid == grid)) throw GridMismatch("ScalarField: grid mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
}
ScalarField& ScalarField::operator+=(double c) {
    for (auto& x : v) x += c;
    return *this;
}
ScalarField& ScalarField::operator*=(double c) {
    for (auto& x : v) x *= c;
    return *this;
}

namespace {
constexpr std::int64_t kChunk = 1 << 16;
}

double integrate(const ScalarField& f) {
    const std::int64_t n = f.size();
    double total = 0.0;
    for (std::int64_t c0 = 0; c0 < n; c0 += kChunk) {
        double s = 0.0;
        std::int64_t c1 = std::min(n, c0 + kChunk);
        for (std::int64_t i = c0; i < c1; ++i) s += f[i];
        total += s;
    }
    return total / double(n);
}

double masked_integrate(const ScalarField& f, const std::vector<std::uint8_t>& mask) {
    const std::int64_t n = f.size();
    double total = 0.0;
    for (std::int64_t c0 = 0; c0 < n; c0 += kChunk) {
        double s = 0.0;
        std::int64_t c1 = std::min(n, c0 + kChunk);
        for (std::int64_t i = c0; i < c1; ++i)
            if (mask[std::size_t(i)]) s += f[i];
        total += s;
    }
    return total / double(n);
}

HermitianForm11Field::HermitianForm11Field(const GridSpec& g, bool allocate)
    : grid_(g), uniform_(!allocate), c0_(g.n) {
    if (allocate) {
        comp_.resize(std::size_t(num_components(g.n)));
        for (auto& c : comp_) c.assign(std::size_t(g.num_points()), 0.0);
        uniform_ = false;
    }
}

HermitianForm11Field HermitianForm11Field::uniform(const GridSpec& g, const HermitianMatrix& m) {
    HermitianForm11Field f(g, false);
    f.c0_ = m;
    return f;
}

int HermitianForm11Field::diag_component(int n, int j) {
    (void)n;
    return j;
}

int HermitianForm11Field::offdiag_component(int n, int j, int k, bool imag_part) {
    // lex order of pairs (0,1), (0,2), (1,2)
    int pair = (j == 0) ? (k - 1) : (n - 1 + k - 2);  // valid for n <= 3
    return n + 2 * pair + (imag_part ? 1 : 0);
}

HermitianMatrix HermitianForm11Field::at(std::int64_t idx) const {
    if (uniform_) return c0_;
    const int n = grid_.n;
    HermitianMatrix m(n);
    for (int j = 0; j < n; ++j) m(j, j) = comp_[std::size_t(diag_component(n, j))][std::size_t(idx)];
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            double re = comp_[std::size_t(offdiag_component(n, j, k, false))][std::size_t(idx)];
            double im = comp_[std::size_t(offdiag_component(n, j, k, true))][std::size_t(idx)];
            m(j, k) = cplx{re, im};
            m(k, j) = cplx{re, -im};
        }
    return m;
}

void HermitianForm11Field::set(std::int64_t idx, const HermitianMatrix& m) {
    if (uniform_) throw std::logic_error("HermitianForm11Field::set on uniform field");
    const int n = grid_.n;
    for (int j = 0; j < n; ++j)
        comp_[std::size_t(diag_component(n, j))][std::size_t(idx)] = m(j, j).real();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            comp_[std::size_t(offdiag_component(n, j, k, false))][std::size_t(idx)] = m(j, k).real();
            comp_[std::size_t(offdiag_component(n, j, k, true))][std::size_t(idx)] = m(j, k).imag();
        }
}

std::pair<double, std::int64_t> HermitianForm11Field::min_eigenvalue_scan() const {
    if (uniform_) return {c0_.min_eigenvalue(), 0};
    const std::int64_t n = grid_.num_points();
    double worst = std::numeric_limits<double>::infinity();
    std::int64_t arg = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        double ev = at(i).min_eigenvalue();
        if (ev < worst) {
            worst = ev;
            arg = i;
        }
    }
    return {worst, arg};
}

double HermitianForm11Field::max_norm() const {
    if (uniform_) return c0_.norm_inf();
    double m = 0.0;
    for (const auto& c : comp_)
        for (double x : c) m = std::max(m, std::abs(x));
    return m;
}

void HermitianForm11Field::densify() {
    if (!uniform_) return;
    const int n = grid_.n;
    comp_.resize(std::size_t(num_components(n)));
    const std::int64_t np = grid_.num_points();
    for (int j = 0; j < n; ++j)
        comp_[std::size_t(diag_component(n, j))].assign(std::size_t(np), c0_(j, j).real());
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            comp_[std::size_t(offdiag_component(n, j, k, false))].assign(std::size_t(np),
                                                                         c0_(j, k).real());
            comp_[std::size_t(offdiag_component(n, j, k, true))].assign(std::size_t(np),
                                                                        c0_(j, k).imag());
        }
    uniform_ = false;
}

void HermitianForm11Field::axpy(double s, const HermitianForm11Field& o) {
    if (!(o.grid_ == grid_)) throw GridMismatch("HermitianForm11Field: grid mismatch");
    if (uniform_ && o.uniform_) {
        c0_ += s * o.c0_;
        return;
    }
    densify();
    if (o.uniform_) {
        const int n = grid_.n;
        const std::int64_t np = grid_.num_points();
        for (std::int64_t i = 0; i < np; ++i) {
            (void)i;
        }
        // uniform other: add constants componentwise
        for (int j = 0; j < n; ++j) {
            double a = s * o.c0_(j, j).real();
            for (auto& x : comp_[std::size_t(diag_component(n, j))]) x += a;
        }
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                double ar = s * o.c0_(j, k).real(), ai = s * o.c0_(j, k).imag();
                for (auto& x : comp_[std::size_t(offdiag_component(n, j, k, false))]) x += ar;
                for (auto& x : comp_[std::size_t(offdiag_component(n, j, k, true))]) x += ai;
            }
        return;
    }
    for (std::size_t c = 0; c < comp_.size(); ++c) {
        const auto& oc = o.comp_[c];
        auto& mc = comp_[c];
        for (std::size_t i = 0; i < mc.size(); ++i) mc[i] += s * oc[i];
    }
}

FormField::FormField(const GridSpec& g, int p_, int q_) : grid(g), p(p_), q(q_) {
    int nc = multi_index::binomial(g.n, p) * multi_index::binomial(g.n, q);
    comp.resize(std::size_t(nc));
    for (auto& c : comp) c.assign(std::size_t(g.num_points()), cplx{0.0, 0.0});
}

PointForm FormField::at(std::int64_t idx) const {
    PointForm f(grid.n, p, q);
    for (int c = 0; c < num_comps(); ++c) f.flat(c) = comp[std::size_t(c)][std::size_t(idx)];
    return f;
}

double FormField::norm_inf() const {
    double m = 0.0;
    for (const auto& c : comp)
        for (const auto& z : c) m = std::max(m, std::abs(z));
    return m;
}

FormField FormField::from_hermitian_field(const HermitianForm11Field& h) {
    FormField f(h.grid(), 1, 1);
    const std::int64_t np = h.grid().num_points();
    for (std::int64_t i = 0; i < np; ++i) {
        PointForm pf = PointForm::from_hermitian(h.at(i));
        for (int c = 0; c < f.num_comps(); ++c) f.comp[std::size_t(c)][std::size_t(i)] = pf.flat(c);
    }
    return f;
}

}  // namespace pluripot
