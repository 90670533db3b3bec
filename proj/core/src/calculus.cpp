#include "pluripot/calculus.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace pluripot {

namespace {

void check_form_budget(const GridSpec& g, int p, int q) {
    std::int64_t bytes =
        std::int64_t(multi_index::binomial(g.n, p)) * multi_index::binomial(g.n, q) *
        g.num_points() * 16;
    if (bytes > 3'000'000'000LL)
        throw std::invalid_argument("FormField allocation would exceed memory budget");
}

void split_parts(const std::vector<cplx>& c, ScalarField& re, ScalarField& im) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        re[std::int64_t(i)] = c[i].real();
        im[std::int64_t(i)] = c[i].imag();
    }
}

}  // namespace

HermitianForm11Field ddc(const ScalarField& u) { return SpectralEngine::get(u.grid).ddc(u); }

HermitianForm11Field omega_plus_ddc(const HermitianForm11Field& omega, const ScalarField& u) {
    HermitianForm11Field w = SpectralEngine::get(u.grid).ddc(u);
    w.axpy(1.0, omega);
    return w;
}

namespace {

// shared first-derivative pass: bar=false gives del, bar=true gives delbar.
FormField first_derivative(const FormField& f, bool bar) {
    const GridSpec& g = f.grid;
    const int n = g.n;
    const int pp = bar ? f.p : f.p + 1;
    const int qq = bar ? f.q + 1 : f.q;
    if (pp > n || qq > n) throw DimensionMismatch("exterior derivative: top-degree input");
    check_form_budget(g, pp, qq);
    FormField out(g, pp, qq);
    auto& eng = SpectralEngine::get(g);
    const int nqf = multi_index::binomial(n, f.q);
    const int nqo = multi_index::binomial(n, qq);
    ScalarField re(g), im(g), da(g), db(g), dc(g), dd(g);
    for (int c = 0; c < f.num_comps(); ++c) {
        int rI = c / nqf, rJ = c % nqf;
        int I = multi_index::unrank(n, f.p, rI);
        int J = multi_index::unrank(n, f.q, rJ);
        split_parts(f.comp[std::size_t(c)], re, im);
        for (int j = 0; j < n; ++j) {
            int merged = bar ? (J | (1 << j)) : (I | (1 << j));
            int fixed = bar ? J : I;
            if (fixed & (1 << j)) continue;
            int sign = multi_index::merge_sign(1 << j, fixed);
            if (bar && f.p % 2 == 1) sign = -sign;  // dzbar_j passes p dz factors
            // d/dz_j re = da + i db, d/dz_j im = dc + i dd;
            // d/dzbar_j of a real field is the conjugate.
            eng.forward(re);
            eng.dz_component(j, false, da);
            eng.dz_component(j, true, db);
            eng.forward(im);
            eng.dz_component(j, false, dc);
            eng.dz_component(j, true, dd);
            int oc = bar ? (rI * nqo + multi_index::rank(n, merged))
                         : (multi_index::rank(n, merged) * nqo + rJ);
            auto& dst = out.comp[std::size_t(oc)];
            if (!bar) {
                // d/dz_j c = (da + i db) + i (dc + i dd)
                for (std::size_t i = 0; i < dst.size(); ++i)
                    dst[i] += double(sign) * cplx{da[std::int64_t(i)] - dd[std::int64_t(i)],
                                                  db[std::int64_t(i)] + dc[std::int64_t(i)]};
            } else {
                // d/dzbar_j c = (da - i db) + i (dc - i dd)
                for (std::size_t i = 0; i < dst.size(); ++i)
                    dst[i] += double(sign) * cplx{da[std::int64_t(i)] + dd[std::int64_t(i)],
                                                  dc[std::int64_t(i)] - db[std::int64_t(i)]};
            }
        }
    }
    return out;
}

}  // namespace

FormField del(const FormField& f) { return first_derivative(f, false); }
FormField delbar(const FormField& f) { return first_derivative(f, true); }

FormField ddc_form(const FormField& f) {
    const GridSpec& g = f.grid;
    const int n = g.n;
    if (f.p + 1 > n || f.q + 1 > n) throw DimensionMismatch("ddc_form: top-degree input");
    check_form_budget(g, f.p + 1, f.q + 1);
    FormField out(g, f.p + 1, f.q + 1);
    auto& eng = SpectralEngine::get(g);
    const int nqf = multi_index::binomial(n, f.q);
    const int nqo = multi_index::binomial(n, f.q + 1);
    ScalarField re(g), im(g), ha(g), hb(g);
    // (del delbar f)_{I+j, J+k} += (-1)^p sJ(k) sI(j) d^2 c_{I,J} / dz_j dzbar_k
    for (int c = 0; c < f.num_comps(); ++c) {
        int rI = c / nqf, rJ = c % nqf;
        int I = multi_index::unrank(n, f.p, rI);
        int J = multi_index::unrank(n, f.q, rJ);
        split_parts(f.comp[std::size_t(c)], re, im);
        for (int part = 0; part < 2; ++part) {
            eng.forward(part == 0 ? re : im);
            for (int j = 0; j < n; ++j) {
                if (I & (1 << j)) continue;
                int sj = multi_index::merge_sign(1 << j, I);
                for (int k = 0; k < n; ++k) {
                    if (J & (1 << k)) continue;
                    int sk = multi_index::merge_sign(1 << k, J);
                    int sign = sj * sk * (f.p % 2 == 1 ? -1 : 1);
                    eng.hessian_component(j, k, false, ha);
                    eng.hessian_component(j, k, true, hb);
                    int oc = multi_index::rank(n, I | (1 << j)) * nqo +
                             multi_index::rank(n, J | (1 << k));
                    auto& dst = out.comp[std::size_t(oc)];
                    // H applied to re gives ha + i hb; to im gives i*(ha + i hb);
                    // finally dd^c = 2i del delbar.
                    cplx pref = 2.0 * cplx{0.0, 1.0} * double(sign);
                    if (part == 1) pref *= cplx{0.0, 1.0};
                    for (std::size_t i = 0; i < dst.size(); ++i)
                        dst[i] += pref * cplx{ha[std::int64_t(i)], hb[std::int64_t(i)]};
                }
            }
        }
    }
    return out;
}

FormField wedge(const FormField& a, const FormField& b) {
    const GridSpec& g = a.grid;
    if (!(b.grid == g)) throw GridMismatch("wedge: grid mismatch");
    const int n = g.n;
    const int p = a.p + b.p, q = a.q + b.q;
    if (p > n || q > n) throw DimensionMismatch("wedge: degree exceeds n");
    check_form_budget(g, p, q);
    // precomputed structure table: (out, a comp, b comp, sign)
    struct Term {
        int oc, ac, bc;
        double s;
    };
    std::vector<Term> terms;
    const int nqa = multi_index::binomial(n, a.q);
    const int nqb = multi_index::binomial(n, b.q);
    const int nqo = multi_index::binomial(n, q);
    for (int ca = 0; ca < a.num_comps(); ++ca) {
        int Ia = multi_index::unrank(n, a.p, ca / nqa);
        int Ja = multi_index::unrank(n, a.q, ca % nqa);
        for (int cb = 0; cb < b.num_comps(); ++cb) {
            int Ib = multi_index::unrank(n, b.p, cb / nqb);
            int Jb = multi_index::unrank(n, b.q, cb % nqb);
            int sI = multi_index::merge_sign(Ia, Ib);
            int sJ = multi_index::merge_sign(Ja, Jb);
            if (sI == 0 || sJ == 0) continue;
            int s = sI * sJ * (((b.p * a.q) % 2 == 0) ? 1 : -1);
            int oc = multi_index::rank(n, Ia | Ib) * nqo + multi_index::rank(n, Ja | Jb);
            terms.push_back({oc, ca, cb, double(s)});
        }
    }
    FormField out(g, p, q);
    const std::size_t np = std::size_t(g.num_points());
    for (const Term& t : terms) {
        const auto& av = a.comp[std::size_t(t.ac)];
        const auto& bv = b.comp[std::size_t(t.bc)];
        auto& ov = out.comp[std::size_t(t.oc)];
        for (std::size_t i = 0; i < np; ++i) ov[i] += t.s * av[i] * bv[i];
    }
    return out;
}

ScalarField top_density_field(const FormField& f, double* imag_defect) {
    const int n = f.grid.n;
    if (f.p != n || f.q != n) throw DimensionMismatch("top_density_field: not a top form");
    // normalize by the same reference coefficient top_density uses pointwise
    PointForm probe(n, n, n);
    probe.flat(0) = cplx{1.0, 0.0};
    cplx ref = cplx{1.0, 0.0} / top_density_complex(probe);
    ScalarField out(f.grid);
    double defect = 0.0;
    const auto& c = f.comp[0];
    for (std::size_t i = 0; i < c.size(); ++i) {
        cplx d = c[i] / ref;
        out[std::int64_t(i)] = d.real();
        defect = std::max(defect, std::abs(d.imag()));
    }
    if (imag_defect) *imag_defect = defect;
    return out;
}

ScalarField det_density(const HermitianForm11Field& w) {
    const GridSpec& g = w.grid();
    const int n = g.n;
    double fact = (n == 3) ? 6.0 : (n == 2 ? 2.0 : 1.0);
    ScalarField out(g);
    const std::int64_t np = g.num_points();
    for (std::int64_t i = 0; i < np; ++i) out[i] = fact * w.at(i).det_real();
    return out;
}

ScalarField checked_density(const HermitianForm11Field& w, double cone_tol) {
    const GridSpec& g = w.grid();
    const int n = g.n;
    double fact = (n == 3) ? 6.0 : (n == 2 ? 2.0 : 1.0);
    ScalarField out(g);
    const std::int64_t np = g.num_points();
    double worst = std::numeric_limits<double>::infinity();
    std::int64_t worst_pt = 0;
    for (std::int64_t i = 0; i < np; ++i) {
        HermitianMatrix m = w.at(i);
        double ev = m.min_eigenvalue();
        if (ev < worst) {
            worst = ev;
            worst_pt = i;
            double tol = cone_tol >= 0.0 ? cone_tol : default_positivity_tol(m);
            if (ev < -tol)
                throw ConeError("density: field leaves the psd cone", ev, i);
        }
        out[i] = fact * m.det_real();
    }
    (void)worst_pt;
    return out;
}

ScalarField ma_density(const HermitianForm11Field& omega, const ScalarField& u, double cone_tol) {
    return checked_density(omega_plus_ddc(omega, u), cone_tol);
}

ScalarField mixed_ma_density(std::span<const HermitianForm11Field* const> slots) {
    if (slots.empty()) throw DimensionMismatch("mixed_ma_density: empty slot list");
    const GridSpec& g = slots[0]->grid();
    const int n = g.n;
    if (int(slots.size()) != n) throw DimensionMismatch("mixed_ma_density: need n slots");
    for (const auto* s : slots)
        if (!(s->grid() == g)) throw GridMismatch("mixed_ma_density: grid mismatch");
    ScalarField out(g);
    const std::int64_t np = g.num_points();
    std::vector<HermitianMatrix> mats{std::size_t(n), HermitianMatrix(n)};
    for (std::int64_t i = 0; i < np; ++i) {
        for (int k = 0; k < n; ++k) mats[std::size_t(k)] = slots[std::size_t(k)]->at(i);
        out[i] = wedge_top_density(mats);
    }
    return out;
}

double stokes_defect(const HermitianForm11Field& omega, const ScalarField& u) {
    double with_u = integrate(ma_density(omega, u, std::numeric_limits<double>::infinity()));
    double base = integrate(checked_density(omega, std::numeric_limits<double>::infinity()));
    return std::abs(with_u - base);
}

namespace {

int single_bit_index(int mask) { return std::countr_zero(unsigned(mask)); }

/// Real/imag parts of the form coefficient c_{a,b} = i * M_{ab} of a (1,1)
/// field, read straight out of the component storage.
void form_comp_parts(const HermitianForm11Field& w, int a, int b, ScalarField& re, ScalarField& im) {
    const int n = w.dim();
    const std::int64_t np = w.grid().num_points();
    if (w.is_uniform()) {
        cplx c = cplx{0.0, 1.0} * w.uniform_value()(a, b);
        for (std::int64_t i = 0; i < np; ++i) {
            re[i] = c.real();
            im[i] = c.imag();
        }
        return;
    }
    if (a == b) {
        auto d = w.component(HermitianForm11Field::diag_component(n, a));
        for (std::int64_t i = 0; i < np; ++i) {
            re[i] = 0.0;
            im[i] = d[std::size_t(i)];
        }
    } else {
        int lo = std::min(a, b), hi = std::max(a, b);
        auto r = w.component(HermitianForm11Field::offdiag_component(n, lo, hi, false));
        auto s = w.component(HermitianForm11Field::offdiag_component(n, lo, hi, true));
        double sgn = (a < b) ? 1.0 : -1.0;  // M_{ab} = conj(M_{ba})
        for (std::int64_t i = 0; i < np; ++i) {
            re[i] = -sgn * s[std::size_t(i)];
            im[i] = r[std::size_t(i)];
        }
    }
}

/// dst(j,k) entry of a Hermitian field += f * (vr + i vi); contributions at
/// (j,k) with j > k are folded into (k,j) by conjugation.
void add_into_entry(HermitianForm11Field& dst, int j, int k, cplx f, const ScalarField& vr,
                    const ScalarField& vi) {
    const int n = dst.dim();
    const std::int64_t np = dst.grid().num_points();
    if (j == k) {
        auto d = dst.component(HermitianForm11Field::diag_component(n, j));
        for (std::int64_t i = 0; i < np; ++i)
            d[std::size_t(i)] += (f * cplx{vr[i], vi[i]}).real();
        return;
    }
    cplx g = f;
    int lo = j, hi = k;
    if (j > k) {
        lo = k;
        hi = j;
        g = std::conj(f);
    }
    auto r = dst.component(HermitianForm11Field::offdiag_component(n, lo, hi, false));
    auto s = dst.component(HermitianForm11Field::offdiag_component(n, lo, hi, true));
    if (j > k) {
        for (std::int64_t i = 0; i < np; ++i) {
            cplx v = g * cplx{vr[i], -vi[i]};
            r[std::size_t(i)] += v.real();
            s[std::size_t(i)] += v.imag();
        }
    } else {
        for (std::int64_t i = 0; i < np; ++i) {
            cplx v = g * cplx{vr[i], vi[i]};
            r[std::size_t(i)] += v.real();
            s[std::size_t(i)] += v.imag();
        }
    }
}

struct PairingSlot {
    int k, j;  // density(Theta ^ i dz_k ^ dzbar_j) target
    cplx factor;
};

/// For each (2,2) component index oc: the unique (k, j) with
/// density(basis_oc ^ i dz_k ^ dzbar_j) != 0, and that factor. The pairing
/// quadratic form gamma^H A gamma then has A(j,k) += factor * Theta_oc.
std::array<PairingSlot, 9> pairing_table_22() {
    std::array<PairingSlot, 9> table{};
    for (int oc = 0; oc < 9; ++oc) {
        PointForm theta0(3, 2, 2);
        theta0.flat(oc) = cplx{1.0, 0.0};
        bool found = false;
        for (int k = 0; k < 3 && !found; ++k)
            for (int j = 0; j < 3 && !found; ++j) {
                PointForm e(3, 1, 1);
                e.coeff(k, j) = cplx{0.0, 1.0};
                cplx v = top_density_complex(wedge(theta0, e));
                if (std::abs(v) > 1e-14) {
                    table[std::size_t(oc)] = {k, j, v};
                    found = true;
                }
            }
        if (!found) throw std::logic_error("pairing_table_22: no slot found");
    }
    return table;
}

}  // namespace

HermitianForm11Field ddc_pairing_field(const HermitianForm11Field& omega) {
    const GridSpec& g = omega.grid();
    if (g.n != 3) throw DimensionMismatch("ddc_pairing_field: n must be 3");
    auto& eng = SpectralEngine::get(g);
    auto table = pairing_table_22();
    HermitianForm11Field out(g, true);
    ScalarField re(g), im(g), ha(g), hb(g);
    // dd^c omega = 2i del delbar omega; source comps c_{a,b} = i M_{ab}
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            form_comp_parts(omega, a, b, re, im);
            for (int part = 0; part < 2; ++part) {
                eng.forward(part == 0 ? re : im);
                for (int j = 0; j < 3; ++j) {
                    if (j == a) continue;
                    int sj = multi_index::merge_sign(1 << j, 1 << a);
                    for (int k = 0; k < 3; ++k) {
                        if (k == b) continue;
                        int sk = multi_index::merge_sign(1 << k, 1 << b);
                        eng.hessian_component(j, k, false, ha);
                        eng.hessian_component(j, k, true, hb);
                        int oc = multi_index::rank(3, (1 << a) | (1 << j)) * 3 +
                                 multi_index::rank(3, (1 << b) | (1 << k));
                        // p = 1 for omega, so the del-delbar sign is -sj*sk
                        cplx pref = 2.0 * cplx{0.0, 1.0} * double(-sj * sk);
                        if (part == 1) pref *= cplx{0.0, 1.0};
                        const PairingSlot& slot = table[std::size_t(oc)];
                        add_into_entry(out, slot.j, slot.k, slot.factor * pref, ha, hb);
                    }
                }
            }
        }
    return out;
}

HermitianForm11Field square_pairing_field(const HermitianForm11Field& omega) {
    const GridSpec& g = omega.grid();
    if (g.n != 3) throw DimensionMismatch("square_pairing_field: n must be 3");
    HermitianForm11Field out(g, true);
    const std::int64_t np = g.num_points();
    for (std::int64_t i = 0; i < np; ++i) {
        HermitianMatrix m = omega.at(i).adjugate();
        m *= 2.0;
        out.set(i, m);
    }
    return out;
}

namespace {

/// One component of del(omega) for a real (1,1) field: (del omega)_{I,J}
/// with |I| = 2, |J| = 1, as a complex array.
void del_omega_comp(SpectralEngine& eng, const HermitianForm11Field& w, int Imask, int Jmask,
                    std::vector<cplx>& out) {
    const GridSpec& g = w.grid();
    const std::int64_t np = g.num_points();
    out.assign(std::size_t(np), cplx{0.0, 0.0});
    ScalarField re(g), im(g), da(g), db(g), dc(g), dd(g);
    int b = single_bit_index(Jmask);
    for (int j = 0; j < 3; ++j) {
        if (!(Imask & (1 << j))) continue;
        int a = single_bit_index(Imask & ~(1 << j));
        int sign = multi_index::merge_sign(1 << j, 1 << a);
        form_comp_parts(w, a, b, re, im);
        eng.forward(re);
        eng.dz_component(j, false, da);
        eng.dz_component(j, true, db);
        eng.forward(im);
        eng.dz_component(j, false, dc);
        eng.dz_component(j, true, dd);
        for (std::int64_t i = 0; i < np; ++i)
            out[std::size_t(i)] += double(sign) * cplx{da[i] - dd[i], db[i] + dc[i]};
    }
}

}  // namespace

ScalarField d_dc_wedge_density(const HermitianForm11Field& omega) {
    const GridSpec& g = omega.grid();
    if (g.n != 3) throw DimensionMismatch("d_dc_wedge_density: n must be 3");
    auto& eng = SpectralEngine::get(g);
    const std::int64_t np = g.num_points();
    ScalarField q(g);
    // d omega ^ d^c omega = 2i del(omega) ^ delbar(omega), and
    // (delbar omega)_{A,B} = conj((del omega)_{B,A}) for real omega.
    // Each (2,1) component (I,J) of del(omega) pairs with the unique (1,2)
    // complement (I^c, J^c).
    std::array<bool, 9> done{};
    std::vector<cplx> x1, x2;
    for (int c1 = 0; c1 < 9; ++c1) {
        if (done[std::size_t(c1)]) continue;
        int I1 = multi_index::unrank(3, 2, c1 / 3);
        int J1 = multi_index::unrank(3, 1, c1 % 3);
        int I2 = 7 & ~I1, J2 = 7 & ~J1;  // the (1,2) partner indices
        // that partner equals conj of the (2,1) component (J2, I2)
        int c2 = multi_index::rank(3, J2) * 3 + multi_index::rank(3, I2);
        PointForm ex(3, 2, 1), ey(3, 1, 2);
        ex.flat(c1) = cplx{1.0, 0.0};
        ey.coeff(multi_index::rank(3, I2), multi_index::rank(3, J2)) = cplx{1.0, 0.0};
        cplx w1 = 2.0 * cplx{0.0, 1.0} * top_density_complex(wedge(ex, ey));
        del_omega_comp(eng, omega, I1, J1, x1);
        if (c2 == c1) {
            for (std::int64_t i = 0; i < np; ++i)
                q[i] += (w1 * x1[std::size_t(i)] * std::conj(x1[std::size_t(i)])).real();
            done[std::size_t(c1)] = true;
            continue;
        }
        int I2f = multi_index::unrank(3, 2, c2 / 3);
        int J2f = multi_index::unrank(3, 1, c2 % 3);
        PointForm ex2(3, 2, 1), ey2(3, 1, 2);
        ex2.flat(c2) = cplx{1.0, 0.0};
        ey2.coeff(multi_index::rank(3, 7 & ~I2f), multi_index::rank(3, 7 & ~J2f)) = cplx{1.0, 0.0};
        cplx w2 = 2.0 * cplx{0.0, 1.0} * top_density_complex(wedge(ex2, ey2));
        del_omega_comp(eng, omega, I2f, J2f, x2);
        for (std::int64_t i = 0; i < np; ++i) {
            cplx a = x1[std::size_t(i)], b = x2[std::size_t(i)];
            q[i] += (w1 * a * std::conj(b)).real() + (w2 * b * std::conj(a)).real();
        }
        done[std::size_t(c1)] = done[std::size_t(c2)] = true;
    }
    return q;
}

ScalarField ddc_top_density_from_pairing(const HermitianForm11Field& a, double* imag_defect) {
    const GridSpec& g = a.grid();
    if (g.n != 3) throw DimensionMismatch("ddc_top_density_from_pairing: n must be 3");
    auto& eng = SpectralEngine::get(g);
    auto table = pairing_table_22();
    const std::int64_t np = g.num_points();
    std::vector<cplx> top(std::size_t(np), cplx{0.0, 0.0});
    ScalarField re(g), im(g), ha(g), hb(g);
    for (int oc = 0; oc < 9; ++oc) {
        int Ip = multi_index::unrank(3, 2, oc / 3);
        int Jp = multi_index::unrank(3, 2, oc % 3);
        const PairingSlot& slot = table[std::size_t(oc)];
        // Theta_oc = A(slot.j, slot.k) / factor
        {
            cplx inv = 1.0 / slot.factor;
            const int jj = slot.j, kk = slot.k;
            if (jj == kk) {
                auto d = a.component(HermitianForm11Field::diag_component(3, jj));
                for (std::int64_t i = 0; i < np; ++i) {
                    cplx v = inv * d[std::size_t(i)];
                    re[i] = v.real();
                    im[i] = v.imag();
                }
            } else {
                int lo = std::min(jj, kk), hi = std::max(jj, kk);
                auto r = a.component(HermitianForm11Field::offdiag_component(3, lo, hi, false));
                auto s = a.component(HermitianForm11Field::offdiag_component(3, lo, hi, true));
                double sgn = (jj < kk) ? 1.0 : -1.0;
                for (std::int64_t i = 0; i < np; ++i) {
                    cplx v = inv * cplx{r[std::size_t(i)], sgn * s[std::size_t(i)]};
                    re[i] = v.real();
                    im[i] = v.imag();
                }
            }
        }
        int j = single_bit_index(7 & ~Ip);
        int k = single_bit_index(7 & ~Jp);
        int sign = multi_index::merge_sign(1 << j, Ip) * multi_index::merge_sign(1 << k, Jp);
        for (int part = 0; part < 2; ++part) {
            eng.forward(part == 0 ? re : im);
            eng.hessian_component(j, k, false, ha);
            eng.hessian_component(j, k, true, hb);
            cplx pref = 2.0 * cplx{0.0, 1.0} * double(sign);  // p = 2: no extra sign
            if (part == 1) pref *= cplx{0.0, 1.0};
            for (std::int64_t i = 0; i < np; ++i)
                top[std::size_t(i)] += pref * cplx{ha[i], hb[i]};
        }
    }
    PointForm probe(3, 3, 3);
    probe.flat(0) = cplx{1.0, 0.0};
    cplx per_unit = top_density_complex(probe);
    ScalarField out(g);
    double defect = 0.0;
    for (std::int64_t i = 0; i < np; ++i) {
        cplx d = top[std::size_t(i)] * per_unit;
        out[i] = d.real();
        defect = std::max(defect, std::abs(d.imag()));
    }
    if (imag_defect) *imag_defect = defect;
    return out;
}

}  // namespace pluripot
