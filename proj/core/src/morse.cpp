#include "pluripot/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pluripot/calculus.hpp"

namespace pluripot {
namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t& state) {
    state = mix64(state);
    return double(state >> 11) * 0x1.0p-53;
}

HermitianMatrix random_constant_metric(int n, std::uint64_t seed) {
    std::uint64_t st = mix64(seed ^ 0x4d6f727365ULL);
    HermitianMatrix m(n);
    for (int j = 0; j < n; ++j) m(j, j) = 0.8 + 0.8 * uniform01(st);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            cplx o{0.25 * (uniform01(st) - 0.5), 0.25 * (uniform01(st) - 0.5)};
            m(j, k) = o;
            m(k, j) = std::conj(o);
        }
    double ev = m.min_eigenvalue();
    if (ev < 0.3)
        for (int j = 0; j < n; ++j) m(j, j) += (0.3 - ev);
    return m;
}

/// theta0 + t dd^c chi with t chosen so the result stays uniformly pd
/// (smallest pencil eigenvalue >= -0.7 after scaling).
HermitianForm11Field pluriclosed_member(const GridSpec& g, const HermitianMatrix& theta0,
                                        const ScalarField& chi) {
    HermitianForm11Field base = HermitianForm11Field::uniform(g, theta0);
    HermitianForm11Field h = SpectralEngine::get(g).ddc(chi);
    double mu = min_pencil_eigenvalue_scan(base, h);
    double t = (mu < -0.7) ? 0.7 / (-mu) : 1.0;
    base.axpy(t, h);
    return base;
}

/// Pairing matrix of alpha ^ beta (n=3): the polarization of 2 adj(A),
/// P(A,B) = (trA trB - tr(AB)) I - (trA B + trB A) + (AB + BA).
HermitianMatrix wedge_pairing_3(const HermitianMatrix& a, const HermitianMatrix& b) {
    const int n = 3;
    cplx ab[3][3];
    cplx ba[3][3];
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            cplx s1{0.0, 0.0}, s2{0.0, 0.0};
            for (int l = 0; l < n; ++l) {
                s1 += a(j, l) * b(l, k);
                s2 += b(j, l) * a(l, k);
            }
            ab[j][k] = s1;
            ba[j][k] = s2;
        }
    double tra = a.trace_real();
    double trb = b.trace_real();
    cplx trab{0.0, 0.0};
    for (int j = 0; j < n; ++j) trab += ab[j][j];
    HermitianMatrix p(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            cplx v = ab[j][k] + ba[j][k] - tra * b(j, k) - trb * a(j, k);
            if (j == k) v += tra * trb - trab;
            p(j, k) = v;
        }
    p.symmetrize();
    return p;
}

double mixed_power_integral(const HermitianForm11Field& a, int j, const HermitianForm11Field& b) {
    const GridSpec& g = a.grid();
    ScalarField dens(g);
    const std::int64_t np = g.num_points();
    for (std::int64_t i = 0; i < np; ++i)
        dens[i] = wedge_top_density_pow(a.at(i), j, b.at(i));
    return integrate(dens);
}

}  // namespace

std::pair<bool, double> is_gauduchon(const HermitianForm11Field& theta, double tol) {
    auto [ev, pt] = theta.min_eigenvalue_scan();
    if (ev <= 0.0)
        throw PositivityError("is_gauduchon: theta is not positive definite");
    const int n = theta.dim();
    double defect = 0.0;
    if (n == 1) {
        defect = 0.0;  // dd^c(theta^0) = 0
    } else if (theta.is_uniform()) {
        defect = 0.0;  // constant coefficients
    } else if (n == 2) {
        FormField f = FormField::from_hermitian_field(theta);
        defect = ddc_form(f).norm_inf();
    } else {
        HermitianForm11Field s = square_pairing_field(theta);
        double imag = 0.0;
        ScalarField dens = ddc_top_density_from_pairing(s, &imag);
        defect = std::max(dens.norm_inf(), imag);
    }
    return {defect <= tol, defect};
}

GauduchonFamily make_gauduchon_family(const GridSpec& g, int count, std::uint64_t seed,
                                      double amplitude) {
    if (count < 1) throw std::invalid_argument("make_gauduchon_family: count must be >= 1");
    GauduchonFamily fam;
    auto& eng = SpectralEngine::get(g);
    const int kmax = std::min(3, g.res / 8);

    if (g.n == 1) {
        fam.description = "positive conformal factors (Gauduchon is trivial at n=1)";
        for (int k = 0; k < count; ++k) {
            ScalarField f = eng.band_limited(kmax, mix64(seed + std::uint64_t(k)), amplitude);
            double lo = f.inf();
            if (lo < -0.7) f *= 0.7 / (-lo);
            HermitianForm11Field m(g, true);
            auto c = m.component(0);
            for (std::int64_t i = 0; i < g.num_points(); ++i) c[std::size_t(i)] = 1.0 + f[i];
            fam.members.push_back(std::move(m));
            fam.defects.push_back(0.0);
        }
        return fam;
    }

    if (g.n == 2) {
        fam.description = "theta_0 + dd^c chi, constant theta_0 (pluriclosed by construction)";
        for (int k = 0; k < count; ++k) {
            HermitianMatrix t0 = random_constant_metric(2, seed + std::uint64_t(k));
            ScalarField chi = eng.band_limited(kmax, mix64(seed * 31 + std::uint64_t(k)), amplitude);
            HermitianForm11Field m = pluriclosed_member(g, t0, chi);
            auto [ok, defect] = is_gauduchon(m, 1e-8);
            (void)ok;
            fam.members.push_back(std::move(m));
            fam.defects.push_back(defect);
        }
        return fam;
    }

    // n = 3: constant members plus one corrected-perturbation member. The
    // perturbed member T solves T^2 = Phi for the dd^c-closed positive
    // (2,2)-form Phi = (theta_0 + dd^c chi) ^ theta_0: with S the pairing
    // matrix of Phi, 2 adj(M_T) = S gives M_T = adj(S/2) / sqrt(det(S/2)).
    fam.description =
        "constant metrics plus one corrected-perturbation (square-root of a "
        "dd^c-closed positive (2,2)-form)";
    for (int k = 0; k + 1 < count; ++k) {
        HermitianMatrix t0 = random_constant_metric(3, seed + std::uint64_t(k));
        fam.members.push_back(HermitianForm11Field::uniform(g, t0));
        fam.defects.push_back(0.0);
    }
    {
        HermitianMatrix t0 = random_constant_metric(3, seed + std::uint64_t(count));
        ScalarField chi = eng.band_limited(kmax, mix64(seed * 131 + 9), amplitude);
        HermitianForm11Field m = pluriclosed_member(g, t0, chi);
        const std::int64_t np = g.num_points();
        for (std::int64_t i = 0; i < np; ++i) {
            HermitianMatrix s = wedge_pairing_3(m.at(i), t0);
            s *= 0.5;
            double d = s.det_real();
            if (d <= 0.0)
                throw BuildError("make_gauduchon_family: Phi left the positive cone");
            HermitianMatrix t = s.adjugate();
            t *= 1.0 / std::sqrt(d);
            m.set(i, t);
        }
        auto [ok, defect] = is_gauduchon(m, 1e-6);
        (void)ok;
        fam.members.push_back(std::move(m));
        fam.defects.push_back(defect);
    }
    return fam;
}

LamariScan lamari_pairing_scan(const Scenario& s, const GauduchonFamily& fam) {
    LamariScan scan;
    scan.delta_star = std::numeric_limits<double>::infinity();
    const int n = s.grid.n;
    for (int id = 0; id < int(fam.members.size()); ++id) {
        const HermitianForm11Field& theta = fam.members[std::size_t(id)];
        double num = mixed_power_integral(theta, n - 1, s.omega);
        double den = mixed_power_integral(theta, n - 1, s.omega_X);
        if (!(den > 0.0))
            throw BuildError("lamari_pairing_scan: omega_X pairing is not positive");
        double r = num / den;
        scan.ratios.push_back(r);
        if (r < scan.delta_star) {  // ties resolved to the lowest id
            scan.delta_star = r;
            scan.argmin = id;
        }
    }
    return scan;
}

PopoviciIntegrated popovici_integrated(const HermitianForm11Field& t1,
                                       const HermitianForm11Field& t2,
                                       const HermitianForm11Field& t3, bool constructed,
                                       double rel_tol) {
    const GridSpec& g = t1.grid();
    const int n = g.n;
    const std::int64_t np = g.num_points();
    ScalarField da(g), db(g), dc(g);
    for (std::int64_t i = 0; i < np; ++i) {
        HermitianMatrix a1 = t1.at(i);
        HermitianMatrix a2 = t2.at(i);
        HermitianMatrix a3 = t3.at(i);
        double d1n = wedge_top_density_pow(a1, n, a1);
        double d23 = wedge_top_density_pow(a3, n - 1, a2);
        if (!(d1n > 0.0) || !(d23 > 0.0))
            throw PositivityError("popovici_integrated: inputs must be positive definite");
        if (constructed) {
            double c = std::pow(d23 / d1n, 1.0 / double(n));
            a1 *= c;  // now a1^n = t2 ^ t3^{n-1} pointwise
            da[i] = wedge_top_density_pow(a3, n - 1, a1);
            db[i] = wedge_top_density_pow(a1, n - 1, a2);
            dc[i] = d23;
        } else {
            da[i] = wedge_top_density_pow(a3, n - 1, a1);
            db[i] = wedge_top_density_pow(a1, n - 1, a2);
            dc[i] = std::sqrt(d23 * d1n);
        }
    }
    PopoviciIntegrated out;
    out.constructed = constructed;
    out.lhs = integrate(da) * integrate(db);
    double m = integrate(dc);
    out.rhs = m * m / double(n);
    out.pass = out.lhs >= out.rhs - rel_tol * std::max(std::abs(out.rhs), 1e-300);
    return out;
}

MorseTable morse_mass_convergence(const Scenario& s, std::span<const double> eps_ladder,
                                  const FamilySpec& fam) {
    if (!s.omega_closed)
        throw BuildError("morse_mass_convergence: requires a closed scenario");
    const GridSpec& g = s.grid;
    const int n = g.n;

    // second closed form omega' = omega_X / 2 with its own psi samples
    HermitianForm11Field wp = HermitianForm11Field::uniform(g, HermitianMatrix(n));
    wp.axpy(0.5, s.omega_X);

    MorseTable table;
    table.mass0 = integrate(det_density(s.omega));
    table.mixed0 = mixed_power_integral(s.omega, n - 1, wp);

    for (double eps : eps_ladder) {
        HermitianForm11Field we = s.omega_eps(eps);
        HermitianForm11Field wpe = wp;
        wpe.axpy(eps, s.omega_X);
        MorseRow row;
        row.eps = eps;
        row.dev_top = row.dev_mixed = row.stokes_top = row.stokes_mixed = 0.0;
        double ref_top = integrate(det_density(we));
        double ref_mixed = mixed_power_integral(we, n - 1, wpe);
        for (int k = 0; k < fam.count; ++k) {
            std::uint64_t sk = fam.seed + 7919 * std::uint64_t(k);
            PshSample u = make_psh_sample_for(we, sk, fam.max_freq);
            PshSample psi = make_psh_sample_for(wpe, sk + 1000003, fam.max_freq);
            HermitianForm11Field wu = omega_plus_ddc(we, u.u);
            HermitianForm11Field wpsi = omega_plus_ddc(wpe, psi.u);
            double mass = integrate(det_density(wu));
            double mixed = mixed_power_integral(wu, n - 1, wpsi);
            row.dev_top = std::max(row.dev_top, std::abs(mass - table.mass0));
            row.dev_mixed = std::max(row.dev_mixed, std::abs(mixed - table.mixed0));
            row.stokes_top = std::max(row.stokes_top, std::abs(mass - ref_top));
            row.stokes_mixed = std::max(row.stokes_mixed, std::abs(mixed - ref_mixed));
        }
        table.rows.push_back(row);
    }

    double sxx = 0.0, sxt = 0.0, sxm = 0.0;
    for (const MorseRow& r : table.rows) {
        sxx += r.eps * r.eps;
        sxt += r.eps * r.dev_top;
        sxm += r.eps * r.dev_mixed;
    }
    if (sxx > 0.0) {
        table.fitted_c_top = sxt / sxx;
        table.fitted_c_mixed = sxm / sxx;
    }
    return table;
}

}  // namespace pluripot
