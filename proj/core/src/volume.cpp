#include "pluripot/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pluripot {

namespace {

/// Pointwise densities n! D((fac M + H)^j, M^{n-j}) for each requested j,
/// with hand-coded n = 1, 2 paths (the surveys are the hot loop of the
/// acceptance suite). Tracks the most negative eigenvalue of fac M + H.
void mixed_power_densities(const HermitianForm11Field& omega, const HermitianForm11Field* hess,
                           double fac, std::span<const int> js, std::vector<ScalarField>& out,
                           double* worst_eig) {
    const GridSpec& g = omega.grid();
    const std::int64_t np = g.num_points();
    const int n = g.n;
    out.clear();
    for (std::size_t t = 0; t < js.size(); ++t) out.emplace_back(g);
    double weig = std::numeric_limits<double>::infinity();
    const bool uni = omega.is_uniform();

    if (n == 1) {
        auto hv = hess ? hess->component(0) : std::span<const double>{};
        auto mv = uni ? std::span<const double>{} : omega.component(0);
        double c0 = uni ? omega.uniform_value()(0, 0).real() : 0.0;
        for (std::int64_t i = 0; i < np; ++i) {
            double a = uni ? c0 : mv[std::size_t(i)];
            double w = fac * a + (hess ? hv[std::size_t(i)] : 0.0);
            if (w < weig) weig = w;
            for (std::size_t t = 0; t < js.size(); ++t) out[t][i] = js[t] == 0 ? a : w;
        }
    } else if (n == 2) {
        std::span<const double> m00, m11, mr, mi;
        double c00 = 0, c11 = 0, cr = 0, ci = 0;
        if (uni) {
            const HermitianMatrix& m = omega.uniform_value();
            c00 = m(0, 0).real();
            c11 = m(1, 1).real();
            cr = m(0, 1).real();
            ci = m(0, 1).imag();
        } else {
            m00 = omega.component(0);
            m11 = omega.component(1);
            mr = omega.component(2);
            mi = omega.component(3);
        }
        std::span<const double> h00, h11, hr, hi;
        if (hess) {
            h00 = hess->component(0);
            h11 = hess->component(1);
            hr = hess->component(2);
            hi = hess->component(3);
        }
        for (std::int64_t i = 0; i < np; ++i) {
            const std::size_t si = std::size_t(i);
            double a00 = uni ? c00 : m00[si], a11 = uni ? c11 : m11[si];
            double ar = uni ? cr : mr[si], ai = uni ? ci : mi[si];
            double w00 = fac * a00, w11 = fac * a11, wr = fac * ar, wi = fac * ai;
            if (hess) {
                w00 += h00[si];
                w11 += h11[si];
                wr += hr[si];
                wi += hi[si];
            }
            double off2 = wr * wr + wi * wi;
            double tr = w00 + w11, d = w00 - w11;
            double ev = 0.5 * (tr - std::sqrt(d * d + 4.0 * off2));
            if (ev < weig) weig = ev;
            for (std::size_t t = 0; t < js.size(); ++t) {
                int j = js[t];
                if (j == 0)
                    out[t][i] = 2.0 * (a00 * a11 - ar * ar - ai * ai);
                else if (j == 1)
                    out[t][i] = w00 * a11 + w11 * a00 - 2.0 * (wr * ar + wi * ai);
                else
                    out[t][i] = 2.0 * (w00 * w11 - off2);
            }
        }
    } else {
        HermitianMatrix m0 = uni ? omega.uniform_value() : HermitianMatrix(n);
        for (std::int64_t i = 0; i < np; ++i) {
            const HermitianMatrix& m = uni ? m0 : (m0 = omega.at(i));
            HermitianMatrix w = m;
            w *= fac;
            if (hess) w += hess->at(i);
            double ev = w.min_eigenvalue();
            if (ev < weig) weig = ev;
            for (std::size_t t = 0; t < js.size(); ++t)
                out[t][i] = wedge_top_density_pow(w, js[t], m);
        }
    }
    if (worst_eig) *worst_eig = weig;
}

double omega_volume(const HermitianForm11Field& omega) {
    std::vector<ScalarField> d;
    int j0 = 0;
    mixed_power_densities(omega, nullptr, 1.0, std::span<const int>(&j0, 1), d, nullptr);
    return integrate(d[0]);
}

}  // namespace

ScalarField clip_to_band(const ScalarField& u, double big_m, double* perturbation) {
    const GridSpec& g = u.grid;
    const std::int64_t np = g.num_points();
    // resolve the crease {u = -M} over ~2 cells: s = 2 h sup|grad u| (FD estimate)
    double grad_sup = 0.0;
    std::int64_t stride = 1;
    for (int d = g.dims() - 1; d >= 0; --d) {
        const std::int64_t period = stride * g.res;
        for (std::int64_t i = 0; i < np; ++i) {
            std::int64_t base = i - (i % period) + (i % stride);
            std::int64_t pos = (i % period) / stride;
            std::int64_t nb = base + ((pos + 1) % g.res) * stride;
            grad_sup = std::max(grad_sup, std::abs(u[nb] - u[i]) * g.res);
        }
        stride = period;
    }
    double s = std::max(2.0 * g.spacing() * grad_sup, 1e-12);
    auto chi = [&](double x) { return 0.5 * (x - big_m + std::sqrt((x + big_m) * (x + big_m) + s * s)); };
    const double shift = chi(0.0);  // keep sup <= 0 after smoothing
    ScalarField out(g);
    double pert = 0.0;
    for (std::int64_t i = 0; i < np; ++i) {
        out[i] = chi(u[i]) - shift;
        pert = std::max(pert, std::abs(out[i] - std::max(u[i], -big_m)));
    }
    if (perturbation) *perturbation = pert;
    return out;
}

namespace {

MassReport survey_impl(const HermitianForm11Field& omega, const Scenario* origin,
                       const std::string& label, const FamilySpec& fam, std::span<const int> js) {
    const GridSpec& g = omega.grid();
    for (int j : js)
        if (j < 0 || j > g.n) throw std::invalid_argument("mass_survey: j out of range");
    MassReport rep;
    rep.scenario = label;
    rep.family = fam;
    rep.js.assign(js.begin(), js.end());
    rep.volume = omega_volume(omega);
    double weig_global = std::numeric_limits<double>::infinity();
    auto& eng = SpectralEngine::get(g);

    const bool fallback = origin && origin->name == "product_collapsing";
    const bool clip = fam.m_clip >= 0.0;
    std::vector<ScalarField> dens;
    auto add_sample = [&](const HermitianForm11Field* hess) {
        double weig = 0.0;
        mixed_power_densities(omega, hess, 1.0, js, dens, &weig);
        weig_global = std::min(weig_global, weig);
        std::vector<double> row;
        for (auto& d : dens) row.push_back(integrate(d));
        rep.masses.push_back(std::move(row));
    };

    if (fam.include_zero) add_sample(nullptr);
    for (int k = 0; k < fam.count; ++k) {
        std::uint64_t seed = fam.seed + std::uint64_t(k) * 7919ULL;
        if (!fallback && !clip) {
            HermitianForm11Field hess;
            make_psh_sample_with_hessian(omega, seed, fam.max_freq, &hess);
            add_sample(&hess);
        } else {
            PshSample smp = fallback ? make_psh_sample(*origin, seed, fam.max_freq)
                                     : make_psh_sample_for(omega, seed, fam.max_freq);
            ScalarField u = std::move(smp.u);
            if (clip) {
                double pert = 0.0;
                u = clip_to_band(u, fam.m_clip, &pert);
                rep.m_clip_perturbation = std::max(rep.m_clip_perturbation, pert);
            }
            HermitianForm11Field hess = eng.ddc(u);
            add_sample(&hess);
        }
    }

    rep.worst_eigenvalue = weig_global;
    double scale = 1.0 + omega.max_norm();
    if (weig_global < -1e-6 * scale)
        throw ConeError("mass_survey: sample left the psd cone", weig_global, -1);

    rep.min_mass.assign(js.size(), std::numeric_limits<double>::infinity());
    rep.max_mass.assign(js.size(), -std::numeric_limits<double>::infinity());
    rep.mean_mass.assign(js.size(), 0.0);
    for (const auto& row : rep.masses)
        for (std::size_t t = 0; t < js.size(); ++t) {
            rep.min_mass[t] = std::min(rep.min_mass[t], row[t]);
            rep.max_mass[t] = std::max(rep.max_mass[t], row[t]);
            rep.mean_mass[t] += row[t];
        }
    if (!rep.masses.empty())
        for (auto& m : rep.mean_mass) m /= double(rep.masses.size());
    return rep;
}

}  // namespace

MassReport mass_survey(const Scenario& s, const FamilySpec& fam, std::span<const int> js) {
    if (s.omega_degenerate && s.name != "product_collapsing")
        throw BuildError("mass_survey: omega is degenerate; survey omega_eps instead");
    return survey_impl(s.omega, &s, s.name, fam, js);
}

MassReport mass_survey_for(const HermitianForm11Field& omega, const FamilySpec& fam,
                           std::span<const int> js, const std::string& label) {
    return survey_impl(omega, nullptr, label, fam, js);
}

double binomial_identity_check(const Scenario& s, const ScalarField& u) {
    const GridSpec& g = s.grid;
    HermitianForm11Field hess = SpectralEngine::get(g).ddc(u);
    std::vector<ScalarField> dens;
    std::vector<int> jn = {g.n};
    mixed_power_densities(s.omega, &hess, 1.0, jn, dens, nullptr);
    double lhs = integrate(dens[0]);
    std::vector<int> alljs;
    for (int j = 0; j <= g.n; ++j) alljs.push_back(j);
    mixed_power_densities(s.omega, &hess, 0.0, alljs, dens, nullptr);
    double rhs = 0.0;
    for (int j = 0; j <= g.n; ++j)
        rhs += double(multi_index::binomial(g.n, j)) * integrate(dens[std::size_t(j)]);
    return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
}

TwoPowerMargins two_power_bound_check(const Scenario& s, const FamilySpec& fam, int ell, int j) {
    const GridSpec& g = s.grid;
    if (!(0 <= ell && ell <= j && j <= g.n))
        throw std::invalid_argument("two_power_bound_check: need 0 <= l <= j <= n");
    if (s.omega_degenerate && s.name != "product_collapsing")
        throw BuildError("two_power_bound_check: degenerate omega");
    TwoPowerMargins out;
    out.worst = std::numeric_limits<double>::infinity();
    std::vector<ScalarField> dens;
    std::vector<int> jl = {ell}, jj = {j};
    for (int k = 0; k < fam.count; ++k) {
        std::uint64_t seed = fam.seed + std::uint64_t(k) * 7919ULL;
        HermitianForm11Field hess;
        if (s.name == "product_collapsing") {
            PshSample smp = make_psh_sample(s, seed, fam.max_freq);
            hess = SpectralEngine::get(g).ddc(smp.u);
        } else {
            make_psh_sample_with_hessian(s.omega, seed, fam.max_freq, &hess);
        }
        mixed_power_densities(s.omega, &hess, 1.0, jl, dens, nullptr);
        double lhs = integrate(dens[0]);
        mixed_power_densities(s.omega, &hess, 2.0, jj, dens, nullptr);
        double rhs = integrate(dens[0]);
        out.margins.push_back(rhs - lhs);
        out.worst = std::min(out.worst, rhs - lhs);
    }
    return out;
}

double monotonicity_check(const HermitianForm11Field& omega1, const HermitianForm11Field& omega2,
                          const PshSample& v, double beta_max) {
    EnvelopeResult env = compute_envelope(omega1, v.u, beta_max);
    double ctol = 1e-5 * (1.0 + std::max(omega1.max_norm(), omega2.max_norm()));
    double mass1 = integrate(ma_density(omega1, env.phi, ctol));
    double mass2 = integrate(ma_density(omega2, v.u, ctol));
    return mass2 - mass1;
}

EpsLadderTable hat_v_closed_check(const Scenario& s, std::span<const double> eps_ladder,
                                  const FamilySpec& fam) {
    if (!s.omega_closed) throw BuildError("hat_v_closed_check: scenario must be closed");
    EpsLadderTable table;
    table.volume0 = omega_volume(s.omega);
    std::vector<int> jn = {s.grid.n};
    double sxx = 0.0, sxy = 0.0;
    for (double eps : eps_ladder) {
        HermitianForm11Field we = s.omega_eps(eps);
        MassReport rep = mass_survey_for(we, fam, jn, s.name);
        EpsLadderRow row;
        row.eps = eps;
        row.min_mass = rep.min_mass[0];
        row.max_mass = rep.max_mass[0];
        row.volume_eps = rep.volume;
        row.deviation = std::max(std::abs(rep.min_mass[0] - table.volume0),
                                 std::abs(rep.max_mass[0] - table.volume0));
        table.rows.push_back(row);
        sxx += eps * eps;
        sxy += eps * row.deviation;
    }
    table.fitted_c = (sxx > 0.0) ? sxy / sxx : 0.0;
    return table;
}

MassReport v_M_survey(const Scenario& s, double big_m, const FamilySpec& fam) {
    FamilySpec f = fam;
    f.m_clip = big_m;
    if (big_m == 0.0) {
        // clipping to [0,0] leaves only u = 0
        f.count = 0;
        f.include_zero = true;
    }
    std::vector<int> jn = {s.grid.n};
    return mass_survey(s, f, jn);
}

}  // namespace pluripot
