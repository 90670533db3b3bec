#include "pluripot/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pluripot {

double comparison_s_max(double lambda, double b, int n) {
    if (b <= 0.0 || n <= 1) return std::numeric_limits<double>::infinity();
    return lambda * lambda * lambda / (32.0 * b * double(n - 1) * double(n - 1));
}

std::vector<ComparisonReport> modified_comparison_check(const HermitianForm11Field& omega,
                                                        double b, const std::string& label,
                                                        const PshSample& u, const PshSample& v,
                                                        double lambda,
                                                        std::span<const double> svals,
                                                        double tol) {
    const GridSpec& g = omega.grid();
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("modified_comparison_check: need 0 < lambda < 1");
    const std::int64_t np = g.num_points();
    const double s_max = comparison_s_max(lambda, b, g.n);

    double ctol = 1e-5 * (1.0 + omega.max_norm());
    ScalarField scaled_v = v.u;
    scaled_v *= (1.0 - lambda);
    // (1-lambda) v is omega-psh because omega >= 0 -- checked
    {
        PshCheck chk = is_omega_psh(omega, scaled_v, ctol);
        if (!chk.flag)
            throw BuildError("modified_comparison_check: (1-lambda) v left the psh cone");
    }
    ScalarField f_u = ma_density(omega, u.u, ctol);
    ScalarField f_v = ma_density(omega, scaled_v, ctol);
    double total_mass = integrate(f_u);

    double m_lambda = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < np; ++i)
        m_lambda = std::min(m_lambda, u.u[i] - scaled_v[i]);

    const double factor_coef = 4.0 * b * double(g.n - 1) * double(g.n - 1);
    std::vector<ComparisonReport> out;
    std::vector<std::uint8_t> mask(std::size_t(np), 0);
    for (double s : svals) {
        if (!(s > 0.0)) throw std::invalid_argument("modified_comparison_check: s must be > 0");
        if (s >= s_max)
            throw std::invalid_argument("modified_comparison_check: s outside admissible range");
        ComparisonReport rep;
        rep.scenario = label;
        rep.u_seed = u.seed;
        rep.v_seed = v.seed;
        rep.lambda = lambda;
        rep.s = s;
        rep.b = b;
        rep.m_lambda = m_lambda;
        std::int64_t count = 0;
        // boundary cells within 1e-9 are assigned to the sublevel set
        for (std::int64_t i = 0; i < np; ++i) {
            bool in = u.u[i] <= scaled_v[i] + m_lambda + s + 1e-9;
            mask[std::size_t(i)] = in ? 1 : 0;
            count += in;
        }
        rep.sublevel_cells = count;
        double base = 1.0 - factor_coef * s / (lambda * lambda * lambda);
        rep.factor = std::pow(std::max(base, 0.0), g.n);
        rep.lhs = rep.factor * masked_integrate(f_v, mask);
        rep.rhs = masked_integrate(f_u, mask);
        rep.margin = rep.rhs - rep.lhs;
        rep.vacuous = (count == 0);
        rep.pass = rep.vacuous || rep.margin >= -tol * std::max(total_mass, 1e-300);
        out.push_back(rep);
    }
    return out;
}

std::vector<ComparisonReport> modified_comparison_check(const Scenario& sc, const PshSample& u,
                                                        const PshSample& v, double lambda,
                                                        std::span<const double> svals,
                                                        double tol) {
    ConditionBResult bres = condition_b_constant(sc);
    if (!bres.finite)
        throw BuildError("modified_comparison_check: condition (B) fails for this scenario");
    return modified_comparison_check(sc.omega, bres.b, sc.name, u, v, lambda, svals, tol);
}

ContactPair make_contact_pair(const Scenario& s, std::uint64_t seed, int max_freq) {
    const GridSpec& g = s.grid;
    const std::int64_t np = g.num_points();
    ContactPair pair;
    pair.psi = make_psh_sample(s, seed, max_freq);

    // q0: compactly supported bump in x_1; R = complement of its support
    ScalarField q0(g);
    std::vector<std::uint8_t> support(std::size_t(np), 0);
    for (std::int64_t i = 0; i < np; ++i) {
        double x = g.coords(i)[0];
        double t = (x - 0.5) / 0.25;
        if (std::abs(t) < 1.0) {
            double w = 1.0 - t * t;
            double w2 = w * w;
            q0[i] = w2 * w2;
            support[std::size_t(i)] = 1;
        }
    }
    ScalarField neg_q0sq(g);
    for (std::int64_t i = 0; i < np; ++i) neg_q0sq[i] = -q0[i] * q0[i];
    HermitianForm11Field hq = SpectralEngine::get(g).ddc(neg_q0sq);
    HermitianForm11Field wpsi = omega_plus_ddc(s.omega, pair.psi.u);
    double mu = min_pencil_eigenvalue_scan(wpsi, hq);
    double scale = (mu < -1e-14) ? 0.9 * std::sqrt(-1.0 / mu) : 1.0;
    pair.q_scale = scale;
    pair.q = q0;
    pair.q *= scale;
    pair.u = pair.psi.u;
    for (std::int64_t i = 0; i < np; ++i) pair.u[i] -= pair.q[i] * pair.q[i];

    dilate_mask(support, g, 3);
    pair.interior.assign(std::size_t(np), 0);
    for (std::int64_t i = 0; i < np; ++i)
        pair.interior[std::size_t(i)] = support[std::size_t(i)] ? 0 : 1;
    return pair;
}

ContactReport contact_inequality_check(const Scenario& s, const ContactPair& pair,
                                       double rel_tol) {
    const GridSpec& g = s.grid;
    const std::int64_t np = g.num_points();
    auto& eng = SpectralEngine::get(g);
    HermitianForm11Field wu = eng.ddc(pair.u);
    wu.axpy(1.0, s.omega);
    HermitianForm11Field wp = eng.ddc(pair.psi.u);
    wp.axpy(1.0, s.omega);

    ContactReport rep;
    rep.worst_excess.assign(std::size_t(g.n) + 1, -std::numeric_limits<double>::infinity());
    double dens_scale = 0.0;
    for (std::int64_t i = 0; i < np; ++i) {
        if (!pair.interior[std::size_t(i)]) continue;
        HermitianMatrix mu = wu.at(i);
        HermitianMatrix mp = wp.at(i);
        double top = wedge_top_density_pow(mp, g.n, mp);
        dens_scale = std::max(dens_scale, top);
        for (int j = 0; j <= g.n; ++j) {
            double mixed = wedge_top_density_pow(mu, j, mp);
            rep.worst_excess[std::size_t(j)] =
                std::max(rep.worst_excess[std::size_t(j)], mixed - top);
        }
    }
    rep.tol = rel_tol * std::max(dens_scale, 1e-300);
    rep.pass = true;
    for (double e : rep.worst_excess)
        if (e > rep.tol) rep.pass = false;
    return rep;
}

DominationReport domination_falsification(const Scenario& s, int trials, double c,
                                          double eps_exp, std::uint64_t seed, int max_freq) {
    if (!(c >= 0.0 && c < 1.0))
        throw std::invalid_argument("domination_falsification: need c in [0,1)");
    const GridSpec& g = s.grid;
    const std::int64_t np = g.num_points();
    double ctol = 1e-5 * (1.0 + s.omega.max_norm());

    DominationReport rep;
    rep.trials = trials;
    for (int k = 0; k < trials; ++k) {
        PshSample v = make_psh_sample(s, seed + 2 * std::uint64_t(k), max_freq);
        PshSample u = make_psh_sample(s, seed + 2 * std::uint64_t(k) + 1, max_freq);
        ScalarField f_v = ma_density(s.omega, v.u, ctol);
        ScalarField f_u = ma_density(s.omega, u.u, ctol);
        double osc_scale = std::max({v.u.osc(), u.u.osc(), 1.0});
        double concl_tol = 1e-6 * osc_scale;

        // campaign (a): u' = v + c0; corollary hypothesis holds by
        // construction (equal masses, e^{-eps v} >= e^{-eps (v+c0)})
        {
            double c0 = 0.1 * double(k % 5);
            double worst = -std::numeric_limits<double>::infinity();
            for (std::int64_t i = 0; i < np; ++i)
                worst = std::max(worst, v.u[i] - (v.u[i] + c0));
            if (worst <= concl_tol)
                ++rep.constructive_pass;
            else {
                ++rep.violations;
                rep.worst_violation = std::max(rep.worst_violation, worst);
            }
        }

        // campaign (b): screen the domination hypothesis f_u <= c f_v on
        // {u < v} (strict screen, no slack), then demand u >= v
        bool prop_holds = true;
        for (std::int64_t i = 0; i < np && prop_holds; ++i)
            if (u.u[i] < v.u[i] - 1e-9 && f_u[i] > c * f_v[i]) prop_holds = false;
        if (prop_holds) {
            ++rep.screened_prop;
            double worst = -std::numeric_limits<double>::infinity();
            for (std::int64_t i = 0; i < np; ++i) worst = std::max(worst, v.u[i] - u.u[i]);
            if (worst > concl_tol) {
                ++rep.violations;
                rep.worst_violation = std::max(rep.worst_violation, worst);
            }
        }

        // corollary screen: e^{-eps v} f_v >= e^{-eps u} f_u everywhere
        bool cor_holds = true;
        for (std::int64_t i = 0; i < np && cor_holds; ++i)
            if (std::exp(-eps_exp * v.u[i]) * f_v[i] < std::exp(-eps_exp * u.u[i]) * f_u[i])
                cor_holds = false;
        if (cor_holds) {
            ++rep.screened_corollary;
            double worst = -std::numeric_limits<double>::infinity();
            for (std::int64_t i = 0; i < np; ++i) worst = std::max(worst, v.u[i] - u.u[i]);
            if (worst > concl_tol) {
                ++rep.violations;
                rep.worst_violation = std::max(rep.worst_violation, worst);
            }
        }
    }
    return rep;
}

}  // namespace pluripot
