// Acceptance gate: twelve numbered criteria, one pass/fail line each.
// Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pluripot/comparison.hpp"
#include "pluripot/morse.hpp"

using namespace pluripot;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("criterion %2d [%s] %s (%s)\n", id, pass ? "PASS" : "FAIL", what.c_str(),
                detail.c_str());
    std::fflush(stdout);
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
    double t0 = now_seconds();
    GridSpec g(2, 64);
    Scenario s = build_scenario("guan_li_closed", g);
    FamilySpec fam;
    fam.count = 20;
    fam.seed = 2;
    std::vector<int> js{1, 2};
    MassReport rep = mass_survey(s, fam, js);
    double rel = 0.0;
    for (const auto& row : rep.masses)
        for (double m : row) rel = std::max(rel, std::abs(m - rep.volume) / rep.volume);
    double dt = now_seconds() - t0;
    report(1, rel <= 1e-6 && dt <= 30.0, "mass constancy on guan_li_closed (n=2, res 64)",
           "rel dev " + fmt(rel) + ", " + fmt(dt) + " s");
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
    double t0 = now_seconds();
    GridSpec g(1, 256);
    HermitianForm11Field omega =
        HermitianForm11Field::uniform(g, HermitianMatrix::identity(1));
    ScalarField m(g, 1.0);
    double worst_gap = 0.0, worst_defect_rel = 0.0;
    bool ok = true;
    for (const char* name : {"two_well", "cosine", "band_random"}) {
        ScalarField h = builtin_obstacle(g, name);
        EnvelopeResult r = compute_envelope(omega, h, 16384.0);
        ScalarField oracle = envelope_obstacle_1d(m, h);
        double gap = 0.0;
        for (std::int64_t i = 0; i < h.size(); ++i)
            gap = std::max(gap, std::abs(r.phi[i] - oracle[i]));
        double mass = integrate(ma_density(omega, r.phi, 1e-6));
        double defect = orthogonality_defect(omega, r, h, 1e-2);
        worst_gap = std::max(worst_gap, gap);
        worst_defect_rel = std::max(worst_defect_rel, defect / mass);
        ok = ok && gap <= 1e-3 && defect <= 1e-4 * mass;
    }
    double dt = now_seconds() - t0;
    report(2, ok && dt <= 60.0, "n=1 envelope vs projected-SOR oracle (res 256, beta 16384)",
           "gap " + fmt(worst_gap) + ", defect/mass " + fmt(worst_defect_rel) + ", " + fmt(dt) +
               " s");
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
    GridSpec g(2, 64);
    Scenario s = build_scenario("flat_kahler", g);
    const double beta_max = 1024.0;
    const double tol = 2.0 * (10.0 / beta_max);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ScalarField h = builtin_obstacle(g, "band_random", seed);
        EnvelopeResult r = compute_envelope(s.omega, h, beta_max);
        // sub-obstacle
        worst = std::max(worst, r.sup_violation);
        // constant shift
        ScalarField hc = h;
        hc += 0.37;
        EnvelopeResult rc = compute_envelope(s.omega, hc, beta_max);
        for (std::int64_t i = 0; i < h.size(); ++i)
            worst = std::max(worst, std::abs(rc.phi[i] - r.phi[i] - 0.37));
        // idempotence: P(P(h)) = P(h)
        EnvelopeResult ri = compute_envelope(s.omega, r.phi, beta_max);
        for (std::int64_t i = 0; i < h.size(); ++i)
            worst = std::max(worst, std::abs(ri.phi[i] - r.phi[i]));
        // monotonicity: min(h, h') <= h implies P(min) <= P(h)
        ScalarField h2 = builtin_obstacle(g, "band_random", seed + 100);
        ScalarField hmin(g);
        for (std::int64_t i = 0; i < h.size(); ++i) hmin[i] = std::min(h[i], h2[i]);
        EnvelopeResult rm = compute_envelope(s.omega, hmin, beta_max);
        for (std::int64_t i = 0; i < h.size(); ++i)
            worst = std::max(worst, rm.phi[i] - r.phi[i]);
    }
    report(3, worst <= tol, "envelope axioms on flat_kahler (n=2, res 64, 10 obstacles)",
           "worst deviation " + fmt(worst) + " vs 2*scheme_tol " + fmt(tol));
}

// ---------------------------------------------------------------- criterion 4
void criterion_4() {
    GridSpec g(2, 64);
    Scenario s = build_scenario("flat_kahler", g);
    ScalarField h = builtin_obstacle(g, "two_well");
    EnvelopeResult r = compute_envelope(s.omega, h, 16384.0);
    double mass = integrate(ma_density(s.omega, r.phi, 1e-6));
    bool ok = r.orthogonality_defect <= 1e-3 * mass;
    report(4, ok, "orthogonality: MA mass concentrates on the contact set",
           "defect/mass " + fmt(r.orthogonality_defect / mass));
}

// ---------------------------------------------------------------- criterion 5
void criterion_5() {
    GridSpec g(2, 64);
    Scenario s = build_scenario("product_collapsing", g);
    PshSample u = make_psh_sample(s, 3, 2);  // pullback-type generator
    double vol_x = integrate(det_density(s.omega_X));
    std::vector<double> masses;
    for (double eps : {0.1, 0.05, 0.025}) {
        HermitianForm11Field we = s.omega_eps(eps);
        EnvelopeResult r = compute_envelope(we, u.u, 1024.0);
        masses.push_back(integrate(ma_density(we, r.phi, 1e-6)));
    }
    bool ok = masses[1] <= masses[0] && masses[2] <= masses[1] && masses[2] <= 1e-2 * vol_x;
    report(5, ok, "collapsing example: MA mass vanishes through the eps-ladder",
           "masses " + fmt(masses[0]) + " -> " + fmt(masses[1]) + " -> " + fmt(masses[2]) +
               ", bound " + fmt(1e-2 * vol_x));
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
    bool ok = true;
    double worst_closed = 0.0;
    {
        GridSpec g(2, 32);
        const double lambdas[3] = {0.3, 0.5, 0.7};
        for (const char* name : {"flat_kahler", "guan_li_closed"}) {
            Scenario s = build_scenario(name, g);
            double mass = integrate(det_density(s.omega));
            for (int k = 0; k < 25; ++k) {
                PshSample u = make_psh_sample(s, 200 + std::uint64_t(k), 2);
                PshSample v = make_psh_sample(s, 500 + std::uint64_t(k), 2);
                double lambda = lambdas[k % 3];
                std::vector<double> svals{0.02 + 0.01 * (k % 5)};
                auto reps = modified_comparison_check(s, u, v, lambda, svals);
                for (const auto& r : reps) {
                    if (r.vacuous) continue;
                    worst_closed = std::min(worst_closed, r.margin);
                    ok = ok && r.margin >= -1e-8 * mass;
                }
            }
        }
    }
    double worst_open = 0.0;
    {
        GridSpec g(3, 16);
        Scenario s = build_scenario("nonclosed_hermitian", g);
        auto cb = condition_b_constant(s, 16);
        double lambda = 0.5;
        double smax = comparison_s_max(lambda, cb.b, 3);
        std::vector<double> svals;
        for (int k = 1; k <= 4; ++k) svals.push_back(0.125 * k * smax);
        PshSample u = make_psh_sample(s, 7, 2);
        PshSample v = make_psh_sample(s, 9, 2);
        auto reps = modified_comparison_check(s, u, v, lambda, svals);
        for (const auto& r : reps) {
            if (r.vacuous) continue;
            worst_open = std::min(worst_open, r.margin);
            ok = ok && r.margin >= -1e-6;
        }
    }
    report(6, ok, "modified comparison principle (closed B=0 and non-closed n=3 sweeps)",
           "worst margins " + fmt(worst_closed) + " / " + fmt(worst_open));
}

// ---------------------------------------------------------------- criterion 7
void criterion_7() {
    std::mt19937_64 rng{12345};
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto random_pd = [&](int n) {
        HermitianMatrix m(n);
        for (int j = 0; j < n; ++j) m(j, j) = uni(rng);
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                m(j, k) = cplx{uni(rng), uni(rng)};
                m(k, j) = std::conj(m(j, k));
            }
        double ev = m.min_eigenvalue();
        for (int j = 0; j < n; ++j) m(j, j) += 1.1 - std::min(ev, 0.0);
        return m;
    };
    bool ok = true;
    double worst_rel = 0.0;
    for (int n = 2; n <= 3; ++n)
        for (int trial = 0; trial < 100000; ++trial) {
            auto r = popovici_pointwise(random_pd(n), random_pd(n), random_pd(n));
            double rel = (r.rhs - r.lhs) / (1.0 + std::abs(r.rhs));
            worst_rel = std::max(worst_rel, rel);
            ok = ok && rel <= 1e-12;
        }
    // integrated, constructed mode: seeded triples of constant-coefficient forms
    // on small grids (96 at n=2, 4 at n=3)
    int built_pass = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = (trial < 96) ? 2 : 3;
        GridSpec g(n, 16);
        auto t1 = HermitianForm11Field::uniform(g, random_pd(n));
        auto t2 = HermitianForm11Field::uniform(g, random_pd(n));
        auto t3 = HermitianForm11Field::uniform(g, random_pd(n));
        PopoviciIntegrated p = popovici_integrated(t1, t2, t3, true, 1e-9);
        if (p.pass) ++built_pass;
    }
    ok = ok && built_pass == 100;
    report(7, ok, "Popovici inequalities (2e5 pointwise triples, 100 integrated constructed)",
           "worst pointwise excess " + fmt(worst_rel) + ", constructed " +
               std::to_string(built_pass) + "/100");
}

// ---------------------------------------------------------------- criterion 8
void criterion_8() {
    GridSpec g(2, 32);
    Scenario s = build_scenario("flat_kahler", g);
    auto samples = sample_psh(s, 40, 77, 2);
    int pass = 0;
    for (int k = 0; k < 20; ++k) {
        MinCheckReport rep = envelope_min_check(s, samples[std::size_t(2 * k)],
                                                samples[std::size_t(2 * k + 1)], 1024.0, 1e-4);
        if (rep.pass) ++pass;
    }
    report(8, pass == 20, "min/max envelope lemma on 20 seeded pairs (flat_kahler n=2)",
           std::to_string(pass) + "/20 pairs");
}

// ---------------------------------------------------------------- criterion 9
void criterion_9() {
    bool ok = true;
    std::string detail;
    {
        GridSpec g(2, 32);
        Scenario s = build_scenario("nef_degenerate", g);
        FamilySpec fam;
        fam.count = 3;
        fam.seed = 5;
        std::vector<double> ladder{0.4, 0.2, 0.1, 0.05};
        EpsLadderTable t = hat_v_closed_check(s, ladder, fam);
        std::vector<double> slopes;
        for (const auto& row : t.rows) {
            ok = ok && row.deviation <= 1.2 * t.fitted_c * row.eps + 1e-10;
            ok = ok && (row.max_mass - row.min_mass) <= 1e-8 * std::max(1.0, row.volume_eps);
            slopes.push_back(row.deviation / row.eps);
        }
        double smin = *std::min_element(slopes.begin(), slopes.end());
        double smax = *std::max_element(slopes.begin(), slopes.end());
        ok = ok && smax <= 1.2 * smin + 1e-10;
        detail += "hat_v C " + fmt(t.fitted_c) + " slope spread " + fmt(smax / std::max(smin, 1e-300));
    }
    {
        GridSpec g(2, 32);
        Scenario s = build_scenario("guan_li_closed", g);
        FamilySpec fam;
        fam.count = 2;
        fam.seed = 6;
        std::vector<double> ladder{0.2, 0.1, 0.05};
        MorseTable t = morse_mass_convergence(s, ladder, fam);
        std::vector<double> slopes_top, slopes_mixed;
        for (const auto& row : t.rows) {
            ok = ok && row.stokes_top <= 1e-8 && row.stokes_mixed <= 1e-8;
            slopes_top.push_back(row.dev_top / row.eps);
            slopes_mixed.push_back(row.dev_mixed / row.eps);
        }
        for (auto* sl : {&slopes_top, &slopes_mixed}) {
            double smin = *std::min_element(sl->begin(), sl->end());
            double smax = *std::max_element(sl->begin(), sl->end());
            ok = ok && smax <= 1.2 * smin + 1e-10;
        }
        detail += ", morse C " + fmt(t.fitted_c_top) + "/" + fmt(t.fitted_c_mixed);
    }
    report(9, ok, "eps-ladder limits: deviations ~ C*eps with stable C, Stokes-exact masses",
           detail);
}

// --------------------------------------------------------------- criterion 10
void criterion_10() {
    GridSpec g(2, 32);
    int violations = 0, trials = 0;
    for (const auto& name : scenario_names()) {
        Scenario s = build_scenario(name, g);
        DominationReport r = domination_falsification(s, 500, 0.1, 1.0, 11, 2);
        violations += r.violations;
        trials += r.trials;
    }
    report(10, violations == 0, "domination campaigns: 500 pairs per scenario",
           std::to_string(violations) + " violations in " + std::to_string(trials) + " trials");
}

// --------------------------------------------------------------- criterion 11
void criterion_11() {
    // brute-force oracle: inclusion-exclusion over subset determinants
    auto oracle = [](const std::vector<HermitianMatrix>& mats) {
        const int n = int(mats.size());
        double acc = 0.0;
        for (int mask = 1; mask < (1 << n); ++mask) {
            Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
            int cnt = 0;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) {
                    ++cnt;
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k) sum(j, k) += mats[std::size_t(i)](j, k);
                }
            acc += (((n - cnt) % 2 == 0) ? 1.0 : -1.0) * sum.determinant().real();
        }
        double fact = 1.0;
        for (int i = 2; i <= n; ++i) fact *= i;
        return acc / fact;
    };
    std::mt19937_64 rng{777};
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + trial % 3;
        std::vector<HermitianMatrix> mats;
        for (int i = 0; i < n; ++i) {
            HermitianMatrix m(n);
            for (int j = 0; j < n; ++j) m(j, j) = uni(rng);
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k) {
                    m(j, k) = cplx{uni(rng), uni(rng)};
                    m(k, j) = std::conj(m(j, k));
                }
            mats.push_back(m);
        }
        double got = mixed_discriminant(mats);
        double want = oracle(mats);
        worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
    }
    bool ok = worst <= 1e-12;
    // d^2 = 0 and the binomial identity
    GridSpec g(2, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    HermitianForm11Field w = HermitianForm11Field::uniform(g, HermitianMatrix::identity(2));
    w.densify();
    ScalarField b = eng.band_limited(2, 3, 0.3);
    for (int c = 0; c < 4; ++c) {
        auto arr = w.component(c);
        for (std::int64_t i = 0; i < b.size(); ++i) arr[std::size_t(i)] *= (1.0 + b[i]);
    }
    FormField f = FormField::from_hermitian_field(w);
    double d2 = std::max(del(del(f)).norm_inf(), delbar(delbar(f)).norm_inf());
    ok = ok && d2 <= 1e-9;
    double binom = 0.0;
    for (const char* name : {"flat_kahler", "nonclosed_hermitian"}) {
        GridSpec gb(2, 32);
        Scenario s = build_scenario(name, gb);
        PshSample smp = make_psh_sample(s, 13, 2);
        binom = std::max(binom, binomial_identity_check(s, smp.u));
    }
    ok = ok && binom <= 1e-9;
    report(11, ok, "algebra oracles: mixed discriminant, d^2 = 0, binomial identity",
           "worst " + fmt(worst) + " / " + fmt(d2) + " / " + fmt(binom));
}

// --------------------------------------------------------------- criterion 12
void criterion_12() {
#ifndef PLURIPOT_CLI_PATH
    report(12, false, "suite --quick determinism", "CLI path not configured");
#else
    auto run = [](const std::string& dir) {
        std::string cmd = std::string("rm -rf ") + dir + " && PLURIPOT_OUT_DIR=" + dir + " " +
                          PLURIPOT_CLI_PATH + " suite --quick > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    int rc1 = run("/tmp/pluripot_accept_a");
    int rc2 = run("/tmp/pluripot_accept_b");
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string a = slurp("/tmp/pluripot_accept_a/suite.json");
    std::string b = slurp("/tmp/pluripot_accept_b/suite.json");
    bool ok = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
    report(12, ok, "suite --quick is byte-deterministic",
           "exit " + std::to_string(rc1) + "/" + std::to_string(rc2) + ", " +
               std::to_string(a.size()) + " bytes" + (a == b ? ", identical" : ", DIFFER"));
#endif
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0)
        std::printf("acceptance: all 12 criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures;
}
