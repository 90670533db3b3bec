#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pluripot/scenario.hpp"
#include "pluripot/spectral.hpp"
#include "pluripot/volume.hpp"

using namespace pluripot;

TEST_CASE("closed scenarios have constant mixed masses (Stokes)") {
    GridSpec g(2, 32);
    for (const char* name : {"flat_kahler", "guan_li_closed"}) {
        Scenario s = build_scenario(name, g);
        FamilySpec fam;
        fam.count = 5;
        fam.seed = 3;
        std::vector<int> js{0, 1, 2};
        MassReport rep = mass_survey(s, fam, js);
        REQUIRE(rep.masses.size() == 5);
        for (std::size_t ji = 0; ji < js.size(); ++ji) {
            for (const auto& row : rep.masses)
                CHECK(std::abs(row[ji] - rep.volume) <= 1e-8 * std::max(1.0, rep.volume));
            CHECK(rep.max_mass[ji] - rep.min_mass[ji] <= 1e-8 * std::max(1.0, rep.volume));
        }
    }
}

TEST_CASE("non-closed masses genuinely vary with the sample") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("nonclosed_hermitian", g);
    FamilySpec fam;
    fam.count = 6;
    fam.seed = 5;
    fam.include_zero = true;
    std::vector<int> js{2};
    MassReport rep = mass_survey(s, fam, js);
    REQUIRE(rep.masses.size() == 7);  // zero sample prepended
    // the u = 0 row is the volume itself
    CHECK(rep.masses[0][0] == doctest::Approx(rep.volume).epsilon(1e-12));
    CHECK(rep.max_mass[0] - rep.min_mass[0] > 1e-6);
    CHECK(rep.min_mass[0] <= rep.volume + 1e-12);
    CHECK(rep.max_mass[0] >= rep.volume - 1e-12);
    CHECK(rep.worst_eigenvalue >= -1e-8);
}

TEST_CASE("binomial identity holds to near round-off") {
    GridSpec g(2, 32);
    for (const char* name : {"flat_kahler", "nonclosed_hermitian"}) {
        Scenario s = build_scenario(name, g);
        PshSample smp = make_psh_sample(s, 9, 2);
        CHECK(binomial_identity_check(s, smp.u) <= 1e-9);
    }
    GridSpec g3(3, 16);
    Scenario s3 = build_scenario("nonclosed_hermitian", g3);
    PshSample smp3 = make_psh_sample(s3, 9, 2);
    CHECK(binomial_identity_check(s3, smp3.u) <= 1e-9);
}

TEST_CASE("two-power bound holds across a family") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("nonclosed_hermitian", g);
    FamilySpec fam;
    fam.count = 8;
    fam.seed = 13;
    for (int ell = 0; ell <= 2; ++ell) {
        TwoPowerMargins m = two_power_bound_check(s, fam, ell, 2);
        REQUIRE(m.margins.size() == 8);
        CHECK(m.worst >= -1e-10);
        for (double v : m.margins) CHECK(v >= -1e-10);
    }
}

TEST_CASE("v_- monotonicity in omega") {
    GridSpec g(2, 16);
    Scenario s = build_scenario("flat_kahler", g);
    HermitianMatrix two = HermitianMatrix::identity(2);
    two *= 1.5;
    HermitianForm11Field omega2 = HermitianForm11Field::uniform(g, two);
    PshSample v = make_psh_sample(s, 17, 2);
    double margin = monotonicity_check(s.omega, omega2, v, 1024.0);
    CHECK(margin >= -1e-6);
}

TEST_CASE("clip_to_band is a small, psh-preserving perturbation of the hard clip") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("flat_kahler", g);
    PshSample smp = make_psh_sample(s, 23, 2);
    ScalarField u = smp.u;
    u *= 6.0;  // exaggerate so the clip is active
    const double big_m = 0.5 * u.osc();
    double pert = 0.0;
    ScalarField c = clip_to_band(u, big_m, &pert);
    for (std::int64_t i = 0; i < u.size(); ++i) {
        double hard = std::max(u[i], -big_m);
        CHECK(std::abs(c[i] - hard) <= pert + 1e-14);
        CHECK(c[i] >= hard - 1e-12);  // convex reparametrizations sit above the hard clip
        CHECK(c[i] <= 1e-12);
    }
    CHECK(pert > 0.0);
    CHECK(pert <= 2.0 * big_m / 0.5 / g.res * 10.0);  // resolved over a few cells
}

TEST_CASE("v_M survey reports the clip perturbation and stays ordered") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("nonclosed_hermitian", g);
    FamilySpec fam;
    fam.count = 4;
    fam.seed = 29;
    MassReport rep = v_M_survey(s, 0.2, fam);
    CHECK(rep.m_clip_perturbation > 0.0);
    for (std::size_t ji = 0; ji < rep.js.size(); ++ji) {
        CHECK(rep.min_mass[ji] <= rep.mean_mass[ji] + 1e-14);
        CHECK(rep.mean_mass[ji] <= rep.max_mass[ji] + 1e-14);
    }
}

TEST_CASE("hat-v ladder converges to the volume on a closed degenerate scenario") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("nef_degenerate", g);
    FamilySpec fam;
    fam.count = 3;
    fam.seed = 31;
    std::vector<double> ladder{0.4, 0.2, 0.1};
    EpsLadderTable t = hat_v_closed_check(s, ladder, fam);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.volume0 > 0.0);
    // closed forms: masses at eps equal the eps-volume, deviations shrink with eps
    for (const auto& row : t.rows) {
        CHECK(row.max_mass - row.min_mass <= 1e-7 * std::max(1.0, row.volume_eps));
        CHECK(std::abs(row.max_mass - row.volume_eps) <= 1e-7 * std::max(1.0, row.volume_eps));
        CHECK(row.deviation >= 0.0);
    }
    CHECK(t.rows[2].deviation <= t.rows[0].deviation + 1e-12);
    CHECK(t.fitted_c >= 0.0);
}
