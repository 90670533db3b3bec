#include <doctest.h>

#include <cmath>

#include "pluripot/morse.hpp"
#include "pluripot/scenario.hpp"
#include "pluripot/spectral.hpp"

using namespace pluripot;

TEST_CASE("is_gauduchon: constants are Gauduchon, negatives are rejected") {
    for (int n = 1; n <= 3; ++n) {
        GridSpec g(n, 16);
        HermitianForm11Field t = HermitianForm11Field::uniform(g, HermitianMatrix::identity(n));
        auto [flag, defect] = is_gauduchon(t);
        CHECK(flag);
        CHECK(defect == 0.0);
        HermitianMatrix neg = HermitianMatrix::identity(n);
        neg *= -1.0;
        CHECK_THROWS_AS(is_gauduchon(HermitianForm11Field::uniform(g, neg)), PositivityError);
    }
}

TEST_CASE("is_gauduchon accepts pluriclosed n=2 constructions and flags conformal breakage") {
    GridSpec g(2, 32);
    SpectralEngine& eng = SpectralEngine::get(g);
    HermitianForm11Field t = HermitianForm11Field::uniform(g, HermitianMatrix::identity(2));
    HermitianForm11Field d = eng.ddc(eng.band_limited(2, 71, 0.05));
    t.axpy(1.0, d);
    auto [flag, defect] = is_gauduchon(t);
    CHECK(flag);
    CHECK(defect <= 1e-8);
    // a generic conformal factor breaks the Gauduchon condition at n=2
    HermitianForm11Field c = HermitianForm11Field::uniform(g, HermitianMatrix::identity(2));
    c.densify();
    ScalarField b = eng.band_limited(2, 73, 0.3);
    for (int comp = 0; comp < 4; ++comp) {
        auto arr = c.component(comp);
        for (std::int64_t i = 0; i < b.size(); ++i) arr[std::size_t(i)] *= (1.0 + b[i]);
    }
    auto [flag2, defect2] = is_gauduchon(c);
    CHECK_FALSE(flag2);
    CHECK(defect2 > 1e-4);
}

TEST_CASE("Gauduchon families are positive with certified defects") {
    {
        GridSpec g(1, 32);
        GauduchonFamily fam = make_gauduchon_family(g, 3);
        REQUIRE(fam.members.size() == 3);
        for (std::size_t i = 0; i < fam.members.size(); ++i) {
            auto [mev, arg] = fam.members[i].min_eigenvalue_scan();
            (void)arg;
            CHECK(mev > 0.0);
            CHECK(fam.defects[i] <= 1e-8);
        }
    }
    {
        GridSpec g(2, 32);
        GauduchonFamily fam = make_gauduchon_family(g, 3);
        REQUIRE(fam.members.size() == 3);
        bool any_nonuniform = false;
        for (std::size_t i = 0; i < fam.members.size(); ++i) {
            auto [mev, arg] = fam.members[i].min_eigenvalue_scan();
            (void)arg;
            CHECK(mev > 0.0);
            CHECK(fam.defects[i] <= 1e-8);
            auto [flag, defect] = is_gauduchon(fam.members[i], 1e-8);
            CHECK(flag);
            CHECK(defect == doctest::Approx(fam.defects[i]).epsilon(1e-10));
            any_nonuniform = any_nonuniform || !fam.members[i].is_uniform();
        }
        CHECK(any_nonuniform);
    }
    {
        GridSpec g(3, 16);
        GauduchonFamily fam = make_gauduchon_family(g, 2);
        REQUIRE(fam.members.size() == 2);
        CHECK(fam.members[0].is_uniform());
        CHECK(fam.defects[0] == 0.0);
        // the corrected-perturbation member: genuinely non-constant, small defect
        CHECK_FALSE(fam.members[1].is_uniform());
        auto [mev, arg] = fam.members[1].min_eigenvalue_scan();
        (void)arg;
        CHECK(mev > 0.0);
        CHECK(fam.defects[1] <= 1e-6);
    }
}

TEST_CASE("lamari scan is exactly one on the flat scenario") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("flat_kahler", g);
    GauduchonFamily fam = make_gauduchon_family(g, 3);
    LamariScan scan = lamari_pairing_scan(s, fam);
    REQUIRE(scan.ratios.size() == 3);
    for (double r : scan.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(scan.delta_star == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(scan.argmin >= 0);
}

TEST_CASE("lamari scan is positive on a non-closed scenario") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("nonclosed_hermitian", g);
    GauduchonFamily fam = make_gauduchon_family(g, 4);
    LamariScan scan = lamari_pairing_scan(s, fam);
    REQUIRE(scan.ratios.size() == 4);
    CHECK(scan.delta_star > 0.0);
    REQUIRE(scan.argmin >= 0);
    CHECK(scan.ratios[std::size_t(scan.argmin)] == doctest::Approx(scan.delta_star));
    for (double r : scan.ratios) CHECK(r >= scan.delta_star);
}

TEST_CASE("integrated Popovici inequality, screened and constructed") {
    GridSpec g(3, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    HermitianForm11Field t1 = HermitianForm11Field::uniform(g, HermitianMatrix::identity(3));
    HermitianForm11Field d = eng.ddc(eng.band_limited(2, 79, 0.02));
    t1.axpy(1.0, d);
    HermitianMatrix m2 = HermitianMatrix::identity(3);
    m2(0, 0) = 1.4;
    m2(1, 2) = cplx{0.2, 0.1};
    m2(2, 1) = std::conj(m2(1, 2));
    HermitianForm11Field t2 = HermitianForm11Field::uniform(g, m2);
    HermitianForm11Field t3 = HermitianForm11Field::uniform(g, HermitianMatrix::identity(3));

    PopoviciIntegrated screened = popovici_integrated(t1, t2, t3, false);
    CHECK_FALSE(screened.constructed);
    CHECK(screened.pass);
    CHECK(screened.lhs >= screened.rhs - 1e-9 * (1.0 + std::abs(screened.rhs)));

    PopoviciIntegrated built = popovici_integrated(t1, t2, t3, true);
    CHECK(built.constructed);
    CHECK(built.pass);

    HermitianMatrix neg = HermitianMatrix::identity(3);
    neg *= -1.0;
    CHECK_THROWS_AS(
        popovici_integrated(HermitianForm11Field::uniform(g, neg), t2, t3, false),
        PositivityError);
}

TEST_CASE("Morse-type mass convergence on a closed scenario") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("guan_li_closed", g);
    FamilySpec fam;
    fam.count = 2;
    fam.seed = 83;
    std::vector<double> ladder{0.2, 0.1};
    MorseTable t = morse_mass_convergence(s, ladder, fam);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.mass0 > 0.0);
    for (const auto& row : t.rows) {
        CHECK(row.stokes_top <= 1e-8);
        CHECK(row.stokes_mixed <= 1e-8);
        CHECK(row.dev_top >= 0.0);
        CHECK(row.dev_mixed >= 0.0);
    }
    // deviations shrink along the ladder (linearly in eps up to round-off)
    CHECK(t.rows[1].dev_top <= t.rows[0].dev_top + 1e-12);
    CHECK(t.fitted_c_top >= 0.0);
    CHECK(t.fitted_c_mixed >= 0.0);

    Scenario bad = build_scenario("nonclosed_hermitian", g);
    CHECK_THROWS_AS(morse_mass_convergence(bad, ladder, fam), BuildError);
}
