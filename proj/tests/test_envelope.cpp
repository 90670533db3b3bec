#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pluripot/envelope.hpp"
#include "pluripot/scenario.hpp"
#include "pluripot/spectral.hpp"

using namespace pluripot;

TEST_CASE("default_beta_schedule ends exactly at beta_max") {
    auto s = default_beta_schedule(1024.0);
    REQUIRE(!s.empty());
    CHECK(s.front() == 1.0);
    CHECK(s.back() == 1024.0);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
    auto t = default_beta_schedule(100.0);
    CHECK(t.back() == 100.0);
}

TEST_CASE("n=1 envelope matches the projected-SOR oracle") {
    GridSpec g(1, 64);
    Scenario s = build_scenario("flat_kahler", g);
    ScalarField h = builtin_obstacle(g, "two_well");
    EnvelopeResult r = compute_envelope(s.omega, h, 4096.0);
    ScalarField m(g, 1.0);
    ScalarField oracle = envelope_obstacle_1d(m, h);
    double gap = 0.0;
    for (std::int64_t i = 0; i < h.size(); ++i) gap = std::max(gap, std::abs(r.phi[i] - oracle[i]));
    CHECK(gap <= 2.0 * r.scheme_tol);
    CHECK(r.sup_violation <= r.scheme_tol);
}

TEST_CASE("envelope axioms: monotone in the obstacle, equivariant under constants") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("flat_kahler", g);
    ScalarField h = builtin_obstacle(g, "band_random", 3);
    const double beta_max = 1024.0;
    EnvelopeResult r = compute_envelope(s.omega, h, beta_max);

    // P(h + c) = P(h) + c
    ScalarField hc = h;
    hc += 0.35;
    EnvelopeResult rc = compute_envelope(s.omega, hc, beta_max);
    double dev = 0.0;
    for (std::int64_t i = 0; i < h.size(); ++i)
        dev = std::max(dev, std::abs(rc.phi[i] - r.phi[i] - 0.35));
    CHECK(dev <= 2.0 * r.scheme_tol);

    // h1 <= h2 implies P(h1) <= P(h2)
    ScalarField h2 = builtin_obstacle(g, "cosine", 3);
    ScalarField hmin(g);
    for (std::int64_t i = 0; i < h.size(); ++i) hmin[i] = std::min(h[i], h2[i]);
    EnvelopeResult rmin = compute_envelope(s.omega, hmin, beta_max);
    double overshoot = 0.0;
    for (std::int64_t i = 0; i < h.size(); ++i)
        overshoot = std::max(overshoot, rmin.phi[i] - r.phi[i]);
    CHECK(overshoot <= 2.0 * r.scheme_tol);

    // P(h) <= h and P(h) is omega-psh up to the scheme slack
    CHECK(r.sup_violation <= r.scheme_tol);
    auto chk = is_omega_psh(s.omega, r.phi, 1e-6 + 10.0 / beta_max);
    CHECK(chk.flag);
}

TEST_CASE("envelope of an omega-psh obstacle is the obstacle itself") {
    GridSpec g(2, 32);
    Scenario s = build_scenario("flat_kahler", g);
    PshSample smp = make_psh_sample(s, 3, 2);
    EnvelopeResult r = compute_envelope(s.omega, smp.u, 1024.0);
    double gap = 0.0;
    for (std::int64_t i = 0; i < smp.u.size(); ++i)
        gap = std::max(gap, std::abs(r.phi[i] - smp.u[i]));
    CHECK(gap <= 2.0 * r.scheme_tol);
    double frac = 0.0;
    for (auto m : r.contact_mask) frac += m;
    CHECK(frac / double(r.contact_mask.size()) > 0.99);
}

TEST_CASE("orthogonality defect is small for a genuine envelope") {
    GridSpec g(1, 64);
    Scenario s = build_scenario("flat_kahler", g);
    ScalarField h = builtin_obstacle(g, "two_well");
    EnvelopeResult r = compute_envelope(s.omega, h, 4096.0);
    double mass = integrate(ma_density(s.omega, r.phi, 1e-6));
    CHECK(r.orthogonality_defect <= 1e-3 * std::max(1.0, mass));
}

TEST_CASE("decimate and refine are consistent grid transfers") {
    GridSpec g(2, 32);
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField f = eng.band_limited(2, 9, 1.0);
    ScalarField c = decimate(f, 16);
    REQUIRE(c.grid == GridSpec(2, 16));
    // decimation subsamples shared nodes
    GridSpec gc(2, 16);
    for (std::int64_t i = 0; i < c.size(); ++i) {
        auto cc = gc.coords(i);
        std::array<int, 6> ip{};
        for (int d = 0; d < 4; ++d) ip[std::size_t(d)] = int(std::lround(cc[std::size_t(d)] * 32));
        CHECK(c[i] == f[g.index(ip)]);
    }
    // refine is exact on shared nodes and multilinear in between
    ScalarField r = refine(c, 32);
    REQUIRE(r.grid == g);
    for (std::int64_t i = 0; i < c.size(); ++i) {
        auto cc = gc.coords(i);
        std::array<int, 6> ip{};
        for (int d = 0; d < 4; ++d) ip[std::size_t(d)] = int(std::lround(cc[std::size_t(d)] * 32));
        CHECK(r[g.index(ip)] == doctest::Approx(c[i]).epsilon(1e-14));
    }
    HermitianForm11Field w = eng.ddc(f);
    HermitianForm11Field wc = decimate(w, 16);
    CHECK(wc.grid() == GridSpec(2, 16));
}

TEST_CASE("dilate_mask grows a singleton into a Chebyshev ball, periodically") {
    GridSpec g(1, 16);
    std::vector<std::uint8_t> mask(std::size_t(g.num_points()), 0);
    mask[0] = 1;  // corner: wrap-around must show
    dilate_mask(mask, g, 2);
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < g.num_points(); ++i) {
        auto c = g.coords(i);
        int x = int(std::lround(c[0] * 16)), y = int(std::lround(c[1] * 16));
        int dx = std::min(x, 16 - x), dy = std::min(y, 16 - y);
        bool inside = std::max(dx, dy) <= 2;
        CHECK(bool(mask[std::size_t(i)]) == inside);
        count += mask[std::size_t(i)];
    }
    CHECK(count == 25);
}

TEST_CASE("builtin obstacles are well-defined and bounded") {
    GridSpec g(2, 16);
    const auto& names = builtin_obstacle_names();
    REQUIRE(names.size() == 3);
    for (const auto& name : names) {
        ScalarField h = builtin_obstacle(g, name);
        CHECK(h.all_finite());
        CHECK(h.osc() > 0.0);
        ScalarField h2 = builtin_obstacle(g, name);
        for (std::int64_t i = 0; i < h.size(); i += 61) CHECK(h[i] == h2[i]);
    }
    CHECK_THROWS(builtin_obstacle(g, "no_such_obstacle"));
}

TEST_CASE("envelope_min_check passes on a flat scenario") {
    GridSpec g(2, 16);
    Scenario s = build_scenario("flat_kahler", g);
    auto samples = sample_psh(s, 2, 21, 2);
    MinCheckReport rep = envelope_min_check(s, samples[0], samples[1], 1024.0);
    CHECK(rep.pass);
    REQUIRE(!rep.boxes.empty());
    CHECK(rep.boxes.front().box_id == 0);
    for (const auto& b : rep.boxes) CHECK(b.margin >= -1e-4 * rep.mass_scale);
    CHECK(rep.crease_fraction >= 0.0);
    CHECK(rep.crease_fraction < 1.0);
}

TEST_CASE("degenerate omega is rejected with guidance toward omega_eps") {
    GridSpec g(2, 16);
    Scenario s = build_scenario("product_collapsing", g);
    ScalarField h = builtin_obstacle(g, "cosine");
    auto sched = default_beta_schedule(64.0);
    CHECK_THROWS_AS(envelope_beta(s, h, sched), BuildError);
    // the regularized problem is solvable
    EnvelopeResult r = envelope_beta(s.omega_eps(0.5), h, sched);
    CHECK(r.sup_violation <= 10.0 / 64.0);
}
