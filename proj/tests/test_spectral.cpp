#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pluripot/field.hpp"
#include "pluripot/spectral.hpp"

using namespace pluripot;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("complex Hessian of a plane wave matches the closed form") {
    GridSpec g(2, 32);
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField u(g);
    for (std::int64_t i = 0; i < u.size(); ++i) {
        auto c = g.coords(i);
        u[i] = std::cos(2.0 * kPi * c[0]);  // cos(2 pi x_1)
    }
    HermitianForm11Field hs = eng.ddc(u);
    // d^2/dz_1 dzbar_1 cos(2 pi x_1) = -(pi^2) cos(2 pi x_1)
    auto d0 = hs.component(HermitianForm11Field::diag_component(2, 0));
    auto d1 = hs.component(HermitianForm11Field::diag_component(2, 1));
    for (std::int64_t i = 0; i < u.size(); ++i) {
        CHECK(d0[std::size_t(i)] == doctest::Approx(-kPi * kPi * u[i]).epsilon(1e-12));
        CHECK(std::abs(d1[std::size_t(i)]) <= 1e-12);
    }
}

TEST_CASE("mixed Hessian component of cos(2 pi (x_1 + y_2))") {
    GridSpec g(2, 32);
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField u(g);
    for (std::int64_t i = 0; i < u.size(); ++i) {
        auto c = g.coords(i);
        u[i] = std::cos(2.0 * kPi * (c[0] + c[3]));
    }
    // H_{12} = (1/4)(dx1 - i dy1)(dx2 + i dy2) u = -i pi^2 cos(2 pi (x_1 + y_2))
    ScalarField re(g), im(g);
    eng.forward(u);
    eng.hessian_component(0, 1, false, re);
    eng.hessian_component(0, 1, true, im);
    for (std::int64_t i = 0; i < u.size(); ++i) {
        CHECK(std::abs(re[i]) <= 1e-11);
        CHECK(im[i] == doctest::Approx(-kPi * kPi * u[i]).epsilon(1e-11));
    }
}

TEST_CASE("quarter_laplacian equals the trace of the complex Hessian") {
    GridSpec g(2, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField u = eng.band_limited(3, 42, 0.7);
    HermitianForm11Field hs = eng.ddc(u);
    ScalarField ql(g);
    eng.quarter_laplacian(u, ql);
    auto d0 = hs.component(HermitianForm11Field::diag_component(2, 0));
    auto d1 = hs.component(HermitianForm11Field::diag_component(2, 1));
    for (std::int64_t i = 0; i < u.size(); ++i)
        CHECK(ql[i] == doctest::Approx(d0[std::size_t(i)] + d1[std::size_t(i)]).epsilon(1e-12));
}

TEST_CASE("band_limited fields are deterministic, mean-zero, amplitude-normalized") {
    GridSpec g(2, 32);
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField a = eng.band_limited(2, 7, 0.35);
    ScalarField b = eng.band_limited(2, 7, 0.35);
    for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    CHECK(std::abs(integrate(a)) <= 1e-13);
    CHECK(a.norm_inf() == doctest::Approx(0.35).epsilon(1e-12));
    ScalarField c = eng.band_limited(2, 8, 0.35);
    CHECK(c.norm_inf() > 0.0);
    bool differs = false;
    for (std::int64_t i = 0; i < a.size() && !differs; ++i) differs = (a[i] != c[i]);
    CHECK(differs);
}

TEST_CASE("band_limited samples the same continuum function at every resolution") {
    GridSpec g1(1, 32), g2(1, 64);
    ScalarField a = SpectralEngine::get(g1).band_limited(3, 99, 0.5);
    ScalarField b = SpectralEngine::get(g2).band_limited(3, 99, 0.5);
    // every res-32 node is a res-64 node
    for (int x = 0; x < 32; ++x)
        for (int y = 0; y < 32; ++y) {
            double va = a[std::int64_t(x) * 32 + y];
            double vb = b[std::int64_t(2 * x) * 64 + 2 * y];
            CHECK(va == doctest::Approx(vb).epsilon(1e-12));
        }
}

TEST_CASE("Nyquist modes are annihilated by the derivative multipliers") {
    GridSpec g(1, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField u(g);
    for (std::int64_t i = 0; i < u.size(); ++i) {
        auto c = g.coords(i);
        u[i] = ((int(std::lround(c[0] * 16)) % 2) == 0) ? 1.0 : -1.0;  // pure Nyquist on x_1
    }
    ScalarField d(g);
    eng.forward(u);
    eng.dz_component(0, false, d);
    CHECK(d.norm_inf() <= 1e-12);
    eng.dz_component(0, true, d);
    CHECK(d.norm_inf() <= 1e-12);
    eng.axis_deriv(0, d);
    CHECK(d.norm_inf() <= 1e-12);
}

TEST_CASE("precond_solve inverts tr(C H[.]) - beta") {
    GridSpec g(2, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    HermitianMatrix c(2);
    c(0, 0) = 1.5;
    c(1, 1) = 0.8;
    c(0, 1) = cplx{0.3, 0.1};
    c(1, 0) = std::conj(c(0, 1));
    const double beta = 2.5;
    ScalarField rhs = eng.band_limited(3, 11, 1.0);
    ScalarField phi(g);
    eng.precond_solve(c, beta, rhs, phi);
    HermitianForm11Field hs = eng.ddc(phi);
    for (std::int64_t i = 0; i < rhs.size(); ++i) {
        HermitianMatrix h = hs.at(i);
        cplx tr = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) tr += c(j, k) * h(k, j);
        double lhs = tr.real();
        CHECK(lhs - beta * phi[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
    }
}

TEST_CASE("truncate removes exactly the high frequencies") {
    GridSpec g(1, 32);
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField u(g);
    for (std::int64_t i = 0; i < u.size(); ++i) {
        auto c = g.coords(i);
        u[i] = std::cos(2.0 * kPi * c[0]) + 0.5 * std::cos(2.0 * kPi * 5.0 * c[1]);
    }
    ScalarField t = u;
    eng.truncate(t, 2);
    for (std::int64_t i = 0; i < u.size(); ++i) {
        auto c = g.coords(i);
        CHECK(t[i] == doctest::Approx(std::cos(2.0 * kPi * c[0])).epsilon(1e-12));
    }
}
