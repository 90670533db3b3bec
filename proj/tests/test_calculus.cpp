#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pluripot/calculus.hpp"
#include "pluripot/spectral.hpp"

using namespace pluripot;

namespace {

HermitianForm11Field bumped_metric(const GridSpec& g, std::uint64_t seed, double amp) {
    SpectralEngine& eng = SpectralEngine::get(g);
    HermitianForm11Field w = HermitianForm11Field::uniform(g, HermitianMatrix::identity(g.n));
    HermitianForm11Field d = eng.ddc(eng.band_limited(2, seed, amp));
    w.axpy(1.0, d);
    return w;
}

}  // namespace

TEST_CASE("det_density equals the top density of the wedge power") {
    GridSpec g(2, 16);
    HermitianForm11Field w = bumped_metric(g, 31, 0.01);
    ScalarField dd = det_density(w);
    FormField f = FormField::from_hermitian_field(w);
    double imag = 0.0;
    ScalarField top = top_density_field(wedge(f, f), &imag);
    CHECK(imag <= 1e-12);
    for (std::int64_t i = 0; i < dd.size(); ++i)
        CHECK(dd[i] == doctest::Approx(top[i]).epsilon(1e-12));
}

TEST_CASE("ddc of a potential is exact and closed: d(ddc u) = 0") {
    GridSpec g(2, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField u = eng.band_limited(3, 17, 0.5);
    HermitianForm11Field h = ddc(u);
    FormField f = FormField::from_hermitian_field(h);
    CHECK(del(f).norm_inf() <= 1e-10 * (1.0 + f.norm_inf()));
    CHECK(delbar(f).norm_inf() <= 1e-10 * (1.0 + f.norm_inf()));
}

TEST_CASE("del and delbar square to zero and anticommute into ddc") {
    GridSpec g(2, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    // a generic non-closed (1,1) field
    HermitianForm11Field w = HermitianForm11Field::uniform(g, HermitianMatrix::identity(2));
    w.densify();
    ScalarField b = eng.band_limited(2, 23, 0.2);
    auto c0 = w.component(HermitianForm11Field::diag_component(2, 0));
    for (std::int64_t i = 0; i < b.size(); ++i) c0[std::size_t(i)] += b[i];
    FormField f = FormField::from_hermitian_field(w);
    CHECK(del(del(f)).norm_inf() <= 1e-10);
    CHECK(delbar(delbar(f)).norm_inf() <= 1e-10);
    // ddc f = 2i del delbar f
    FormField a = ddc_form(f);
    FormField bb = del(delbar(f));
    for (int c = 0; c < a.num_comps(); ++c)
        for (std::int64_t i = 0; i < b.size(); ++i)
            CHECK(std::abs(a.comp[std::size_t(c)][std::size_t(i)] -
                           cplx{0.0, 2.0} * bb.comp[std::size_t(c)][std::size_t(i)]) <= 1e-9);
}

TEST_CASE("stokes_defect vanishes for closed omega and not for non-closed") {
    GridSpec g(2, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    HermitianForm11Field w = bumped_metric(g, 41, 0.01);
    ScalarField u = eng.band_limited(2, 43, 0.02);
    CHECK(stokes_defect(w, u) <= 1e-10);
    // break closedness with a conformal factor
    HermitianForm11Field nc = HermitianForm11Field::uniform(g, HermitianMatrix::identity(2));
    nc.densify();
    ScalarField b = eng.band_limited(2, 47, 0.3);
    for (int c = 0; c < HermitianForm11Field::num_components(2); ++c) {
        auto comp = nc.component(c);
        for (std::int64_t i = 0; i < b.size(); ++i) comp[std::size_t(i)] *= (1.0 + b[i]);
    }
    CHECK(stokes_defect(nc, u) > 1e-8);
}

TEST_CASE("ma_density enforces the psd cone") {
    GridSpec g(1, 16);
    HermitianForm11Field w = HermitianForm11Field::uniform(g, HermitianMatrix::identity(1));
    SpectralEngine& eng = SpectralEngine::get(g);
    ScalarField u = eng.band_limited(2, 53, 0.001);
    CHECK(integrate(ma_density(w, u)) == doctest::Approx(1.0).epsilon(1e-10));
    ScalarField big = eng.band_limited(2, 53, 10.0);  // drives omega + ddc u indefinite
    CHECK_THROWS_AS(ma_density(w, big), ConeError);
}

TEST_CASE("n=3 streamed pairing helpers match pointwise oracles") {
    GridSpec g(3, 16);
    SpectralEngine& eng = SpectralEngine::get(g);
    HermitianForm11Field w = HermitianForm11Field::uniform(g, HermitianMatrix::identity(3));
    HermitianForm11Field d = eng.ddc(eng.band_limited(2, 61, 0.01));
    w.axpy(1.0, d);

    // square_pairing_field is pointwise 2 adj
    HermitianForm11Field sq = square_pairing_field(w);
    for (std::int64_t i = 0; i < 64; ++i) {
        HermitianMatrix adj2 = w.at(i).adjugate();
        adj2 *= 2.0;
        HermitianMatrix got = sq.at(i);
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) CHECK(std::abs(got(j, k) - adj2(j, k)) <= 1e-11);
    }

    // for omega = I + ddc u the derivative defects vanish
    CHECK(ddc_pairing_field(w).max_norm() <= 1e-9);
    CHECK(d_dc_wedge_density(w).norm_inf() <= 1e-9);
    double imag = 0.0;
    ScalarField dtop = ddc_top_density_from_pairing(sq, &imag);
    CHECK(imag <= 1e-8);
    // integral of an exact top form is zero
    CHECK(std::abs(integrate(dtop)) <= 1e-10);
}
