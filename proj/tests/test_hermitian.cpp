#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "pluripot/hermitian.hpp"

using namespace pluripot;

namespace {

std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64{seed}; }

HermitianMatrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    HermitianMatrix m(n);
    for (int j = 0; j < n; ++j) m(j, j) = u(rng);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            m(j, k) = cplx{u(rng), u(rng)};
            m(k, j) = std::conj(m(j, k));
        }
    return m;
}

HermitianMatrix random_pd(int n, std::mt19937_64& rng, double scale = 1.0) {
    HermitianMatrix m = random_hermitian(n, rng, scale);
    double ev = m.min_eigenvalue();
    for (int j = 0; j < n; ++j) m(j, j) += (0.1 - std::min(ev, 0.0)) + scale;
    return m;
}

Eigen::MatrixXcd to_eigen(const HermitianMatrix& m) {
    Eigen::MatrixXcd e(m.dim(), m.dim());
    for (int j = 0; j < m.dim(); ++j)
        for (int k = 0; k < m.dim(); ++k) e(j, k) = m(j, k);
    return e;
}

// Independent oracle: inclusion-exclusion expansion of the mixed
// discriminant, D = (1/n!) sum_{S subset, S nonempty} (-1)^{n-|S|} det(sum_{i in S} A_i).
double mixed_discriminant_oracle(const std::vector<HermitianMatrix>& mats) {
    const int n = int(mats.size());
    double acc = 0.0;
    for (int mask = 1; mask < (1 << n); ++mask) {
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
        int cnt = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) {
                sum += to_eigen(mats[std::size_t(i)]);
                ++cnt;
            }
        double sign = ((n - cnt) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * sum.determinant().real();
    }
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    return acc / fact;
}

}  // namespace

TEST_CASE("mixed discriminant matches the inclusion-exclusion oracle") {
    auto rng = rng_for(101);
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<HermitianMatrix> mats;
            for (int i = 0; i < n; ++i) mats.push_back(random_hermitian(n, rng));
            double got = mixed_discriminant(mats);
            double want = mixed_discriminant_oracle(mats);
            CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)));
        }
    }
}

TEST_CASE("mixed discriminant of equal arguments is the determinant") {
    auto rng = rng_for(102);
    for (int n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 50; ++trial) {
            HermitianMatrix a = random_hermitian(n, rng);
            std::vector<HermitianMatrix> mats(std::size_t(n), a);
            CHECK(mixed_discriminant(mats) ==
                  doctest::Approx(to_eigen(a).determinant().real()).epsilon(1e-12));
        }
}

TEST_CASE("mixed discriminant is symmetric and multilinear") {
    auto rng = rng_for(103);
    for (int trial = 0; trial < 50; ++trial) {
        HermitianMatrix a = random_hermitian(3, rng);
        HermitianMatrix b = random_hermitian(3, rng);
        HermitianMatrix c = random_hermitian(3, rng);
        std::vector<HermitianMatrix> abc{a, b, c}, bac{b, a, c}, acb{a, c, b};
        double d0 = mixed_discriminant(abc);
        CHECK(mixed_discriminant(bac) == doctest::Approx(d0).epsilon(1e-13));
        CHECK(mixed_discriminant(acb) == doctest::Approx(d0).epsilon(1e-13));
        // linearity in the first slot
        double s = 0.7;
        HermitianMatrix as = a;
        as *= s;
        std::vector<HermitianMatrix> sabc{as, b, c};
        CHECK(mixed_discriminant(sabc) == doctest::Approx(s * d0).epsilon(1e-12));
    }
}

TEST_CASE("wedge_top_density is n! times the mixed discriminant") {
    auto rng = rng_for(104);
    for (int n = 1; n <= 3; ++n) {
        double fact = (n == 3) ? 6.0 : (n == 2 ? 2.0 : 1.0);
        std::vector<HermitianMatrix> mats;
        for (int i = 0; i < n; ++i) mats.push_back(random_hermitian(n, rng));
        CHECK(wedge_top_density(mats) ==
              doctest::Approx(fact * mixed_discriminant(mats)).epsilon(1e-13));
    }
}

TEST_CASE("eigenvalues match Eigen's selfadjoint solver") {
    auto rng = rng_for(105);
    for (int n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 100; ++trial) {
            HermitianMatrix a = random_hermitian(n, rng, 2.0);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
            auto got = a.eigenvalues();
            for (int j = 0; j < n; ++j)
                CHECK(got[std::size_t(j)] == doctest::Approx(es.eigenvalues()[j]).epsilon(1e-10));
        }
}

TEST_CASE("adjugate and inverse") {
    auto rng = rng_for(106);
    for (int n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 50; ++trial) {
            HermitianMatrix a = random_pd(n, rng);
            HermitianMatrix inv = a.inverse();
            Eigen::MatrixXcd prod = to_eigen(a) * to_eigen(inv);
            CHECK((prod - Eigen::MatrixXcd::Identity(n, n)).norm() <= 1e-12 * to_eigen(a).norm());
            HermitianMatrix adj = a.adjugate();
            Eigen::MatrixXcd want = to_eigen(a).determinant().real() * to_eigen(inv);
            CHECK((to_eigen(adj) - want).norm() <= 1e-10);
        }
}

TEST_CASE("generalized eigenvalues against Eigen") {
    auto rng = rng_for(107);
    for (int n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 100; ++trial) {
            HermitianMatrix a = random_hermitian(n, rng);
            HermitianMatrix m = random_pd(n, rng);
            auto got = generalized_eigenvalues(a, m);
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a),
                                                                          to_eigen(m));
            for (int j = 0; j < n; ++j)
                CHECK(got[std::size_t(j)] ==
                      doctest::Approx(es.eigenvalues()[j]).epsilon(1e-8));
        }
    HermitianMatrix bad = HermitianMatrix::identity(2);
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(generalized_eigenvalues(HermitianMatrix::identity(2), bad), PositivityError);
}

TEST_CASE("relative trace") {
    auto rng = rng_for(108);
    HermitianMatrix a = random_hermitian(3, rng);
    HermitianMatrix b = random_pd(3, rng);
    double want = (to_eigen(b).inverse() * to_eigen(a)).trace().real();
    CHECK(relative_trace(a, b) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("pointwise Popovici inequality on random positive triples") {
    auto rng = rng_for(109);
    for (int n = 2; n <= 3; ++n)
        for (int trial = 0; trial < 2000; ++trial) {
            HermitianMatrix t1 = random_pd(n, rng);
            HermitianMatrix t2 = random_pd(n, rng);
            HermitianMatrix t3 = random_pd(n, rng);
            auto r = popovici_pointwise(t1, t2, t3);
            CHECK(r.lhs >= r.rhs - 1e-12 * (1.0 + std::abs(r.rhs)));
        }
}

TEST_CASE("positivity helpers") {
    HermitianMatrix a = HermitianMatrix::identity(2);
    CHECK(is_positive_11(a, 0.0).flag);
    a(0, 0) = -0.5;
    auto r = is_positive_11(a, 1e-10);
    CHECK_FALSE(r.flag);
    CHECK(r.worst_eigenvalue == doctest::Approx(-0.5));
    CHECK(default_positivity_tol(a) == doctest::Approx(1e-10 * (1.0 + a.norm_inf())));
}
