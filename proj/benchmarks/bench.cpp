#include <benchmark/benchmark.h>

#include "pluripot/envelope.hpp"

using namespace pluripot;

static void BM_Ddc_n2(benchmark::State& state) {
    GridSpec g(2, int(state.range(0)));
    auto& eng = SpectralEngine::get(g);
    ScalarField u = eng.band_limited(3, 42, 1.0);
    for (auto _ : state) {
        HermitianForm11Field h = eng.ddc(u);
        benchmark::DoNotOptimize(h.max_norm());
    }
}
BENCHMARK(BM_Ddc_n2)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_DetDensity_n2(benchmark::State& state) {
    GridSpec g(2, int(state.range(0)));
    Scenario s = build_scenario("guan_li_closed", g);
    for (auto _ : state) {
        ScalarField d = det_density(s.omega);
        benchmark::DoNotOptimize(integrate(d));
    }
}
BENCHMARK(BM_DetDensity_n2)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_MixedDiscriminant_n3(benchmark::State& state) {
    HermitianMatrix a = HermitianMatrix::identity(3);
    HermitianMatrix b = HermitianMatrix::identity(3);
    a(0, 1) = cplx{0.2, 0.1};
    a(1, 0) = std::conj(a(0, 1));
    b(1, 2) = cplx{-0.1, 0.3};
    b(2, 1) = std::conj(b(1, 2));
    for (auto _ : state)
        benchmark::DoNotOptimize(wedge_top_density_pow(a, 2, b));
}
BENCHMARK(BM_MixedDiscriminant_n3);

static void BM_PshSample_n2(benchmark::State& state) {
    GridSpec g(2, int(state.range(0)));
    Scenario s = build_scenario("flat_kahler", g);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        PshSample u = make_psh_sample(s, seed++, 3);
        benchmark::DoNotOptimize(u.t_star);
    }
}
BENCHMARK(BM_PshSample_n2)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Envelope_n2_res32(benchmark::State& state) {
    GridSpec g(2, 32);
    Scenario s = build_scenario("flat_kahler", g);
    ScalarField h = builtin_obstacle(g, "two_well");
    for (auto _ : state) {
        EnvelopeResult r = compute_envelope(s.omega, h, double(state.range(0)));
        benchmark::DoNotOptimize(r.orthogonality_defect);
    }
}
BENCHMARK(BM_Envelope_n2_res32)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
