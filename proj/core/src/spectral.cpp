#include "pluripot/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <numbers>

namespace pluripot {

namespace {

constexpr double kPi = std::numbers::pi;

// splitmix64: cheap stateless mixer used to derive per-frequency random
// coefficients so synthesized fields are resolution-independent.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t x) { return double(x >> 11) * 0x1.0p-53 + 0x1.0p-54; }

}  // namespace

struct SpectralEngine::Impl {
    GridSpec g;
    int dims;
    std::int64_t nreal;        // res^{2n}
    std::int64_t nspec;        // res^{2n-1} * (res/2 + 1)
    int last;                  // res/2 + 1
    std::vector<int> kfreq;    // full-axis frequency with Nyquist -> 0
    double* rbuf = nullptr;    // transform-side real array
    fftw_complex* spec = nullptr;     // loaded half-spectrum (uhat * N)
    fftw_complex* scratch = nullptr;  // multiplied copy fed to c2r
    fftw_plan plan_r2c = nullptr;
    fftw_plan plan_c2r = nullptr;

    explicit Impl(const GridSpec& gg) : g(gg), dims(gg.dims()) {
        const int res = g.res;
        last = res / 2 + 1;
        nreal = g.num_points();
        nspec = (nreal / res) * last;
        kfreq.resize(std::size_t(res));
        for (int i = 0; i < res; ++i) {
            if (i == res / 2)
                kfreq[std::size_t(i)] = 0;
            else
                kfreq[std::size_t(i)] = (i < res / 2) ? i : i - res;
        }
        rbuf = fftw_alloc_real(std::size_t(nreal));
        spec = fftw_alloc_complex(std::size_t(nspec));
        scratch = fftw_alloc_complex(std::size_t(nspec));
        std::vector<int> nd(std::size_t(dims), res);
        plan_r2c = fftw_plan_dft_r2c(dims, nd.data(), rbuf, spec, FFTW_ESTIMATE);
        plan_c2r = fftw_plan_dft_c2r(dims, nd.data(), scratch, rbuf, FFTW_ESTIMATE);
        if (!plan_r2c || !plan_c2r) throw std::runtime_error("SpectralEngine: FFTW plan failed");
    }

    ~Impl() {
        fftw_destroy_plan(plan_r2c);
        fftw_destroy_plan(plan_c2r);
        fftw_free(rbuf);
        fftw_free(spec);
        fftw_free(scratch);
    }

    /// Iterate the half-spectrum; fn(flat index, frequency vector K, raw
    /// storage index). K maps Nyquist indices to 0; inspect the raw index to
    /// tell them apart from true zero frequencies.
    template <class F>
    void for_each_spec(F&& fn) const {
        std::array<int, 6> ip{};
        std::array<int, 6> kv{};
        const int res = g.res;
        for (std::int64_t s = 0; s < nspec; ++s) {
            for (int d = 0; d < dims - 1; ++d) kv[std::size_t(d)] = kfreq[std::size_t(ip[std::size_t(d)])];
            {
                int il = ip[std::size_t(dims - 1)];
                kv[std::size_t(dims - 1)] = (il == res / 2) ? 0 : il;
            }
            fn(s, kv, ip);
            for (int d = dims - 1; d >= 0; --d) {
                int lim = (d == dims - 1) ? last : res;
                if (++ip[std::size_t(d)] < lim) break;
                ip[std::size_t(d)] = 0;
            }
        }
    }

    /// c2r of scratch into out (normalized by 1/N at fill time by callers).
    void inverse_to(ScalarField& out) {
        if (!(out.grid == g)) out = ScalarField(g);
        fftw_execute(plan_c2r);
        std::memcpy(out.v.data(), rbuf, std::size_t(nreal) * sizeof(double));
    }

    /// Fill scratch with factor(K) * uhat(K) (uhat = spec / N) and c2r.
    template <class F>
    void apply(F&& factor, ScalarField& out) {
        const double inv_n = 1.0 / double(nreal);
        for_each_spec([&](std::int64_t s, const std::array<int, 6>& kv, const std::array<int, 6>&) {
            cplx f = factor(kv) * inv_n;
            cplx u{spec[s][0], spec[s][1]};
            cplx v = f * u;
            scratch[s][0] = v.real();
            scratch[s][1] = v.imag();
        });
        inverse_to(out);
    }
};

SpectralEngine::SpectralEngine(const GridSpec& g) : grid_(g), impl_(std::make_unique<Impl>(g)) {}
SpectralEngine::~SpectralEngine() = default;

SpectralEngine& SpectralEngine::get(const GridSpec& g) {
    static std::map<std::pair<int, int>, std::unique_ptr<SpectralEngine>> cache;
    auto key = std::make_pair(g.n, g.res);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::unique_ptr<SpectralEngine>(new SpectralEngine(g))).first;
    return *it->second;
}

void SpectralEngine::forward(const ScalarField& u) {
    if (!(u.grid == grid_)) throw GridMismatch("SpectralEngine: grid mismatch");
    std::memcpy(impl_->rbuf, u.v.data(), std::size_t(impl_->nreal) * sizeof(double));
    fftw_execute(impl_->plan_r2c);
}

void SpectralEngine::hessian_component(int j, int k, bool imag_part, ScalarField& out) {
    // H[u]_{jk} multiplier: m = -pi^2 (Kx_j - i Ky_j)(Kx_k + i Ky_k), which
    // satisfies m(-K) = m(K); for real u the real/imaginary parts come from
    // Re(m), Im(m) as real even multipliers.
    impl_->apply(
        [j, k, imag_part](const std::array<int, 6>& kv) -> cplx {
            cplx aj{double(kv[std::size_t(2 * j)]), -double(kv[std::size_t(2 * j + 1)])};
            cplx ak{double(kv[std::size_t(2 * k)]), double(kv[std::size_t(2 * k + 1)])};
            cplx m = -kPi * kPi * aj * ak;
            return imag_part ? cplx{m.imag(), 0.0} : cplx{m.real(), 0.0};
        },
        out);
}

void SpectralEngine::dz_component(int j, bool imag_part, ScalarField& out) {
    // d/dz_j multiplier m = pi (Ky_j + i Kx_j) is odd: Re/Im parts of the
    // derivative have spectra i Im(m) uhat and -i Re(m) uhat.
    impl_->apply(
        [j, imag_part](const std::array<int, 6>& kv) -> cplx {
            double kx = double(kv[std::size_t(2 * j)]);
            double ky = double(kv[std::size_t(2 * j + 1)]);
            if (imag_part) return cplx{0.0, -kPi * ky};
            return cplx{0.0, kPi * kx};
        },
        out);
}

void SpectralEngine::axis_deriv(int axis, ScalarField& out) {
    impl_->apply(
        [axis](const std::array<int, 6>& kv) -> cplx {
            return cplx{0.0, 2.0 * kPi * double(kv[std::size_t(axis)])};
        },
        out);
}

void SpectralEngine::ddc_into(const ScalarField& u, HermitianForm11Field& out) {
    const int n = grid_.n;
    forward(u);
    if (!(out.grid() == grid_)) out = HermitianForm11Field(grid_, true);
    out.densify();
    ScalarField tmp(grid_);
    for (int j = 0; j < n; ++j) {
        hessian_component(j, j, false, tmp);
        auto c = out.component(HermitianForm11Field::diag_component(n, j));
        std::memcpy(c.data(), tmp.v.data(), std::size_t(tmp.size()) * sizeof(double));
    }
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            hessian_component(j, k, false, tmp);
            auto cr = out.component(HermitianForm11Field::offdiag_component(n, j, k, false));
            std::memcpy(cr.data(), tmp.v.data(), std::size_t(tmp.size()) * sizeof(double));
            hessian_component(j, k, true, tmp);
            auto ci = out.component(HermitianForm11Field::offdiag_component(n, j, k, true));
            std::memcpy(ci.data(), tmp.v.data(), std::size_t(tmp.size()) * sizeof(double));
        }
}

HermitianForm11Field SpectralEngine::ddc(const ScalarField& u) {
    HermitianForm11Field h(grid_, true);
    ddc_into(u, h);
    return h;
}

void SpectralEngine::quarter_laplacian(const ScalarField& u, ScalarField& out) {
    forward(u);
    impl_->apply(
        [this](const std::array<int, 6>& kv) -> cplx {
            double s = 0.0;
            for (int d = 0; d < grid_.dims(); ++d) {
                double k = double(kv[std::size_t(d)]);
                s += k * k;
            }
            return cplx{-kPi * kPi * s, 0.0};
        },
        out);
}

void SpectralEngine::precond_solve(const HermitianMatrix& c, double beta, const ScalarField& rhs,
                                   ScalarField& out) {
    if (beta <= 0.0) throw std::invalid_argument("precond_solve: beta must be positive");
    const int n = grid_.n;
    forward(rhs);
    impl_->apply(
        [&c, beta, n](const std::array<int, 6>& kv) -> cplx {
            // symbol of tr(C H[.]) is -pi^2 a^H C a with a_j = Kx_j - i Ky_j
            cplx a[3];
            for (int j = 0; j < n; ++j)
                a[j] = cplx{double(kv[std::size_t(2 * j)]), -double(kv[std::size_t(2 * j + 1)])};
            double quad = 0.0;
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) quad += (std::conj(a[j]) * c(j, k) * a[k]).real();
            return cplx{1.0 / (-kPi * kPi * quad - beta), 0.0};
        },
        out);
}

ScalarField SpectralEngine::band_limited(int kmax, std::uint64_t seed, double amplitude) {
    if (kmax < 1 || kmax >= grid_.res / 2)
        throw std::invalid_argument("band_limited: need 1 <= kmax < res/2");
    const int dims = grid_.dims();
    auto& im = *impl_;
    const int res = grid_.res;
    im.for_each_spec([&](std::int64_t s, const std::array<int, 6>& kv, const std::array<int, 6>& ip) {
        bool in_band = false;
        for (int d = 0; d < dims; ++d)
            if (kv[std::size_t(d)] != 0) in_band = true;
        for (int d = 0; d < dims; ++d)
            if (std::abs(kv[std::size_t(d)]) > kmax || ip[std::size_t(d)] == res / 2) in_band = false;
        if (!in_band) {
            im.scratch[s][0] = im.scratch[s][1] = 0.0;
            return;
        }
        // canonical representative: first nonzero frequency component > 0
        bool flip = false;
        for (int d = 0; d < dims; ++d) {
            int k = kv[std::size_t(d)];
            if (k != 0) {
                flip = (k < 0);
                break;
            }
        }
        std::uint64_t h = seed;
        double mag2 = 0.0;
        for (int d = 0; d < dims; ++d) {
            int k = flip ? -kv[std::size_t(d)] : kv[std::size_t(d)];
            h = mix64(h ^ (std::uint64_t(std::uint32_t(k)) + 0x100ULL * std::uint64_t(d + 1)));
            mag2 += double(k) * double(k);
        }
        double u1 = uniform01(mix64(h ^ 0x1111ULL));
        double u2 = uniform01(mix64(h ^ 0x2222ULL));
        double r = std::sqrt(-2.0 * std::log(u1)) / (1.0 + mag2);
        cplx c = r * cplx{std::cos(2.0 * kPi * u2), std::sin(2.0 * kPi * u2)};
        if (flip) c = std::conj(c);
        im.scratch[s][0] = c.real();
        im.scratch[s][1] = c.imag();
    });
    // self-conjugate points (K == -K on the stored half-spectrum) must carry
    // real coefficients; with every component 0 or Nyquist they are out of
    // band already, so nothing to fix.
    ScalarField u(grid_);
    im.inverse_to(u);
    double m = u.norm_inf();
    if (m > 0.0) u *= amplitude / m;
    return u;
}

void SpectralEngine::truncate(ScalarField& u, int kmax) {
    forward(u);
    impl_->apply(
        [kmax, this](const std::array<int, 6>& kv) -> cplx {
            for (int d = 0; d < grid_.dims(); ++d)
                if (std::abs(kv[std::size_t(d)]) > kmax) return cplx{0.0, 0.0};
            return cplx{1.0, 0.0};
        },
        u);
}

}  // namespace pluripot
