#include "pluripot/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

namespace pluripot {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t x) { return double(x >> 11) * 0x1.0p-53 + 0x1.0p-54; }

/// C^3 bump h * (1 - t^2)^4 on |t| < 1, exactly zero outside.
double bump(double t, double height) {
    if (std::abs(t) >= 1.0) return 0.0;
    double s = 1.0 - t * t;
    double s2 = s * s;
    return height * s2 * s2;
}

/// The bump profile along x_1 sampled on one period.
std::vector<double> bump_line(int res, double center, double halfwidth, double height) {
    std::vector<double> line(std::size_t(res), 0.0);
    for (int i = 0; i < res; ++i) {
        double x = double(i) / res;
        double d = x - center;
        d -= std::round(d);  // periodic distance
        line[std::size_t(i)] = bump(d / halfwidth, height);
    }
    return line;
}

/// Naive 1D DFT round-trip utilities on a res-point circle (res <= 256 here,
/// used only for scenario construction; Nyquist is zeroed to match the
/// spectral engine's convention).
struct Line1D {
    int res;
    std::vector<cplx> hat;  // frequency k in [0, res)

    explicit Line1D(const std::vector<double>& v) : res(int(v.size())), hat(v.size()) {
        for (int k = 0; k < res; ++k) {
            cplx acc{0.0, 0.0};
            for (int x = 0; x < res; ++x) {
                double ph = -2.0 * kPi * double(k) * double(x) / res;
                acc += v[std::size_t(x)] * cplx{std::cos(ph), std::sin(ph)};
            }
            hat[std::size_t(k)] = acc / double(res);
        }
        hat[std::size_t(res / 2)] = cplx{0.0, 0.0};
    }

    double freq(int k) const { return (k <= res / 2) ? double(k) : double(k - res); }

    std::vector<double> inverse() const {
        std::vector<double> v(std::size_t(res), 0.0);
        for (int x = 0; x < res; ++x) {
            cplx acc{0.0, 0.0};
            for (int k = 0; k < res; ++k) {
                double ph = 2.0 * kPi * double(k) * double(x) / res;
                acc += hat[std::size_t(k)] * cplx{std::cos(ph), std::sin(ph)};
            }
            v[std::size_t(x)] = acc.real();
        }
        return v;
    }

    /// Solve u'' = rhs (this object holds rhs-hat); zero mean solution.
    std::vector<double> solve_second_derivative() const {
        Line1D u = *this;
        for (int k = 0; k < res; ++k) {
            double f = freq(k);
            if (k == 0 || k == res / 2)
                u.hat[std::size_t(k)] = cplx{0.0, 0.0};
            else
                u.hat[std::size_t(k)] /= -4.0 * kPi * kPi * f * f;
        }
        return u.inverse();
    }

    /// Band-limited (Nyquist-free) interpolant values on the grid.
    std::vector<double> smoothed() const { return inverse(); }
};

/// Broadcast a function of the slowest axis over the whole grid.
ScalarField broadcast_x1(const GridSpec& g, const std::vector<double>& line) {
    ScalarField out(g);
    const std::int64_t block = g.num_points() / g.res;
    for (int i = 0; i < g.res; ++i)
        std::fill(out.v.begin() + std::size_t(i) * std::size_t(block),
                  out.v.begin() + std::size_t(i + 1) * std::size_t(block), line[std::size_t(i)]);
    return out;
}

/// Broadcast a function of (x_1, y_1) (the two slowest axes).
ScalarField broadcast_z1(const GridSpec& g, const std::vector<double>& plane) {
    ScalarField out(g);
    const std::int64_t block = g.num_points() / (std::int64_t(g.res) * g.res);
    for (std::int64_t p = 0; p < std::int64_t(g.res) * g.res; ++p)
        std::fill(out.v.begin() + std::size_t(p) * std::size_t(block),
                  out.v.begin() + std::size_t(p + 1) * std::size_t(block), plane[std::size_t(p)]);
    return out;
}

Scenario make_flat_kahler(const GridSpec& g, std::uint64_t seed) {
    Scenario s;
    s.name = "flat_kahler";
    s.grid = g;
    s.seed = seed;
    s.omega = HermitianForm11Field::uniform(g, HermitianMatrix::identity(g.n));
    s.omega_X = s.omega;
    s.omega_closed = true;
    s.min_eigenvalue = 1.0;
    return s;
}

Scenario make_guan_li(const GridSpec& g, double amplitude, std::uint64_t seed) {
    if (amplitude <= 0.0) amplitude = 0.2;
    Scenario s;
    s.name = "guan_li_closed";
    s.grid = g;
    s.seed = seed;
    s.params["amplitude"] = amplitude;
    double diag[3] = {1.0, 1.3, 0.8};
    HermitianMatrix base = HermitianMatrix::diagonal(std::span<const double>(diag, std::size_t(g.n)));
    auto& eng = SpectralEngine::get(g);
    int kmax = std::min(3, g.res / 8);
    ScalarField rho = eng.band_limited(kmax, seed, amplitude);
    HermitianForm11Field omega = eng.ddc(rho);
    omega.axpy(1.0, HermitianForm11Field::uniform(g, base));
    double base_min = (g.n >= 3) ? 0.8 : 1.0;
    auto [m, arg] = omega.min_eigenvalue_scan();
    (void)arg;
    if (m < 0.3) {
        // rescale the potential; min eigenvalue is concave in the scale
        double t = (base_min - 0.3) / (base_min - m);
        rho *= t;
        omega = eng.ddc(rho);
        omega.axpy(1.0, HermitianForm11Field::uniform(g, base));
        std::tie(m, arg) = omega.min_eigenvalue_scan();
        if (m < 0.25) throw BuildError("guan_li_closed: positivity rescue failed");
    }
    s.omega = std::move(omega);
    s.omega_closed = true;
    s.min_eigenvalue = m;
    // reference metric with omega <= omega_X / 2
    double mx = 0.0;
    const std::int64_t np = g.num_points();
    for (std::int64_t i = 0; i < np; ++i) mx = std::max(mx, s.omega.at(i).max_eigenvalue());
    HermitianMatrix id = HermitianMatrix::identity(g.n);
    id *= 2.0 * (mx + 0.1);
    s.omega_X = HermitianForm11Field::uniform(g, id);
    s.params["omega_X_scale"] = 2.0 * (mx + 0.1);
    return s;
}

Scenario make_nonclosed(const GridSpec& g, double amplitude, std::uint64_t seed) {
    if (amplitude <= 0.0) amplitude = 0.3;
    Scenario s;
    s.name = "nonclosed_hermitian";
    s.grid = g;
    s.seed = seed;
    s.params["amplitude"] = amplitude;
    auto& eng = SpectralEngine::get(g);
    int kmax = std::min(3, g.res / 8);
    const int n = g.n;
    HermitianForm11Field omega(g, true);
    std::uint64_t c = 0;
    for (int j = 0; j < n; ++j) {
        ScalarField f = eng.band_limited(kmax, mix64(seed + 1000 * ++c), amplitude);
        auto dst = omega.component(HermitianForm11Field::diag_component(n, j));
        for (std::int64_t i = 0; i < f.size(); ++i) dst[std::size_t(i)] = 1.0 + f[i];
    }
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            for (int part = 0; part < 2; ++part) {
                ScalarField f = eng.band_limited(kmax, mix64(seed + 1000 * ++c), amplitude);
                auto dst = omega.component(HermitianForm11Field::offdiag_component(n, j, k, part == 1));
                for (std::int64_t i = 0; i < f.size(); ++i) dst[std::size_t(i)] = f[i];
            }
    auto [m, arg] = omega.min_eigenvalue_scan();
    (void)arg;
    if (m < 0.5) {
        // shrink the perturbation S = omega - I toward the identity
        double t = 0.5 / (1.0 - m);
        const std::int64_t np = g.num_points();
        for (std::int64_t i = 0; i < np; ++i) {
            HermitianMatrix mm = omega.at(i);
            mm -= HermitianMatrix::identity(n);
            mm *= t;
            mm += HermitianMatrix::identity(n);
            omega.set(i, mm);
        }
        std::tie(m, arg) = omega.min_eigenvalue_scan();
        if (m < 0.5 - 1e-9) throw BuildError("nonclosed_hermitian: positivity rescue failed");
        s.params["rescale"] = t;
    }
    s.omega = std::move(omega);
    s.omega_X = HermitianForm11Field::uniform(g, HermitianMatrix::identity(n));
    s.min_eigenvalue = m;
    return s;
}

Scenario make_nef_degenerate(const GridSpec& g, double amplitude, std::uint64_t seed) {
    (void)amplitude;
    Scenario s;
    s.name = "nef_degenerate";
    s.grid = g;
    s.seed = seed;
    auto& eng = SpectralEngine::get(g);
    int kmax = std::min(3, g.res / 8);
    ScalarField f = eng.band_limited(kmax, seed, 1.0);
    HermitianForm11Field h = eng.ddc(f);
    auto [hmin, arg] = h.min_eigenvalue_scan();
    (void)arg;
    if (hmin >= -1e-12) throw BuildError("nef_degenerate: generator has no negative curvature");
    double tstar = -1.0 / hmin;
    f *= tstar;
    HermitianForm11Field omega = eng.ddc(f);
    omega.axpy(1.0, HermitianForm11Field::uniform(g, HermitianMatrix::identity(g.n)));
    auto [m, arg2] = omega.min_eigenvalue_scan();
    (void)arg2;
    s.params["t_star"] = tstar;
    s.omega = std::move(omega);
    s.omega_closed = true;
    s.omega_degenerate = true;
    s.min_eigenvalue = m;
    double mx = 0.0;
    const std::int64_t np = g.num_points();
    for (std::int64_t i = 0; i < np; ++i) mx = std::max(mx, s.omega.at(i).max_eigenvalue());
    HermitianMatrix id = HermitianMatrix::identity(g.n);
    id *= 2.0 * (mx + 0.1);
    s.omega_X = HermitianForm11Field::uniform(g, id);
    s.params["omega_X_scale"] = 2.0 * (mx + 0.1);
    return s;
}

Scenario make_product_collapsing(const GridSpec& g, double amplitude, std::uint64_t seed) {
    if (g.n != 2)
        throw BuildError("product_collapsing: defined for n = 2 (a product of two curves)");
    if (amplitude <= 0.0) amplitude = 0.4;
    Scenario s;
    s.name = "product_collapsing";
    s.grid = g;
    s.seed = seed;
    s.has_bump = true;
    s.bump_center = 0.5;
    s.bump_halfwidth = 0.125;
    s.bump_height = amplitude;
    auto line = bump_line(g.res, s.bump_center, s.bump_halfwidth, s.bump_height);
    double mean = 0.0;
    for (double v : line) mean += v;
    mean /= g.res;
    s.bump_mean = mean;
    s.params["bump_height"] = amplitude;
    s.params["bump_halfwidth"] = s.bump_halfwidth;
    s.params["bump_mean"] = mean;
    HermitianForm11Field omega(g, true);
    ScalarField rho = broadcast_x1(g, line);
    for (int j = 0; j < 2; ++j) {
        auto dst = omega.component(HermitianForm11Field::diag_component(2, j));
        for (std::int64_t i = 0; i < rho.size(); ++i) dst[std::size_t(i)] = rho[i];
    }
    s.omega = std::move(omega);
    s.omega_X = HermitianForm11Field::uniform(g, HermitianMatrix::identity(2));
    s.omega_degenerate = true;
    s.min_eigenvalue = 0.0;
    return s;
}

}  // namespace

HermitianForm11Field Scenario::omega_eps(double eps) const {
    HermitianForm11Field w = omega;
    w.axpy(eps, omega_X);
    return w;
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"flat_kahler", "guan_li_closed",
                                                   "nonclosed_hermitian", "nef_degenerate",
                                                   "product_collapsing"};
    return names;
}

Scenario build_scenario(const std::string& name, const GridSpec& g, double amplitude,
                        std::uint64_t seed) {
    if (name == "flat_kahler") return make_flat_kahler(g, seed);
    if (name == "guan_li_closed") return make_guan_li(g, amplitude, seed);
    if (name == "nonclosed_hermitian") return make_nonclosed(g, amplitude, seed);
    if (name == "nef_degenerate") return make_nef_degenerate(g, amplitude, seed);
    if (name == "product_collapsing") return make_product_collapsing(g, amplitude, seed);
    throw BuildError("unknown scenario: " + name);
}

ConditionBResult condition_b_constant(const Scenario& s, int directions, double tol) {
    ConditionBResult r;
    const GridSpec& g = s.grid;
    if (g.n == 1) {
        r.closed_by_construction = true;  // degree reasons: dd^c omega = 0
        return r;
    }
    if (s.omega_closed) {
        r.closed_by_construction = true;
        r.measured_defect = -1.0;
        if (g.n == 2) {
            FormField w = FormField::from_hermitian_field(s.omega);
            double defect = 0.0;
            ScalarField d = top_density_field(ddc_form(w), &defect);
            r.measured_defect = std::max(d.norm_inf(), defect);
        }
        return r;
    }
    if (g.n == 2) {
        FormField w = FormField::from_hermitian_field(s.omega);
        ScalarField q1 = top_density_field(ddc_form(w));
        ScalarField q2 = det_density(s.omega);
        double b = 0.0;
        for (std::int64_t i = 0; i < q1.size(); ++i) {
            if (q2[i] <= tol) {
                if (std::abs(q1[i]) > tol) {
                    r.finite = false;
                    r.worst_point_ddc = i;
                }
                continue;
            }
            double ratio = std::abs(q1[i]) / q2[i];
            if (ratio > b) {
                b = ratio;
                r.worst_point_ddc = i;
            }
        }
        r.b_ddc = b;
        r.b_wedge = 0.0;  // (3,3)-form identically zero in n = 2
        r.b = r.finite ? b : std::numeric_limits<double>::infinity();
        return r;
    }
    // n = 3: pairing-matrix pencil for the (2,2) inequality ...
    HermitianForm11Field a1 = ddc_pairing_field(s.omega);
    HermitianForm11Field d2 = square_pairing_field(s.omega);
    const std::int64_t np = g.num_points();
    double b1 = 0.0;
    for (std::int64_t i = 0; i < np; ++i) {
        HermitianMatrix am = a1.at(i);
        HermitianMatrix dm = d2.at(i);
        if (dm.min_eigenvalue() <= tol) {
            if (am.norm_inf() > tol) {
                r.finite = false;
                r.worst_point_ddc = i;
            }
            continue;
        }
        auto mu = generalized_eigenvalues(am, dm);
        double m = std::max(std::abs(mu[0]), std::abs(mu[2]));
        if (m > b1) {
            b1 = m;
            r.worst_point_ddc = i;
        }
    }
    r.b_ddc = b1;
    // certificate: worst sampled direction at the worst point
    {
        auto dirs = direction_sample(3, directions);
        HermitianMatrix am = a1.at(r.worst_point_ddc);
        HermitianMatrix dm = d2.at(r.worst_point_ddc);
        double worst = 0.0;
        for (int di = 0; di < int(dirs.size()); ++di) {
            cplx num{0.0, 0.0}, den{0.0, 0.0};
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    cplx w = std::conj(dirs[std::size_t(di)][std::size_t(j)]) *
                             dirs[std::size_t(di)][std::size_t(k)];
                    num += w * am(j, k);
                    den += w * dm(j, k);
                }
            if (den.real() > tol) {
                double ratio = std::abs(num.real()) / den.real();
                if (ratio > worst) {
                    worst = ratio;
                    r.worst_direction_ddc = di;
                }
            }
        }
    }
    // ... and the top-degree inequality for d omega ^ d^c omega
    ScalarField q = d_dc_wedge_density(s.omega);
    ScalarField q3 = det_density(s.omega);
    double b2 = 0.0;
    for (std::int64_t i = 0; i < np; ++i) {
        if (q3[i] <= tol) {
            if (std::abs(q[i]) > tol) {
                r.finite = false;
                r.worst_point_wedge = i;
            }
            continue;
        }
        double ratio = std::abs(q[i]) / q3[i];
        if (ratio > b2) {
            b2 = ratio;
            r.worst_point_wedge = i;
        }
    }
    r.b_wedge = b2;
    r.b = r.finite ? std::max(b1, b2) : std::numeric_limits<double>::infinity();
    return r;
}

namespace {

PshSample collapsing_fallback_sample(const Scenario& s, std::uint64_t seed, int max_freq) {
    const GridSpec& g = s.grid;
    const int res = g.res;
    auto line = bump_line(res, s.bump_center, s.bump_halfwidth, s.bump_height);
    // base generator: u0(x_1) with u0'' = 4 (mean - rho); then
    // (1/4) Lap_1 u0 = mean - rho_tilde, positive wherever rho = 0.
    std::vector<double> rhs(std::size_t(res), 0.0);
    for (int i = 0; i < res; ++i) rhs[std::size_t(i)] = 4.0 * (s.bump_mean - line[std::size_t(i)]);
    Line1D rhs_hat(rhs);
    std::vector<double> u0 = rhs_hat.solve_second_derivative();
    Line1D rho_hat(line);
    std::vector<double> rho_smooth = rho_hat.smoothed();

    // seeded z_1-only perturbation g(x_1, y_1), curvature capped at mean/2
    int kmax = std::max(1, std::min(max_freq, res / 8));
    std::vector<double> plane(std::size_t(res) * res, 0.0);
    std::vector<double> h11(std::size_t(res) * res, 0.0);  // (1/4) Lap_1 of the plane
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 < 0 || (k1 == 0 && k2 <= 0)) continue;  // one per conjugate pair
            std::uint64_t h = mix64(seed ^ (std::uint64_t(std::uint32_t(k1)) << 32 |
                                            std::uint64_t(std::uint32_t(k2))));
            double amp = std::sqrt(-2.0 * std::log(uniform01(mix64(h ^ 0x5c5cULL)))) /
                         (1.0 + double(k1 * k1 + k2 * k2));
            double phase = 2.0 * kPi * uniform01(mix64(h ^ 0xa3a3ULL));
            double lap = -kPi * kPi * double(k1 * k1 + k2 * k2);
            for (int x = 0; x < res; ++x)
                for (int y = 0; y < res; ++y) {
                    double ph = 2.0 * kPi * (double(k1) * x + double(k2) * y) / res + phase;
                    double c = amp * std::cos(ph);
                    plane[std::size_t(x) * std::size_t(res) + std::size_t(y)] += c;
                    h11[std::size_t(x) * std::size_t(res) + std::size_t(y)] += lap * c;
                }
        }
    double hmax = 0.0;
    for (double v : h11) hmax = std::max(hmax, std::abs(v));
    double delta = (hmax > 0.0) ? s.bump_mean / (2.0 * hmax) : 0.0;

    // t*: rho + t * H11 >= 0 pointwise, with H11 = (mean - rho_tilde) + delta h11
    double tstar = std::numeric_limits<double>::infinity();
    for (int x = 0; x < res; ++x)
        for (int y = 0; y < res; ++y) {
            double h11v = (s.bump_mean - rho_smooth[std::size_t(x)]) +
                          delta * h11[std::size_t(x) * std::size_t(res) + std::size_t(y)];
            if (h11v < -1e-14) tstar = std::min(tstar, line[std::size_t(x)] / (-h11v));
        }
    if (!std::isfinite(tstar)) tstar = 1.0;

    PshSample out;
    out.fallback = true;
    out.seed = seed;
    out.t_star = tstar;
    std::vector<double> fplane(std::size_t(res) * res);
    for (int x = 0; x < res; ++x)
        for (int y = 0; y < res; ++y)
            fplane[std::size_t(x) * std::size_t(res) + std::size_t(y)] =
                u0[std::size_t(x)] + delta * plane[std::size_t(x) * std::size_t(res) + std::size_t(y)];
    out.u = broadcast_z1(g, fplane);
    out.u *= 0.9 * tstar;
    out.sup_offset = out.u.sup();
    out.u += -out.sup_offset;
    return out;
}

}  // namespace

PshSample make_psh_sample(const Scenario& s, std::uint64_t seed, int max_freq) {
    if (s.name == "product_collapsing") return collapsing_fallback_sample(s, seed, max_freq);
    if (s.min_eigenvalue <= 1e-6)
        throw BuildError("sample_psh: omega is degenerate; sample against omega_eps instead");
    return make_psh_sample_for(s.omega, seed, max_freq);
}

/// Smallest generalized eigenvalue of the pencil (H, M) over the grid,
/// hand-coded for n = 1, 2 (generic fallback for n = 3).
double min_pencil_eigenvalue_scan(const HermitianForm11Field& omega,
                                  const HermitianForm11Field& h) {
    const GridSpec& g = omega.grid();
    const std::int64_t np = g.num_points();
    const int n = g.n;
    double mu_min = 0.0;
    const bool uni = omega.is_uniform();
    if (n == 1) {
        auto hv = h.component(0);
        if (uni) {
            double m = omega.uniform_value()(0, 0).real();
            for (std::int64_t i = 0; i < np; ++i)
                mu_min = std::min(mu_min, hv[std::size_t(i)] / m);
        } else {
            auto mv = omega.component(0);
            for (std::int64_t i = 0; i < np; ++i)
                mu_min = std::min(mu_min, hv[std::size_t(i)] / mv[std::size_t(i)]);
        }
        return mu_min;
    }
    if (n == 2) {
        auto h00 = h.component(0), h11 = h.component(1), hr = h.component(2), hi = h.component(3);
        auto pick = [&](std::span<const double> arr, double c, std::int64_t i) {
            return uni ? c : arr[std::size_t(i)];
        };
        std::span<const double> m00, m11, mr, mi;
        double c00 = 0, c11 = 0, cr = 0, ci = 0;
        if (uni) {
            const HermitianMatrix& m = omega.uniform_value();
            c00 = m(0, 0).real();
            c11 = m(1, 1).real();
            cr = m(0, 1).real();
            ci = m(0, 1).imag();
        } else {
            m00 = omega.component(0);
            m11 = omega.component(1);
            mr = omega.component(2);
            mi = omega.component(3);
        }
        for (std::int64_t i = 0; i < np; ++i) {
            double a00 = pick(m00, c00, i), a11 = pick(m11, c11, i);
            double ar = pick(mr, cr, i), ai = pick(mi, ci, i);
            double b00 = h00[std::size_t(i)], b11 = h11[std::size_t(i)];
            double br = hr[std::size_t(i)], bi = hi[std::size_t(i)];
            double detm = a00 * a11 - ar * ar - ai * ai;
            double mixed = b00 * a11 + b11 * a00 - 2.0 * (br * ar + bi * ai);
            double deth = b00 * b11 - br * br - bi * bi;
            double disc = mixed * mixed - 4.0 * detm * deth;
            if (disc < 0.0) disc = 0.0;
            double mu = (mixed - std::sqrt(disc)) / (2.0 * detm);
            if (mu < mu_min) mu_min = mu;
        }
        return mu_min;
    }
    HermitianMatrix m0 = uni ? omega.uniform_value() : HermitianMatrix(n);
    for (std::int64_t i = 0; i < np; ++i) {
        const HermitianMatrix& m = uni ? m0 : (m0 = omega.at(i));
        mu_min = std::min(mu_min, generalized_eigenvalues(h.at(i), m)[0]);
    }
    return mu_min;
}

PshSample make_psh_sample_with_hessian(const HermitianForm11Field& omega, std::uint64_t seed,
                                       int max_freq, HermitianForm11Field* hess_out) {
    const GridSpec& g = omega.grid();
    if (max_freq > g.res / 8) throw BuildError("sample_psh: max_freq must be <= res/8");
    auto& eng = SpectralEngine::get(g);
    ScalarField f = eng.band_limited(max_freq, seed, 1.0);
    HermitianForm11Field h = eng.ddc(f);
    double mu = min_pencil_eigenvalue_scan(omega, h);
    double tstar = (mu < -1e-14) ? -1.0 / mu : 1.0;
    PshSample out;
    out.seed = seed;
    out.t_star = tstar;
    out.u = std::move(f);
    out.u *= 0.9 * tstar;
    out.sup_offset = out.u.sup();
    out.u += -out.sup_offset;
    if (hess_out) {
        for (int c = 0; c < HermitianForm11Field::num_components(g.n); ++c) {
            auto a = h.component(c);
            for (auto& x : a) x *= 0.9 * tstar;
        }
        *hess_out = std::move(h);
    }
    return out;
}

PshSample make_psh_sample_for(const HermitianForm11Field& omega, std::uint64_t seed, int max_freq) {
    return make_psh_sample_with_hessian(omega, seed, max_freq, nullptr);
}

std::vector<PshSample> sample_psh(const Scenario& s, int count, std::uint64_t seed, int max_freq) {
    std::vector<PshSample> out;
    out.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i) out.push_back(make_psh_sample(s, mix64(seed + std::uint64_t(i)), max_freq));
    return out;
}

std::vector<PshSample> sample_psh_for(const HermitianForm11Field& omega, int count,
                                      std::uint64_t seed, int max_freq) {
    std::vector<PshSample> out;
    out.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i)
        out.push_back(make_psh_sample_for(omega, mix64(seed + std::uint64_t(i)), max_freq));
    return out;
}

PshCheck is_omega_psh(const HermitianForm11Field& omega, const ScalarField& u, double tol) {
    HermitianForm11Field w = omega_plus_ddc(omega, u);
    auto [m, arg] = w.min_eigenvalue_scan();
    return {m >= -tol, m, arg};
}

PshCheck is_omega_psh(const Scenario& s, const ScalarField& u, double tol) {
    return is_omega_psh(s.omega, u, tol);
}

}  // namespace pluripot
