#include "pluripot/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <chrono>
#include <cstdlib>
#include <numbers>
#include <limits>

namespace pluripot {

namespace {

// Exponent saturation: psi(t) = t for t >> -L, psi -> -L as t -> -inf.
// Where beta (phi - h) drops below -L the scheme equation det W =
// det M e^{beta(phi-h)} produces densities far below the spectral round-off
// noise of the assembled Hessian (~1e-11 at res 256), making the
// log-residual unresolvable; saturating the exponent enforces det W =
// e^{-L} det M ~ 6e-6 det M there instead, the smallest "numerical zero"
// whose log is still computable to ~2e-6. The induced orthogonality-defect
// floor e^{-L} * mass is 16x below the tightest acceptance tolerance.
constexpr double kExpFloor = 12.0;

// The floor is reached gradually along the beta ladder: with a fixed L the
// rung where beta (phi - h) first dives below -L is violently nonlinear in
// the wells (log det changes by ~L in one rung) and damped Newton crawls;
// tying L to beta deepens the wells by only ~log(rung ratio) per rung.
double exp_floor(double beta) { return std::min(kExpFloor, 2.0 + std::log1p(beta)); }

double softplus(double x) { return (x > 0.0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double psi(double t, double el) { return -el + softplus(t + el); }
double psi_prime(double t, double el) {
    double x = t + el;
    return (x > 0.0) ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double dot(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double nrm2(const ScalarField& a) { return std::sqrt(dot(a, a)); }

/// One damped-Newton solve of det(M+H[phi]) = e^{psi(beta(phi-h))} det(M)
/// at a fixed beta; phi is updated in place.
struct BetaSolver {
    const HermitianForm11Field& omega;
    const ScalarField& h;
    const ScalarField& logdetM;
    SpectralEngine& eng;
    NewtonOptions opts;

    HermitianForm11Field W, Wtrial, A;
    ScalarField r, rtrial, zc, delta;
    // pointwise scale of A = W^{-1} (huge where the density vanishes); the
    // preconditioner works on the rescaled operator, whose second-order
    // coefficients are O(1) everywhere
    ScalarField sfield;
    // bicgstab workspace
    ScalarField bp, bv, bs, bt, br, br0, by, bz, bw, htmp;
    int last_bicg_iters = 0;
    double last_bicg_rel = 0.0;

    explicit BetaSolver(const HermitianForm11Field& om, const ScalarField& h_,
                        const ScalarField& ldm, const NewtonOptions& o)
        : omega(om), h(h_), logdetM(ldm), eng(SpectralEngine::get(om.grid())), opts(o) {}

    bool eval(const ScalarField& phi, double beta, HermitianForm11Field& Wout, ScalarField& rout,
              double* sup) {
        const GridSpec& g = omega.grid();
        eng.ddc_into(phi, Wout);
        Wout.axpy(1.0, omega);
        if (!(rout.grid == g)) rout = ScalarField(g);
        const std::int64_t np = g.num_points();
        const double el = exp_floor(beta);
        double rn = 0.0;
        for (std::int64_t i = 0; i < np; ++i) {
            HermitianMatrix m = Wout.at(i);
            double det = m.det_real();
            if (!(det > 0.0)) return false;
            if (m.min_eigenvalue() < -opts.cone_tol * (1.0 + m.norm_inf())) return false;
            double ri = std::log(det) - logdetM[i] - psi(beta * (phi[i] - h[i]), el);
            rout[i] = ri;
            rn = std::max(rn, std::abs(ri));
        }
        *sup = rn;
        return rn == rn;  // reject NaN
    }

    void build_inverse() {
        const std::int64_t np = omega.grid().num_points();
        if (!(A.grid() == omega.grid())) A = HermitianForm11Field(omega.grid(), true);
        for (std::int64_t i = 0; i < np; ++i) A.set(i, W.at(i).inverse());
    }

    // out = tr(A H[x]) - zc * x
    void apply(const ScalarField& x, ScalarField& out) {
        const GridSpec& g = omega.grid();
        const int n = g.n;
        if (!(out.grid == g)) out = ScalarField(g);
        if (!(htmp.grid == g)) htmp = ScalarField(g);
        const std::int64_t np = g.num_points();
        for (std::int64_t i = 0; i < np; ++i) out[i] = -zc[i] * x[i];
        eng.forward(x);
        for (int j = 0; j < n; ++j) {
            eng.hessian_component(j, j, false, htmp);
            auto a = A.component(HermitianForm11Field::diag_component(n, j));
            for (std::int64_t i = 0; i < np; ++i) out[i] += a[std::size_t(i)] * htmp[i];
        }
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (int part = 0; part < 2; ++part) {
                    eng.hessian_component(j, k, part == 1, htmp);
                    auto a = A.component(
                        HermitianForm11Field::offdiag_component(n, j, k, part == 1));
                    for (std::int64_t i = 0; i < np; ++i)
                        out[i] += 2.0 * a[std::size_t(i)] * htmp[i];
                }
    }

    // (L x)/s: the raw operator's rows scale like s = tr(W^{-1})/n, which
    // varies by e^{kExpFloor}; dividing by s leaves an elliptic operator with
    // O(1) coefficients that the constant-coefficient model preconditions well
    void apply_scaled(const ScalarField& x, ScalarField& out) {
        apply(x, out);
        const std::int64_t np = omega.grid().num_points();
        for (std::int64_t i = 0; i < np; ++i) out[i] /= sfield[i];
    }

    /// Right-preconditioned BiCGStab for the row-rescaled system
    /// apply(x)/s = b/s, x initialized to 0. The iteration runs on the
    /// rescaled system, but convergence is judged in the unscaled norm the
    /// Newton damping uses.
    void solve_linear(const ScalarField& b, const HermitianMatrix& cbar, double beta_bar,
                      ScalarField& x) {
        const GridSpec& g = omega.grid();
        const std::int64_t np = g.num_points();
        if (!(x.grid == g)) x = ScalarField(g);
        std::fill(x.v.begin(), x.v.end(), 0.0);
        if (!(bw.grid == g)) bw = ScalarField(g);
        for (std::int64_t i = 0; i < np; ++i) bw[i] = b[i] / sfield[i];
        auto unscaled = [&](const ScalarField& f) {
            double acc = 0.0;
            for (std::int64_t i = 0; i < np; ++i) {
                double u = f[i] * sfield[i];
                acc += u * u;
            }
            return std::sqrt(acc);
        };
        double bnorm = nrm2(b);
        if (bnorm == 0.0) return;
        double tol = std::max(opts.forcing, 1e-10) * bnorm;
        br = bw;
        br0 = bw;
        if (!(bp.grid == g)) bp = ScalarField(g);
        std::fill(bp.v.begin(), bp.v.end(), 0.0);
        if (!(bv.grid == g)) bv = ScalarField(g);
        std::fill(bv.v.begin(), bv.v.end(), 0.0);
        double rho = 1.0, alpha = 1.0, wrel = 1.0;
        for (int it = 0; it < opts.bicg_max; ++it) {
            double rho1 = dot(br0, br);
            if (std::abs(rho1) < 1e-300) {  // breakdown: restart
                br0 = br;
                rho1 = dot(br0, br);
                if (std::abs(rho1) < 1e-300) break;
            }
            double betac = (it == 0) ? 0.0 : (rho1 / rho) * (alpha / wrel);
            rho = rho1;
            for (std::int64_t i = 0; i < np; ++i)
                bp[i] = br[i] + betac * (bp[i] - wrel * bv[i]);
            eng.precond_solve(cbar, beta_bar, bp, by);
            apply_scaled(by, bv);
            double denom = dot(br0, bv);
            if (std::abs(denom) < 1e-300) break;
            alpha = rho / denom;
            if (!(bs.grid == g)) bs = ScalarField(g);
            for (std::int64_t i = 0; i < np; ++i) bs[i] = br[i] - alpha * bv[i];
            if (unscaled(bs) <= tol) {
                for (std::int64_t i = 0; i < np; ++i) x[i] += alpha * by[i];
                last_bicg_iters = it;
                last_bicg_rel = unscaled(bs) / bnorm;
                return;
            }
            eng.precond_solve(cbar, beta_bar, bs, bz);
            apply_scaled(bz, bt);
            double tt = dot(bt, bt);
            if (tt < 1e-300) break;
            wrel = dot(bt, bs) / tt;
            for (std::int64_t i = 0; i < np; ++i) x[i] += alpha * by[i] + wrel * bz[i];
            for (std::int64_t i = 0; i < np; ++i) br[i] = bs[i] - wrel * bt[i];
            last_bicg_iters = it;
            last_bicg_rel = unscaled(br) / bnorm;
            if (unscaled(br) <= tol) return;
        }
        // fall through with the best available x; Newton damping copes
    }

    // Weighted pointwise inversion of psi where the sigmoid band dominates:
    // phi_i <- phi_i + psi'(x_i) (psi^{-1}(psi(x_i) + r_i) - x_i)/beta.
    // In the band this zeroes the residual up to an O(r/beta) elliptic
    // feedback; wells (psi' ~ 0) are untouched and left to Newton. Uses the
    // residual r from the last eval; accepts only a non-increasing sup norm.
    double project_band(ScalarField& phi, double beta, double rn) {
        const GridSpec& g = omega.grid();
        const std::int64_t np = g.num_points();
        // worthwhile only when the zeroth-order term dominates the spectral
        // Hessian scale; otherwise the elliptic feedback of the pointwise
        // update is large and the sweep just gets rejected
        const double pr = std::numbers::pi * double(g.res);
        if (beta <= pr * pr) return rn;
        const double el = exp_floor(beta);
        double t = 1.0;
        for (int attempt = 0; attempt < 2; ++attempt, t *= 0.5) {
            ScalarField trial = phi;
            for (std::int64_t i = 0; i < np; ++i) {
                double x = beta * (phi[i] - h[i]);
                double w = psi_prime(x, el);
                if (w < 1e-6) continue;
                double z = psi(x, el) + r[i] + el;  // target softplus(x + el)
                double xt = (z > 30.0) ? z - el
                                       : std::log(std::expm1(std::max(z, 1e-300))) - el;
                trial[i] += t * w * (xt - x) / beta;
            }
            double rn_t = 0.0;
            if (!eval(trial, beta, Wtrial, rtrial, &rn_t)) continue;
            if (rn_t <= rn) {
                phi = std::move(trial);
                std::swap(W, Wtrial);
                std::swap(r, rtrial);
                return rn_t;
            }
        }
        return rn;
    }

    /// Returns the Newton iteration count; throws SchemeError on failure.
    int run(ScalarField& phi, double beta, double* final_residual) {
        const GridSpec& g = omega.grid();
        const std::int64_t np = g.num_points();
        const double el_run = exp_floor(beta);
        double rn = 0.0;
        if (!eval(phi, beta, W, r, &rn))
            throw SchemeError("envelope: infeasible iterate entering beta rung", -1.0);
        std::vector<double> rn_hist;
        int it = 0;
        for (; it < opts.max_newton && rn > opts.tol; ++it) {
            // a rung making steady linear progress is cheaper to finish than
            // to subdivide; give up only on genuine stagnation
            rn_hist.push_back(rn);
            if (it >= 8 && rn > 100.0 * opts.tol &&
                rn > 0.85 * rn_hist[std::size_t(it) - 4])
                throw SchemeError("envelope: stagnating Newton at beta=" +
                                      std::to_string(beta),
                                  rn);
            rn = project_band(phi, beta, rn);
            if (rn <= opts.tol) break;
            build_inverse();
            if (!(zc.grid == g)) zc = ScalarField(g);
            if (!(sfield.grid == g)) sfield = ScalarField(g);
            HermitianMatrix cbar(g.n);
            for (std::int64_t i = 0; i < np; ++i)
                zc[i] = beta * psi_prime(beta * (phi[i] - h[i]), el_run);
            {
                const int n = g.n;
                for (std::int64_t i = 0; i < np; ++i) {
                    double tr = 0.0;
                    for (int j = 0; j < n; ++j)
                        tr += A.component(HermitianForm11Field::diag_component(n, j))
                                  [std::size_t(i)];
                    sfield[i] = std::max(tr / double(n), 1e-30);
                }
            }
            {
                // mean of W^{-1}/s as the constant-coefficient preconditioner
                const int n = g.n;
                for (int c = 0; c < HermitianForm11Field::num_components(n); ++c) {
                    auto a = A.component(c);
                    double m = 0.0;
                    for (std::int64_t i = 0; i < np; ++i) m += a[std::size_t(i)] / sfield[i];
                    m /= double(np);
                    // map component index back into the matrix
                    bool placed = false;
                    for (int j = 0; j < n && !placed; ++j)
                        if (c == HermitianForm11Field::diag_component(n, j)) {
                            cbar(j, j) = m;
                            placed = true;
                        }
                    for (int j = 0; j < n && !placed; ++j)
                        for (int k = j + 1; k < n && !placed; ++k)
                            for (int part = 0; part < 2; ++part)
                                if (c == HermitianForm11Field::offdiag_component(n, j, k,
                                                                                part == 1)) {
                                    cplx cur = cbar(j, k);
                                    if (part == 1)
                                        cbar(j, k) = cplx{cur.real(), m};
                                    else
                                        cbar(j, k) = cplx{m, cur.imag()};
                                    cbar(k, j) = std::conj(cbar(j, k));
                                    placed = true;
                                }
                }
                // guard: keep the preconditioner safely positive definite
                double mev = cbar.min_eigenvalue();
                if (mev < 1e-8)
                    for (int j = 0; j < g.n; ++j) cbar(j, j) += (1e-8 - mev);
            }
            double zbar = 0.0;
            for (std::int64_t i = 0; i < np; ++i) zbar += zc[i] / sfield[i];
            zbar = std::max(1.0, zbar / double(np));
            for (std::int64_t i = 0; i < np; ++i) r[i] = -r[i];
            solve_linear(r, cbar, zbar, delta);
            for (std::int64_t i = 0; i < np; ++i) r[i] = -r[i];

            if (std::getenv("PLURIPOT_DEBUG")) {
                ScalarField lr;
                apply(delta, lr);
                double lrn = 0.0;
                for (std::int64_t i = 0; i < np; ++i)
                    lrn = std::max(lrn, std::abs(lr[i] - r[i] * -1.0));
                static const auto t0 = std::chrono::steady_clock::now();
                double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
                std::fprintf(stderr,
                             "  [%7.2fs] newton it=%d res=%d beta=%g rn=%g |delta|=%g linres=%g "
                             "bicg=%d rel=%g\n",
                             el, it, g.res, beta, rn, delta.norm_inf(), lrn, last_bicg_iters,
                             last_bicg_rel);
            }
            // large log-residuals overshoot the exponential nonlinearity at
            // full step; start the backtracking where the model is trusted
            double t = std::min(1.0, 3.0 / std::max(rn, 3.0));
            bool accepted = false;
            double best_rn = rn;
            for (int bt_i = 0; bt_i <= opts.max_backtrack; ++bt_i, t *= 0.5) {
                ScalarField trial = phi;
                for (std::int64_t i = 0; i < np; ++i) trial[i] += t * delta[i];
                double rn_t = 0.0;
                if (!eval(trial, beta, Wtrial, rtrial, &rn_t)) continue;
                if (rn_t <= (1.0 - 0.25 * t) * rn || rn_t < best_rn) {
                    phi = std::move(trial);
                    std::swap(W, Wtrial);
                    std::swap(r, rtrial);
                    rn = rn_t;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                // round-off floor of the log-residual: accept a stall only
                // within 10x the requested tolerance
                if (rn <= 10.0 * opts.tol) break;
                throw SchemeError("envelope: Newton damping exhausted at beta=" +
                                      std::to_string(beta),
                                  rn);
            }
        }
        if (rn > 10.0 * opts.tol)
            throw SchemeError("envelope: Newton did not reach tolerance at beta=" +
                                  std::to_string(beta),
                              rn);
        *final_residual = rn;
        return it;
    }
};

}  // namespace

std::vector<double> default_beta_schedule(double beta_max) {
    std::vector<double> s;
    for (double b = 1.0; b < beta_max; b *= 4.0) s.push_back(b);
    if (s.empty() || s.back() < beta_max) s.push_back(beta_max);
    return s;
}

EnvelopeResult envelope_beta(const HermitianForm11Field& omega, const ScalarField& h,
                             std::span<const double> schedule, const NewtonOptions& opts) {
    const GridSpec& g = omega.grid();
    if (!(h.grid == g)) throw GridMismatch("envelope_beta: obstacle grid mismatch");
    if (schedule.empty()) throw std::invalid_argument("envelope_beta: empty schedule");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw std::invalid_argument("envelope_beta: schedule must increase");
    auto [mev, arg] = omega.min_eigenvalue_scan();
    (void)arg;
    if (mev <= 1e-8)
        throw BuildError("envelope_beta: omega is degenerate; pass omega_eps explicitly");

    const std::int64_t np = g.num_points();
    ScalarField logdetM(g);
    {
        const bool uni = omega.is_uniform();
        double l0 = uni ? std::log(omega.uniform_value().det_real()) : 0.0;
        for (std::int64_t i = 0; i < np; ++i)
            logdetM[i] = uni ? l0 : std::log(omega.at(i).det_real());
    }

    ScalarField phi;
    if (opts.init) {
        if (!(opts.init->grid == g)) throw GridMismatch("envelope_beta: init grid mismatch");
        phi = *opts.init;
    } else {
        phi = ScalarField(g, h.inf());
    }

    BetaSolver solver(omega, h, logdetM, opts);
    // warm-start feasibility: blend toward the constant subsolution min(h)
    {
        double rn = 0.0;
        double hmin = h.inf();
        double theta = 0.0;
        while (!solver.eval(phi, schedule[0], solver.W, solver.r, &rn)) {
            theta += 0.25;
            if (theta > 1.0)
                throw SchemeError("envelope_beta: could not recover a feasible start", -1.0);
            for (std::int64_t i = 0; i < np; ++i)
                phi[i] = (1.0 - theta) * phi[i] + theta * hmin;
        }
    }

    EnvelopeResult out;
    ScalarField prev = phi;
    // adaptive continuation: when a rung fails (damping exhausted or slow
    // progress), roll back to the last converged iterate and insert the
    // geometric mean of the failed jump
    std::vector<double> pending(schedule.rbegin(), schedule.rend());
    double beta_prev = 0.0;
    int splits = 0;
    while (!pending.empty()) {
        double beta = pending.back();
        ScalarField save = phi;
        try {
            double resid = 0.0;
            int iters = solver.run(phi, beta, &resid);
            pending.pop_back();
            beta_prev = beta;
            out.beta_trace.push_back({beta, iters, resid});
            double step = 0.0;
            for (std::int64_t i = 0; i < np; ++i)
                step = std::max(step, std::abs(phi[i] - prev[i]));
            out.beta_step_sup.push_back(step);
            prev = phi;
        } catch (const SchemeError&) {
            double mid = std::sqrt(std::max(beta_prev, beta / 16.0) * beta);
            if (++splits > 24 || !(mid > beta_prev * 1.01) || !(mid < beta * 0.99)) throw;
            phi = std::move(save);
            pending.push_back(mid);
        }
    }

    const double beta_max = schedule.back();
    out.scheme_tol = 10.0 / beta_max;
    out.tau = 5.0 * out.scheme_tol;
    out.contact_mask.assign(std::size_t(np), 0);
    double viol = 0.0;
    for (std::int64_t i = 0; i < np; ++i) {
        double d = phi[i] - h[i];
        if (std::abs(d) <= out.tau) out.contact_mask[std::size_t(i)] = 1;
        viol = std::max(viol, d);
    }
    out.sup_violation = std::max(0.0, viol);
    out.phi = std::move(phi);
    out.orthogonality_defect = orthogonality_defect(omega, out, h, out.tau);
    return out;
}

EnvelopeResult envelope_beta(const Scenario& s, const ScalarField& h,
                             std::span<const double> schedule, const NewtonOptions& opts) {
    if (s.omega_degenerate)
        throw BuildError("envelope_beta: scenario omega is degenerate; use omega_eps");
    return envelope_beta(s.omega, h, schedule, opts);
}

EnvelopeResult compute_envelope(const HermitianForm11Field& omega, const ScalarField& h,
                                double beta_max, const NewtonOptions& opts) {
    const GridSpec& g = omega.grid();
    auto full = default_beta_schedule(beta_max);
    // nested continuation: the full beta ladder only runs on a small base
    // grid; each finer level re-solves just the top rung(s), warm-started
    // from the refined coarse solution. The coarse levels supply the slow
    // low-frequency part and the contact-set geometry; finer levels only
    // remove refinement error, which is cheap because it is high-frequency.
    // n = 1 grids are small enough for the direct ladder at full resolution
    const int base = 16;
    if (g.n == 1 || g.res <= base) return envelope_beta(omega, h, full, opts);
    EnvelopeResult cur = envelope_beta(decimate(omega, base), decimate(h, base), full, opts);
    int res = base;
    while (res < g.res) {
        res = std::min(res * 2, g.res);
        const bool finest = (res == g.res);
        ScalarField init = refine(cur.phi, res);
        NewtonOptions o2 = opts;
        o2.init = &init;
        std::vector<double> rungs;
        if (finest) {
            rungs.push_back(beta_max);
            // phi-error scales like residual / beta, so the big grid can run
            // with a relaxed residual target and loose inexact-Newton forcing
            o2.tol = std::max(opts.tol, 2e-3);
            o2.forcing = std::max(opts.forcing, 0.05);
            o2.max_newton = std::min(opts.max_newton, 12);
        } else {
            for (double b : {beta_max / 4.0, beta_max})
                if (b >= 1.0 && (rungs.empty() || b > rungs.back())) rungs.push_back(b);
        }
        cur = envelope_beta(finest ? omega : decimate(omega, res),
                            finest ? h : decimate(h, res), rungs, o2);
    }
    return cur;
}

ScalarField envelope_obstacle_1d(const ScalarField& m, const ScalarField& h) {
    const GridSpec& g = m.grid;
    if (g.n != 1) throw std::invalid_argument("envelope_obstacle_1d: n must be 1");
    if (!(h.grid == g)) throw GridMismatch("envelope_obstacle_1d: grid mismatch");
    const int res = g.res;
    const double h2 = 1.0 / (double(res) * res);  // grid spacing squared
    ScalarField u = h;
    const double omega_sor = 2.0 / (1.0 + std::sin(std::numbers::pi / res));
    auto at = [&](int x, int y) -> double& { return u[std::int64_t(x) * res + y]; };
    // round-off floor: the discrete Laplacian amplifies cancellation noise
    // by res^2, so the achievable complementarity residual scales with it
    const double tol = std::max(1e-12, 4e-15 * double(res) * res);
    const std::int64_t cap = 400000;
    for (std::int64_t sweep = 0; sweep < cap; ++sweep) {
        for (int x = 0; x < res; ++x)
            for (int y = 0; y < res; ++y) {
                double nb = at((x + 1) % res, y) + at((x + res - 1) % res, y) +
                            at(x, (y + 1) % res) + at(x, (y + res - 1) % res);
                double target = 0.25 * nb + m[std::int64_t(x) * res + y] * h2;
                double unew = at(x, y) + omega_sor * (target - at(x, y));
                at(x, y) = std::min(h[std::int64_t(x) * res + y], unew);
            }
        // complementarity residual: min(h - u, m + (1/4) Lap u) = 0
        double resid = 0.0;
        for (int x = 0; x < res; ++x)
            for (int y = 0; y < res; ++y) {
                double nb = at((x + 1) % res, y) + at((x + res - 1) % res, y) +
                            at(x, (y + 1) % res) + at(x, (y + res - 1) % res);
                double lap = 0.25 * (nb - 4.0 * at(x, y)) / h2;
                double gap = h[std::int64_t(x) * res + y] - at(x, y);
                double op = m[std::int64_t(x) * res + y] + lap;
                resid = std::max(resid, std::abs(std::min(gap, op)));
            }
        if (resid <= tol) return u;
    }
    throw SchemeError("envelope_obstacle_1d: SOR did not reach the residual floor", -1.0);
}

double orthogonality_defect(const HermitianForm11Field& omega, const EnvelopeResult& r,
                            const ScalarField& h, double tau) {
    const GridSpec& g = omega.grid();
    ScalarField dens = ma_density(omega, r.phi, 1e-5 * (1.0 + omega.max_norm()));
    std::vector<std::uint8_t> mask(std::size_t(g.num_points()), 0);
    for (std::int64_t i = 0; i < g.num_points(); ++i)
        if (r.phi[i] < h[i] - tau) mask[std::size_t(i)] = 1;
    return masked_integrate(dens, mask);
}

namespace {

std::vector<std::int64_t> axis_strides(const GridSpec& g) {
    std::vector<std::int64_t> s(std::size_t(g.dims()));
    std::int64_t acc = 1;
    for (int d = g.dims() - 1; d >= 0; --d) {
        s[std::size_t(d)] = acc;
        acc *= g.res;
    }
    return s;
}

}  // namespace

/// Separable per-axis implementation.
void dilate_mask(std::vector<std::uint8_t>& mask, const GridSpec& g, int radius) {
    auto strides = axis_strides(g);
    const std::int64_t np = g.num_points();
    std::vector<std::uint8_t> tmp(mask.size());
    for (int d = 0; d < g.dims(); ++d) {
        const std::int64_t st = strides[std::size_t(d)];
        const std::int64_t period = st * g.res;
        tmp.assign(mask.size(), 0);
        for (std::int64_t i = 0; i < np; ++i) {
            if (!mask[std::size_t(i)]) continue;
            const std::int64_t base = i - (i % period) + (i % st);
            const std::int64_t pos = (i % period) / st;
            for (int o = -radius; o <= radius; ++o) {
                std::int64_t p = (pos + o + g.res) % g.res;
                tmp[std::size_t(base + p * st)] = 1;
            }
        }
        mask.swap(tmp);
    }
}

MinCheckReport envelope_min_check(const Scenario& s, const PshSample& u, const PshSample& v,
                                  double beta_max, double rel_tol) {
    const GridSpec& g = s.grid;
    const std::int64_t np = g.num_points();
    ScalarField h(g);
    for (std::int64_t i = 0; i < np; ++i) h[i] = std::min(u.u[i], v.u[i]);
    EnvelopeResult env = compute_envelope(s.omega, h, beta_max);

    double ctol = 1e-5 * (1.0 + s.omega.max_norm());
    ScalarField fu = ma_density(s.omega, u.u, ctol);
    ScalarField fv = ma_density(s.omega, v.u, ctol);
    ScalarField fw = ma_density(s.omega, env.phi, ctol);

    // crease mask: |u - v| <= 1e-3 osc, dilated by 3 cells
    ScalarField diff = u.u;
    diff -= v.u;
    double crease_tol = 1e-3 * std::max(diff.osc(), 1e-14);
    std::vector<std::uint8_t> crease(std::size_t(np), 0);
    for (std::int64_t i = 0; i < np; ++i)
        if (std::abs(diff[i]) <= crease_tol) crease[std::size_t(i)] = 1;
    dilate_mask(crease, g, 3);

    MinCheckReport rep;
    std::int64_t crease_count = 0;
    for (auto b : crease) crease_count += b;
    rep.crease_fraction = double(crease_count) / double(np);

    const int nboxes = 1 << g.dims();
    auto strides = axis_strides(g);
    std::vector<std::uint8_t> mask(std::size_t(np), 0);
    for (int box = -1; box < nboxes; ++box) {
        for (std::int64_t i = 0; i < np; ++i) {
            bool in = !crease[std::size_t(i)];
            if (in && box >= 0)
                for (int d = 0; d < g.dims() && in; ++d) {
                    int c = int((i / strides[std::size_t(d)]) % g.res);
                    int half = (c >= g.res / 2) ? 1 : 0;
                    if (((box >> d) & 1) != half) in = false;
                }
            mask[std::size_t(i)] = in ? 1 : 0;
        }
        BoxMassEntry e;
        e.box_id = box + 1;
        e.mass_w = masked_integrate(fw, mask);
        e.mass_u_plus_v = masked_integrate(fu, mask) + masked_integrate(fv, mask);
        e.margin = e.mass_u_plus_v - e.mass_w;
        rep.boxes.push_back(e);
    }

    double excess = -std::numeric_limits<double>::infinity();
    double floorv = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < np; ++i) {
        if (crease[std::size_t(i)]) continue;
        double fmax = std::max(fu[i], fv[i]);
        double fmin = std::min(fu[i], fv[i]);
        // off-crease max(u,v) equals the dominant sample on a neighborhood,
        // so its discrete MA density is the dominant sample's density
        double fsel = (u.u[i] >= v.u[i]) ? fu[i] : fv[i];
        excess = std::max(excess, fw[i] - fmax);
        floorv = std::max(floorv, fmin - fsel);
    }
    rep.density_excess = excess;
    rep.max_density_floor = floorv;
    rep.mass_scale = integrate(fu) + integrate(fv);
    double dens_scale = std::max(fu.sup(), fv.sup());
    bool ok = rep.density_excess <= rel_tol * std::max(dens_scale, 1e-12) &&
              rep.max_density_floor <= rel_tol * std::max(dens_scale, 1e-12);
    for (const auto& e : rep.boxes)
        if (e.margin < -rel_tol * std::max(rep.mass_scale, 1e-12)) ok = false;
    rep.pass = ok;
    return rep;
}

const std::vector<std::string>& builtin_obstacle_names() {
    static const std::vector<std::string> names = {"two_well", "cosine", "band_random"};
    return names;
}

ScalarField builtin_obstacle(const GridSpec& g, const std::string& name, std::uint64_t seed) {
    const std::int64_t np = g.num_points();
    ScalarField h(g);
    if (name == "two_well") {
        for (std::int64_t i = 0; i < np; ++i) {
            auto c = g.coords(i);
            double w1 = 0.0, w2 = 0.0;
            for (int d = 0; d < g.dims(); ++d) {
                double s1 = std::sin(std::numbers::pi * (c[std::size_t(d)] - 0.25));
                double s2 = std::sin(std::numbers::pi * (c[std::size_t(d)] - 0.70));
                w1 += s1 * s1;
                w2 += s2 * s2;
            }
            h[i] = std::min(0.5 * w1, 0.3 + 0.4 * w2);
        }
        return h;
    }
    if (name == "cosine") {
        for (std::int64_t i = 0; i < np; ++i) {
            auto c = g.coords(i);
            double acc = 0.0;
            for (int d = 0; d < g.dims(); ++d)
                acc += std::cos(2.0 * std::numbers::pi * c[std::size_t(d)]);
            h[i] = 0.3 * acc / g.dims();
        }
        return h;
    }
    if (name == "band_random")
        return SpectralEngine::get(g).band_limited(std::min(3, g.res / 8), seed, 0.5);
    throw std::invalid_argument("builtin_obstacle: unknown name " + name);
}

ScalarField decimate(const ScalarField& f, int coarse_res) {
    const GridSpec& g = f.grid;
    if (g.res % coarse_res != 0)
        throw std::invalid_argument("decimate: coarse_res must divide res");
    GridSpec gc(g.n, coarse_res);
    const int factor = g.res / coarse_res;
    ScalarField out(gc);
    const int d = g.dims();
    std::array<int, 6> ip{};
    for (std::int64_t ci = 0; ci < gc.num_points(); ++ci) {
        std::int64_t t = ci;
        for (int a = d - 1; a >= 0; --a) {
            ip[std::size_t(a)] = int(t % coarse_res) * factor;
            t /= coarse_res;
        }
        out[ci] = f[g.index(ip)];
    }
    return out;
}

HermitianForm11Field decimate(const HermitianForm11Field& f, int coarse_res) {
    GridSpec gc(f.grid().n, coarse_res);
    if (f.is_uniform()) return HermitianForm11Field::uniform(gc, f.uniform_value());
    HermitianForm11Field out(gc, true);
    const int nc = HermitianForm11Field::num_components(f.dim());
    for (int c = 0; c < nc; ++c) {
        ScalarField comp(f.grid());
        auto src = f.component(c);
        std::memcpy(comp.v.data(), src.data(), src.size() * sizeof(double));
        ScalarField cc = decimate(comp, coarse_res);
        auto dst = out.component(c);
        std::memcpy(dst.data(), cc.v.data(), dst.size() * sizeof(double));
    }
    return out;
}

namespace {

/// Double the resolution along every axis (periodic multilinear).
ScalarField refine_double(const ScalarField& f) {
    const GridSpec& g = f.grid;
    GridSpec gf(g.n, g.res * 2);
    ScalarField out(gf);
    const int d = g.dims();
    std::array<int, 6> ip{};
    std::array<int, 6> base{}, odd{};
    for (std::int64_t fi = 0; fi < gf.num_points(); ++fi) {
        std::int64_t t = fi;
        for (int a = d - 1; a >= 0; --a) {
            ip[std::size_t(a)] = int(t % gf.res);
            t /= gf.res;
        }
        int nodd = 0;
        for (int a = 0; a < d; ++a) {
            base[std::size_t(a)] = ip[std::size_t(a)] / 2;
            odd[std::size_t(a)] = ip[std::size_t(a)] & 1;
            nodd += odd[std::size_t(a)];
        }
        double acc = 0.0;
        const int corners = 1 << nodd;
        for (int m = 0; m < corners; ++m) {
            std::array<int, 6> cp = base;
            int bit = 0;
            for (int a = 0; a < d; ++a)
                if (odd[std::size_t(a)]) {
                    if ((m >> bit) & 1) cp[std::size_t(a)] = (cp[std::size_t(a)] + 1) % g.res;
                    ++bit;
                }
            acc += f[g.index(cp)];
        }
        out[fi] = acc / double(corners);
    }
    return out;
}

}  // namespace

ScalarField refine(const ScalarField& f, int fine_res) {
    if (fine_res % f.grid.res != 0)
        throw std::invalid_argument("refine: fine_res must be a multiple of res");
    ScalarField cur = f;
    while (cur.grid.res < fine_res) cur = refine_double(cur);
    return cur;
}

}  // namespace pluripot
