#pragma once

#include "pluripot/scenario.hpp"

namespace pluripot {

/// Newton / beta-scheme failure after exhausting damping.
struct SchemeError : std::runtime_error {
    SchemeError(const std::string& what, double r) : std::runtime_error(what), last_residual(r) {}
    double last_residual;
};

struct NewtonOptions {
    double tol = 1e-5;        // accepted Newton residual sup-norm per beta
    int max_newton = 40;
    int max_backtrack = 10;   // damping factor 1/2, floor 2^-10
    double forcing = 1e-3;    // inexact-Newton relative linear-solve tolerance
    int bicg_max = 400;
    double cone_tol = 1e-10;  // pointwise psd slack for iterates
    const ScalarField* init = nullptr;  // warm start (default: constant min h)
};

struct BetaTraceEntry {
    double beta;
    int newton_iters;
    double residual;
};

struct EnvelopeResult {
    ScalarField phi;
    std::vector<BetaTraceEntry> beta_trace;
    std::vector<double> beta_step_sup;  // ||phi_{b_{k+1}} - phi_{b_k}||_inf diagnostic
    std::vector<std::uint8_t> contact_mask;  // |phi - h| <= tau
    double orthogonality_defect = 0.0;
    double sup_violation = 0.0;  // max of (phi - h)_+
    double scheme_tol = 0.0;     // 10 / beta_max
    double tau = 0.0;            // 5 * scheme_tol
};

/// Geometric schedule 1, 4, 16, ..., beta_max.
std::vector<double> default_beta_schedule(double beta_max = 16384.0);

/// beta-exponential Monge-Ampere scheme: for each beta in the increasing
/// schedule solve det(M + H[phi]) = e^{beta (phi - h)} det(M) by damped
/// Newton in phi, warm-started across the schedule. omega must be positive
/// definite; degenerate scenarios must pass omega_eps explicitly.
EnvelopeResult envelope_beta(const HermitianForm11Field& omega, const ScalarField& h,
                             std::span<const double> schedule, const NewtonOptions& opts = {});
EnvelopeResult envelope_beta(const Scenario& s, const ScalarField& h,
                             std::span<const double> schedule, const NewtonOptions& opts = {});

/// Coarse-grid continuation wrapper: solves the full schedule on a res-32
/// decimated problem, prolongs, and finishes the last rungs on the fine
/// grid. Identical contract to envelope_beta, much cheaper at res >= 64.
EnvelopeResult compute_envelope(const HermitianForm11Field& omega, const ScalarField& h,
                                double beta_max, const NewtonOptions& opts = {});

/// Independent n=1 oracle: largest u <= h with m + (1/4) Lap_h u >= 0
/// (5-point second-difference Laplacian), by projected SOR to residual
/// <= 1e-12. Shares no code with envelope_beta.
ScalarField envelope_obstacle_1d(const ScalarField& m, const ScalarField& h);

/// Integral of ma_density(omega, phi) over {phi < h - tau}.
double orthogonality_defect(const HermitianForm11Field& omega, const EnvelopeResult& r,
                            const ScalarField& h, double tau);

struct BoxMassEntry {
    int box_id;            // 0 = full domain, then the 2^(2n) half-split boxes
    double mass_w;         // envelope of min(u,v), off-crease
    double mass_u_plus_v;  // same region
    double margin;         // mass_u_plus_v - mass_w
};

struct MinCheckReport {
    std::vector<BoxMassEntry> boxes;
    double density_excess = 0.0;   // max of (f_w - max(f_u,f_v)) off-crease
    double max_density_floor = 0.0;  // max of (min(f_u,f_v) - f_max) off-crease
    double crease_fraction = 0.0;
    double mass_scale = 0.0;  // total mass used for relative tolerances
    bool pass = false;
};

/// Min/max envelope lemma check: w = P(min(u,v)); per sub-box off a 3-cell
/// dilation of the crease {|u-v| <= 1e-3 osc}: mass_w <= mass_u + mass_v,
/// f_w <= max(f_u,f_v) pointwise, and density of max(u,v) >= min(f_u,f_v)
/// (off-crease max(u,v) locally equals the dominant sample, so its discrete
/// density is the dominant density).
MinCheckReport envelope_min_check(const Scenario& s, const PshSample& u, const PshSample& v,
                                  double beta_max = 4096.0, double rel_tol = 1e-4);

/// Builtin obstacle library (shared by tests and the CLI): names are
/// "two_well", "cosine", "band_random".
ScalarField builtin_obstacle(const GridSpec& g, const std::string& name, std::uint64_t seed = 7);
const std::vector<std::string>& builtin_obstacle_names();

/// Chebyshev dilation of a boolean grid mask by `radius` cells (periodic).
void dilate_mask(std::vector<std::uint8_t>& mask, const GridSpec& g, int radius);

/// Grid-transfer helpers (periodic): decimation onto a coarser power-of-two
/// grid and multilinear refinement back; used by the continuation wrapper.
ScalarField decimate(const ScalarField& f, int coarse_res);
HermitianForm11Field decimate(const HermitianForm11Field& f, int coarse_res);
ScalarField refine(const ScalarField& f, int fine_res);

}  // namespace pluripot
