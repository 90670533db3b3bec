#pragma once

#include <map>
#include <string>
#include <vector>

#include "pluripot/calculus.hpp"

namespace pluripot {

struct BuildError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A named (omega, omega_X) test configuration on the torus.
struct Scenario {
    std::string name;
    GridSpec grid;
    std::uint64_t seed = 0;
    HermitianForm11Field omega;
    HermitianForm11Field omega_X;
    bool omega_closed = false;      // built as constant + dd^c(potential)
    bool omega_degenerate = false;  // min eigenvalue touches zero somewhere
    double min_eigenvalue = 0.0;    // measured at build time
    std::map<std::string, double> params;

    // product_collapsing bookkeeping: omega = rho(x_1) * identity with rho a
    // compactly supported bump; exact support bounds for testability.
    bool has_bump = false;
    double bump_center = 0.0, bump_halfwidth = 0.0, bump_height = 0.0, bump_mean = 0.0;

    /// omega + eps * omega_X (the regularization ladder).
    HermitianForm11Field omega_eps(double eps) const;
};

const std::vector<std::string>& scenario_names();

/// Deterministic named builders; amplitude <= 0 picks the documented default.
Scenario build_scenario(const std::string& name, const GridSpec& g, double amplitude = -1.0,
                        std::uint64_t seed = 1);

struct ConditionBResult {
    double b = 0.0;          // max of the two constants
    double b_ddc = 0.0;      // from dd^c omega vs omega^2
    double b_wedge = 0.0;    // from d omega ^ d^c omega vs omega^3 (n = 3)
    bool finite = true;
    bool closed_by_construction = false;
    double measured_defect = 0.0;     // numerical size of dd^c omega when closed
    std::int64_t worst_point_ddc = 0;
    int worst_direction_ddc = -1;     // certificate from the direction sample
    std::int64_t worst_point_wedge = 0;
};

/// Smallest B with -B omega^2 <= dd^c omega <= B omega^2 (weak positivity,
/// exact over rank-one directions via generalized eigenvalues) and, for n=3,
/// -B omega^3 <= d omega ^ d^c omega <= B omega^3. The direction sample
/// supplies the worst-direction certificate.
ConditionBResult condition_b_constant(const Scenario& s, int directions = 32, double tol = 1e-10);

struct PshSample {
    ScalarField u;
    double t_star = 0.0;
    std::uint64_t seed = 0;
    double sup_offset = 0.0;  // subtracted to enforce sup u = 0
    bool fallback = false;    // pullback-type generator used (degenerate omega)
};

/// Seeded band-limited omega-psh samples: u = 0.9 t* f - sup(0.9 t* f) with
/// t* the exact cone-exit scale from per-point generalized eigenvalues.
std::vector<PshSample> sample_psh(const Scenario& s, int count, std::uint64_t seed, int max_freq);

/// Single sample with explicit generator control (used by tests).
PshSample make_psh_sample(const Scenario& s, std::uint64_t seed, int max_freq);

/// Sampling against an explicit (1,1)-field, e.g. a regularized omega_eps.
PshSample make_psh_sample_for(const HermitianForm11Field& omega, std::uint64_t seed, int max_freq);
std::vector<PshSample> sample_psh_for(const HermitianForm11Field& omega, int count,
                                      std::uint64_t seed, int max_freq);

/// Like make_psh_sample_for but also hands back dd^c u (the generator's
/// Hessian rescaled by 0.9 t*), sparing callers a second spectral pass.
PshSample make_psh_sample_with_hessian(const HermitianForm11Field& omega, std::uint64_t seed,
                                       int max_freq, HermitianForm11Field* hess_out);

struct PshCheck {
    bool flag;
    double worst_eigenvalue;
    std::int64_t worst_point;
};

PshCheck is_omega_psh(const Scenario& s, const ScalarField& u, double tol);
PshCheck is_omega_psh(const HermitianForm11Field& omega, const ScalarField& u, double tol);

/// Grid minimum of the smallest eigenvalue of the pencil (h, m), i.e. the
/// most negative mu with det(h - mu m) = 0; m must be positive definite.
double min_pencil_eigenvalue_scan(const HermitianForm11Field& m, const HermitianForm11Field& h);

}  // namespace pluripot
