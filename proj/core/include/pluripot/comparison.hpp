#pragma once

#include "pluripot/volume.hpp"

namespace pluripot {

struct ComparisonReport {
    std::string scenario;
    std::uint64_t u_seed = 0, v_seed = 0;
    double lambda = 0.0;
    double s = 0.0;
    double b = 0.0;        // condition (B) constant used
    double m_lambda = 0.0; // inf (u - (1-lambda) v)
    std::int64_t sublevel_cells = 0;
    double factor = 1.0;   // (1 - 4 B (n-1)^2 s / lambda^3)^n
    double lhs = 0.0;      // factor * integral_U ma(omega, (1-lambda) v)
    double rhs = 0.0;      // integral_U ma(omega, u)
    double margin = 0.0;   // rhs - lhs
    bool vacuous = false;  // empty sublevel set
    bool pass = false;
};

/// Largest admissible s for the modified comparison principle; +inf at B=0.
double comparison_s_max(double lambda, double b, int n);

/// Modified comparison principle on the sublevel sets
/// U = {u < (1-lambda) v + m_lambda + s} (boundary cells within 1e-9 are
/// assigned to U). Degenerate scenarios must pass their omega_eps through
/// the explicit-omega overload.
std::vector<ComparisonReport> modified_comparison_check(const Scenario& sc, const PshSample& u,
                                                        const PshSample& v, double lambda,
                                                        std::span<const double> svals,
                                                        double tol = 1e-8);
std::vector<ComparisonReport> modified_comparison_check(const HermitianForm11Field& omega,
                                                        double b, const std::string& label,
                                                        const PshSample& u, const PshSample& v,
                                                        double lambda,
                                                        std::span<const double> svals,
                                                        double tol = 1e-8);

struct ContactPair {
    PshSample psi;
    ScalarField q;        // vanishes identically on the contact band R
    ScalarField u;        // psi - q^2, omega-psh by scaling of q
    std::vector<std::uint8_t> interior;  // interior-of-R mask (3-cell erosion)
    double q_scale = 0.0;
};

/// Builder for the contact-set inequality: psi a psh sample, q a compactly
/// supported bump scaled so u = psi - q^2 stays omega-psh; R is the
/// complement of the bump support.
ContactPair make_contact_pair(const Scenario& s, std::uint64_t seed, int max_freq = 2);

struct ContactReport {
    std::vector<double> worst_excess;  // per j: max over R-interior of
                                       // (omega_u)^j ^ (omega_psi)^{n-j} - (omega_psi)^n
    double tol = 0.0;
    bool pass = false;
};

/// On interior-of-R points: (omega_u)^j ^ (omega_psi)^{n-j} <= (omega_psi)^n
/// for all j (equality region inequality of the contact lemma).
ContactReport contact_inequality_check(const Scenario& s, const ContactPair& pair,
                                       double rel_tol = 1e-8);

struct DominationReport {
    int trials = 0;
    int constructive_pass = 0;     // campaign (a): v <= v + c0 verified
    int screened_prop = 0;         // pairs passing the domination hypothesis
    int screened_corollary = 0;    // pairs passing the exponential hypothesis
    int violations = 0;
    double worst_violation = 0.0;  // most positive (v - u) among screened pairs
};

/// Campaign (a): constructive pairs u = v + c0 (corollary hypothesis holds
/// by construction, conclusion checked). Campaign (b): random pairs are
/// screened for the hypotheses pointwise; every screened pair must satisfy
/// the conclusion. Contract: violations == 0.
DominationReport domination_falsification(const Scenario& s, int trials, double c,
                                          double eps_exp = 1.0, std::uint64_t seed = 11,
                                          int max_freq = 3);

}  // namespace pluripot
