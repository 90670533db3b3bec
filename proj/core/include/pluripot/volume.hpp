#pragma once

#include "pluripot/envelope.hpp"

namespace pluripot {

/// Description of a seeded psh sample family.
struct FamilySpec {
    int count = 10;
    std::uint64_t seed = 1;
    int max_freq = 3;
    double m_clip = -1.0;      // when >= 0: clip samples to [-M, 0] (smoothed)
    bool include_zero = false; // prepend the u = 0 sample
};

struct MassReport {
    std::string scenario;
    FamilySpec family;
    std::vector<int> js;
    std::vector<std::vector<double>> masses;  // [sample][j index]
    std::vector<double> min_mass, max_mass, mean_mass;  // per j index
    double volume = 0.0;  // integral of omega^n
    double m_clip_perturbation = 0.0;  // sup |smoothed clip - hard clip|
    double worst_eigenvalue = 0.0;     // most negative W eigenvalue seen
};

/// Mixed Monge-Ampere masses over a seeded family: for each sample u and
/// each j, integral of (omega + dd^c u)^j ^ omega^{n-j}. Family extrema are
/// one-sided estimates: max underestimates v_{+,j}, min overestimates
/// v_{-,j}. For non-degenerate scenarios without clipping the sampler's
/// Hessian is reused, so each sample costs a single spectral pass.
MassReport mass_survey(const Scenario& s, const FamilySpec& fam, std::span<const int> js);

/// Same against an explicit form (the eps-ladder); scenario only labels.
MassReport mass_survey_for(const HermitianForm11Field& omega, const FamilySpec& fam,
                           std::span<const int> js, const std::string& label = "");

/// Relative defect of the binomial expansion
/// integral (omega+dd^cu)^n = sum_j C(n,j) integral omega^{n-j} ^ (dd^cu)^j.
double binomial_identity_check(const Scenario& s, const ScalarField& u);

struct TwoPowerMargins {
    std::vector<double> margins;  // per sample: rhs - lhs
    double worst = 0.0;
};

/// Per sample phi: integral (omega+dd^c phi)^l ^ omega^{n-l}
///             <= integral (2 omega+dd^c phi)^j ^ omega^{n-j}, 0 <= l <= j.
TwoPowerMargins two_power_bound_check(const Scenario& s, const FamilySpec& fam, int ell, int j);

/// v_- monotonicity: u = P_{omega1}(v), margin = ma-mass(omega2, v) -
/// ma-mass(omega1, u) >= -tol when omega1 <= omega2 pointwise.
double monotonicity_check(const HermitianForm11Field& omega1, const HermitianForm11Field& omega2,
                          const PshSample& v, double beta_max = 4096.0);

struct EpsLadderRow {
    double eps;
    double min_mass, max_mass;
    double volume_eps;   // integral (omega + eps omega_X)^n
    double deviation;    // max over family of |mass - volume0|
};

struct EpsLadderTable {
    std::vector<EpsLadderRow> rows;
    double volume0 = 0.0;   // integral omega^n
    double fitted_c = 0.0;  // least-squares slope of deviation ~ C eps
};

/// hat-v lower-volume check on a closed degenerate scenario: per eps the
/// family masses for omega + eps omega_X compared against integral omega^n.
EpsLadderTable hat_v_closed_check(const Scenario& s, std::span<const double> eps_ladder,
                                  const FamilySpec& fam);

/// Family survey with samples clipped to -M <= u <= 0 by a smoothed max
/// resolved over ~2 grid cells; the smoothing perturbation is reported.
MassReport v_M_survey(const Scenario& s, double big_m, const FamilySpec& fam);

/// Smoothed max(u, -M), psh-preserving (convex nondecreasing reparametrization);
/// perturbation receives the sup distance to the hard clip.
ScalarField clip_to_band(const ScalarField& u, double big_m, double* perturbation);

}  // namespace pluripot
