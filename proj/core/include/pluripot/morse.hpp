#pragma once

#include "pluripot/volume.hpp"

namespace pluripot {

struct GauduchonFamily {
    std::string description;
    std::vector<HermitianForm11Field> members;
    std::vector<double> defects;  // per member ||dd^c(theta^{n-1})||_inf
};

/// defect = sup-norm of the coefficients of dd^c(theta^{n-1}); flag iff
/// defect <= tol. theta must be positive definite.
std::pair<bool, double> is_gauduchon(const HermitianForm11Field& theta, double tol = 1e-8);

/// n=1: any positive theta (trivially Gauduchon). n=2: theta_0 + dd^c chi
/// with constant theta_0 (pluriclosed by construction). n=3: constant
/// members plus one corrected-perturbation member obtained by inverting
/// T^2 = Phi for the dd^c-closed positive (2,2)-form
/// Phi = (theta_0 + dd^c chi) ^ theta_0.
GauduchonFamily make_gauduchon_family(const GridSpec& g, int count, std::uint64_t seed = 5,
                                      double amplitude = 0.2);

struct LamariScan {
    double delta_star = 0.0;       // family-restricted upper bound on delta
    int argmin = -1;
    std::vector<double> ratios;    // per member
};

/// min over members of (integral omega ^ theta^{n-1}) /
/// (integral omega_X ^ theta^{n-1}); family-restricted bigness indicator.
LamariScan lamari_pairing_scan(const Scenario& s, const GauduchonFamily& fam);

struct PopoviciIntegrated {
    double lhs = 0.0;   // (int t1 ^ t3^{n-1}) (int t1^{n-1} ^ t2)
    double rhs = 0.0;   // (1/n) (int sqrt-coupled t1^n)^2
    bool constructed = false;
    bool pass = false;
};

/// Integrated Popovici inequality; in constructed mode t1 is conformally
/// rescaled so t1^n = t2 ^ t3^{n-1} holds exactly and the sharper
/// (1/n)(int t1^n)^2 bound is asserted.
PopoviciIntegrated popovici_integrated(const HermitianForm11Field& t1,
                                       const HermitianForm11Field& t2,
                                       const HermitianForm11Field& t3, bool constructed,
                                       double rel_tol = 1e-9);

struct MorseRow {
    double eps;
    double dev_top;       // max |mass(omega_eps, u) - int omega^n|
    double dev_mixed;     // same for the (n-1,1) pairing against omega'
    double stokes_top;    // max |mass - int omega_eps^n| (0 by Stokes)
    double stokes_mixed;  // max |pairing - int omega_eps^{n-1} ^ omega'_eps|
};

struct MorseTable {
    std::vector<MorseRow> rows;
    double mass0 = 0.0;   // int omega^n
    double mixed0 = 0.0;  // int omega^{n-1} ^ omega'
    double fitted_c_top = 0.0, fitted_c_mixed = 0.0;
};

/// eps-ladder mass convergence on a closed scenario with omega <= omega_X/2:
/// families of (omega + eps omega_X)-psh samples u_eps, second form
/// omega' = omega_X / 2 with its own psi_eps samples for the mixed pairing.
MorseTable morse_mass_convergence(const Scenario& s, std::span<const double> eps_ladder,
                                  const FamilySpec& fam);

}  // namespace pluripot
