#pragma once

#include <span>

#include "pluripot/field.hpp"
#include "pluripot/spectral.hpp"

namespace pluripot {

/// Raised when a (1,1)-form field leaves the psd cone beyond tolerance.
struct ConeError : std::runtime_error {
    ConeError(const std::string& what, double ev, std::int64_t pt)
        : std::runtime_error(what), worst_eigenvalue(ev), worst_point(pt) {}
    double worst_eigenvalue;
    std::int64_t worst_point;
};

/// Complex Hessian of u as a (1,1) coefficient field (spectral).
HermitianForm11Field ddc(const ScalarField& u);

/// omega + dd^c u.
HermitianForm11Field omega_plus_ddc(const HermitianForm11Field& omega, const ScalarField& u);

/// Dolbeault operators on form fields (spectral). d = del + delbar and
/// d^c = i(delbar - del) split across bidegrees; dd^c f = 2i del delbar f
/// as an operator identity, provided directly for accuracy.
FormField del(const FormField& f);
FormField delbar(const FormField& f);
FormField ddc_form(const FormField& f);  // 2i del delbar f, bidegree (p+1,q+1)

FormField wedge(const FormField& a, const FormField& b);

/// Density of a top (n,n)-form field; if imag_defect is non-null it receives
/// the sup-norm of the discarded imaginary part.
ScalarField top_density_field(const FormField& f, double* imag_defect = nullptr);

/// Pointwise n! det of a (1,1) field, no cone check.
ScalarField det_density(const HermitianForm11Field& w);

/// Monge-Ampere density n! det(M_omega + H[u]); checks that the argument
/// stays psd up to cone_tol (negative cone_tol means the pointwise default
/// tolerance). Throws ConeError with the worst point on violation.
ScalarField ma_density(const HermitianForm11Field& omega, const ScalarField& u,
                       double cone_tol = -1.0);

/// Same check applied to an already-assembled (1,1) field.
ScalarField checked_density(const HermitianForm11Field& w, double cone_tol = -1.0);

/// Pointwise wedge density of n (1,1) fields (mixed Monge-Ampere).
ScalarField mixed_ma_density(std::span<const HermitianForm11Field* const> slots);

/// |integral ma(omega,u) - integral ma(omega,0)|; zero for closed omega.
double stokes_defect(const HermitianForm11Field& omega, const ScalarField& u);

/// n=3 helpers streamed component-by-component (a full degree-3 or (2,2)
/// FormField at n=3 resolution would blow the memory budget).
///
/// A real (2,2)-form Theta in n=3 is stored through its pairing matrix
/// field A with gamma^H A(x) gamma = density(Theta ^ i gamma^conj(gamma));
/// the map Theta <-> A is a pointwise linear bijection.

/// Pairing matrix field of dd^c omega (n=3).
HermitianForm11Field ddc_pairing_field(const HermitianForm11Field& omega);

/// Pairing matrix field of omega ^ omega: pointwise 2 adj(M).
HermitianForm11Field square_pairing_field(const HermitianForm11Field& omega);

/// Density of d omega ^ d^c omega = 2i del(omega) ^ delbar(omega) (n=3).
ScalarField d_dc_wedge_density(const HermitianForm11Field& omega);

/// Density of dd^c(Theta) for a real (2,2) field Theta given by its pairing
/// matrix field (n=3); imag_defect as in top_density_field.
ScalarField ddc_top_density_from_pairing(const HermitianForm11Field& a,
                                         double* imag_defect = nullptr);

}  // namespace pluripot
