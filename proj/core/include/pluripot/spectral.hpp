#pragma once

#include <cstdint>
#include <memory>

#include "pluripot/field.hpp"
#include "pluripot/grid.hpp"

namespace pluripot {

/// Fourier-side differential operators on the unit torus, one cached engine
/// per grid shape. All plans use FFTW_ESTIMATE so results are reproducible
/// run to run. Not thread-safe (the lab machine has a single core).
///
/// Conventions: u(x) = sum_K uhat(K) e^{2 pi i K.x}; derivative multipliers
/// zero out the Nyquist frequency on every axis, so odd derivatives of real
/// fields stay real and the operators are exact on band-limited data.
class SpectralEngine {
  public:
    static SpectralEngine& get(const GridSpec& g);

    ~SpectralEngine();
    SpectralEngine(const SpectralEngine&) = delete;
    SpectralEngine& operator=(const SpectralEngine&) = delete;

    const GridSpec& grid() const { return grid_; }

    /// Load the half-spectrum of a real field; subsequent component calls
    /// read from it.
    void forward(const ScalarField& u);

    /// Complex Hessian entry H[u]_{jk} = d^2 u / dz_j dzbar_k of the loaded
    /// field; real or imaginary part as a real field.
    void hessian_component(int j, int k, bool imag_part, ScalarField& out);

    /// d u / dz_j of the loaded field (real or imaginary part).
    void dz_component(int j, bool imag_part, ScalarField& out);

    /// Real partial d u / dx_axis of the loaded field; axes are ordered
    /// x_1, y_1, ..., x_n, y_n (axis in [0, 2n)).
    void axis_deriv(int axis, ScalarField& out);

    /// Full complex Hessian field of u (i dd^c u has matrix H[u] in the
    /// normalization dd^c = i d dbar of this repository).
    HermitianForm11Field ddc(const ScalarField& u);
    void ddc_into(const ScalarField& u, HermitianForm11Field& out);

    /// One quarter of the flat Laplacian: (1/4) sum_j (uxx_j + uyy_j),
    /// i.e. the trace of H[u]. Loads u.
    void quarter_laplacian(const ScalarField& u, ScalarField& out);

    /// Solve (tr(C H[phi]) - beta) phi = rhs for a constant Hermitian
    /// positive semidefinite C and beta > 0 (always invertible: the symbol
    /// is -pi^2 a^H C a - beta < 0).
    void precond_solve(const HermitianMatrix& c, double beta, const ScalarField& rhs,
                       ScalarField& out);

    /// Seeded random real trigonometric polynomial with frequencies
    /// 0 < |K|_inf <= kmax, mean zero, scaled to sup-norm `amplitude`.
    /// The underlying continuum function depends only on (kmax, seed), not
    /// on the grid resolution.
    ScalarField band_limited(int kmax, std::uint64_t seed, double amplitude);

    /// Project onto frequencies |K|_inf <= kmax (spectral truncation).
    void truncate(ScalarField& u, int kmax);

  private:
    explicit SpectralEngine(const GridSpec& g);
    struct Impl;
    GridSpec grid_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pluripot
