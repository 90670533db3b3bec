#pragma once

#include <span>
#include <vector>

#include "pluripot/grid.hpp"
#include "pluripot/hermitian.hpp"
#include "pluripot/pointform.hpp"

namespace pluripot {

struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Real-valued function sampled on the grid (row-major, axes x1,y1,...,xn,yn).
struct ScalarField {
    GridSpec grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), v(std::size_t(g.num_points()), fill) {}

    std::int64_t size() const { return std::int64_t(v.size()); }
    double& operator[](std::int64_t i) { return v[std::size_t(i)]; }
    double operator[](std::int64_t i) const { return v[std::size_t(i)]; }

    double sup() const;
    double inf() const;
    double osc() const { return sup() - inf(); }
    double norm_inf() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator+=(double c);
    ScalarField& operator*=(double c);
};

/// Deterministic mean over grid points (Lebesgue mass 1 convention).
/// Chunked pairwise accumulation: result is independent of threading.
double integrate(const ScalarField& f);
double masked_integrate(const ScalarField& f, const std::vector<std::uint8_t>& mask);

/// Real (1,1)-form field: a Hermitian coefficient matrix per grid point.
///
/// Storage is component-major: n real diagonal arrays first, then for each
/// off-diagonal pair (j,k), j<k in lex order, the real and imaginary part
/// arrays of entry (j,k). A uniform (constant-coefficient) field stores just
/// the matrix.
class HermitianForm11Field {
  public:
    HermitianForm11Field() = default;
    HermitianForm11Field(const GridSpec& g, bool allocate);
    static HermitianForm11Field uniform(const GridSpec& g, const HermitianMatrix& m);

    const GridSpec& grid() const { return grid_; }
    int dim() const { return grid_.n; }
    bool is_uniform() const { return uniform_; }
    const HermitianMatrix& uniform_value() const { return c0_; }

    static int num_components(int n) { return n * n; }
    static int diag_component(int n, int j);
    static int offdiag_component(int n, int j, int k, bool imag_part);

    std::span<double> component(int c) { return comp_[std::size_t(c)]; }
    std::span<const double> component(int c) const { return comp_[std::size_t(c)]; }

    HermitianMatrix at(std::int64_t idx) const;
    void set(std::int64_t idx, const HermitianMatrix& m);

    /// Pointwise smallest eigenvalue scan; returns (min value, argmin index).
    std::pair<double, std::int64_t> min_eigenvalue_scan() const;
    double max_norm() const;

    /// this += s * o (densifies a uniform field if needed).
    void axpy(double s, const HermitianForm11Field& o);
    void densify();

  private:
    GridSpec grid_;
    bool uniform_ = true;
    HermitianMatrix c0_;
    std::vector<std::vector<double>> comp_;
};

/// General (p,q)-form field: complex coefficients per PointForm basis index.
struct FormField {
    GridSpec grid;
    int p = 0, q = 0;
    std::vector<std::vector<cplx>> comp;  // [basis index][grid point]

    FormField() = default;
    FormField(const GridSpec& g, int p_, int q_);

    int num_comps() const { return int(comp.size()); }
    PointForm at(std::int64_t idx) const;
    double norm_inf() const;

    static FormField from_hermitian_field(const HermitianForm11Field& h);
};

}  // namespace pluripot
