#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <array>

namespace pluripot {

/// Discretized flat torus C^n / (Z^n + i Z^n), n in {1,2,3}.
///
/// The grid has `res` points per real axis and 2n real axes ordered
/// x_1, y_1, ..., x_n, y_n (z_j = x_j + i y_j). Storage is row-major in
/// that axis order: x_1 is the slowest index, y_n the fastest.
struct GridSpec {
    int n   = 1;   // complex dimension
    int res = 16;  // points per real axis, power of two, >= 16

    GridSpec() = default;
    GridSpec(int n_, int res_) : n(n_), res(res_) { validate(); }

    void validate() const {
        if (n < 1 || n > 3)
            throw std::invalid_argument("GridSpec: complex dimension must be 1, 2 or 3");
        if (res < 16 || (res & (res - 1)) != 0)
            throw std::invalid_argument("GridSpec: res must be a power of two >= 16");
        if (bytes_per_scalar_field() > kFieldMemoryCap)
            throw std::invalid_argument("GridSpec: scalar field would exceed memory cap (" +
                                        std::to_string(bytes_per_scalar_field()) + " bytes)");
    }

    int dims() const { return 2 * n; }

    std::int64_t num_points() const {
        std::int64_t p = 1;
        for (int d = 0; d < 2 * n; ++d) p *= res;
        return p;
    }

    double spacing() const { return 1.0 / res; }

    std::int64_t bytes_per_scalar_field() const { return num_points() * 8; }

    /// Coordinates of a grid point from its flat index, in [0,1)^{2n}.
    std::array<double, 6> coords(std::int64_t idx) const {
        std::array<double, 6> c{};
        for (int d = 2 * n - 1; d >= 0; --d) {
            c[d] = double(idx % res) / res;
            idx /= res;
        }
        return c;
    }

    std::int64_t index(const std::array<int, 6>& ip) const {
        std::int64_t idx = 0;
        for (int d = 0; d < 2 * n; ++d) idx = idx * res + ip[d];
        return idx;
    }

    bool operator==(const GridSpec& o) const { return n == o.n && res == o.res; }

    // A single field may not exceed 2.5 GB; the lab machine budget is small.
    static constexpr std::int64_t kFieldMemoryCap = 2'500'000'000;
};

}  // namespace pluripot
