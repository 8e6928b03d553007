#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "wwflow/errors.hpp"

namespace wwflow {

/// Uniform rectangular phase-space grid. Node (i, j) sits at
/// x = x_min + i*dx, k = k_min + j*dk; values are stored row by row in k.
/// Masked cells hold NaN.
class FieldGrid {
public:
    FieldGrid(double x_min, double x_max, double k_min, double k_max, std::size_t nx, std::size_t nk)
        : x_min_(x_min), x_max_(x_max), k_min_(k_min), k_max_(k_max), nx_(nx), nk_(nk),
          values_(nx * nk, 0.0) {
        if (nx < 2 || nk < 2) throw DomainError("FieldGrid: need at least 2 nodes per axis");
        if (!(x_max > x_min) || !(k_max > k_min) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
            !std::isfinite(k_min) || !std::isfinite(k_max)) {
            throw DomainError("FieldGrid: empty or non-finite extent");
        }
    }

    /// Square grid with n nodes per axis.
    static FieldGrid square(double lo, double hi, std::size_t n) { return {lo, hi, lo, hi, n, n}; }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double k_min() const { return k_min_; }
    double k_max() const { return k_max_; }
    std::size_t nx() const { return nx_; }
    std::size_t nk() const { return nk_; }
    double dx() const { return (x_max_ - x_min_) / static_cast<double>(nx_ - 1); }
    double dk() const { return (k_max_ - k_min_) / static_cast<double>(nk_ - 1); }

    // Last node is pinned to the upper bound so extents round-trip exactly.
    double x(std::size_t i) const { return i + 1 == nx_ ? x_max_ : x_min_ + static_cast<double>(i) * dx(); }
    double k(std::size_t j) const { return j + 1 == nk_ ? k_max_ : k_min_ + static_cast<double>(j) * dk(); }

    double& at(std::size_t i, std::size_t j) { return values_[j * nx_ + i]; }
    double at(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }

    static constexpr double masked_value() { return std::numeric_limits<double>::quiet_NaN(); }
    bool is_masked(std::size_t i, std::size_t j) const { return std::isnan(at(i, j)); }
    void mask(std::size_t i, std::size_t j) { at(i, j) = masked_value(); }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Same geometry, zeroed values.
    FieldGrid like() const { return {x_min_, x_max_, k_min_, k_max_, nx_, nk_}; }

private:
    double x_min_, x_max_, k_min_, k_max_;
    std::size_t nx_, nk_;
    std::vector<double> values_;
};

namespace quadrature {

/// Weights of the extended trapezoidal rule with fourth-order end
/// corrections (3/8, 7/6, 23/24, 1, ..., 1, 23/24, 7/6, 3/8) times h.
/// Falls back to the plain trapezoidal rule below 6 nodes.
inline std::vector<double> corrected_trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    if (n < 6) {
        w.front() = w.back() = 0.5 * h;
        return w;
    }
    const double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (std::size_t j = 0; j < 3; ++j) {
        w[j] = ends[j] * h;
        w[n - 1 - j] = ends[j] * h;
    }
    return w;
}

/// Corrected-trapezoid weights on n uniform nodes, with the rule restarted
/// at `split` so that a kink at that node does not spoil the order.
inline std::vector<double> split_weights(std::size_t n, double h, std::size_t split) {
    if (split == 0 || split + 1 >= n) return corrected_trapezoid_weights(n, h);
    auto left = corrected_trapezoid_weights(split + 1, h);
    auto right = corrected_trapezoid_weights(n - split, h);
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i <= split; ++i) w[i] += left[i];
    for (std::size_t i = 0; i < right.size(); ++i) w[split + i] += right[i];
    return w;
}

/// Index of a node lying on zero (within rounding), or 0 if none is interior.
inline std::size_t zero_node(double lo, double hi, std::size_t n) {
    if (!(lo < 0.0 && hi > 0.0)) return 0;
    const double h = (hi - lo) / static_cast<double>(n - 1);
    const double pos = -lo / h;
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9) return 0;
    return static_cast<std::size_t>(r);
}

}  // namespace quadrature
}  // namespace wwflow
