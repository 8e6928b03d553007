#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "wwflow/errors.hpp"

namespace wwflow {

using ComplexValue = std::complex<double>;

namespace specfun {

/// Largest Hermite order accepted: 2*eta+1 for eta up to 80.
inline constexpr int kMaxHermiteOrder = 161;

/// Physicists' Hermite polynomial H_n(u) from the three-term recurrence
/// H_{n+1} = 2u H_n - 2n H_{n-1}.
inline double hermite(int n, double u) {
    if (n < 0 || n > kMaxHermiteOrder) {
        throw DomainError("hermite: order " + std::to_string(n) + " outside [0, " +
                          std::to_string(kMaxHermiteOrder) + "]");
    }
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * u;
    for (int m = 1; m < n; ++m) {
        const double next = 2.0 * u * cur - 2.0 * m * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// H_0(u) .. H_nmax(u) in one pass.
inline std::vector<double> hermite_table(int nmax, double u) {
    if (nmax < 0 || nmax > kMaxHermiteOrder) {
        throw DomainError("hermite_table: order " + std::to_string(nmax) + " outside [0, " +
                          std::to_string(kMaxHermiteOrder) + "]");
    }
    std::vector<double> h(static_cast<std::size_t>(nmax) + 1);
    h[0] = 1.0;
    if (nmax >= 1) h[1] = 2.0 * u;
    for (int m = 1; m < nmax; ++m) h[m + 1] = 2.0 * u * h[m] - 2.0 * m * h[m - 1];
    return h;
}

/// Partial sum of sum_eta H_{2eta+1}(u) s^{2eta+1} / (2eta+1)!, eta = 0..eta_max.
/// The full series equals sinh(2su) exp(-s^2).
inline double odd_hermite_sum(double u, double s, int eta_max) {
    if (eta_max < 0) throw DomainError("odd_hermite_sum: eta_max must be non-negative");
    const auto h = hermite_table(2 * eta_max + 1, u);
    double sum = 0.0;
    double factorial = 1.0;  // (2eta+1)!
    double power = s;        // s^(2eta+1)
    for (int eta = 0; eta <= eta_max; ++eta) {
        const int n = 2 * eta + 1;
        if (eta > 0) {
            factorial *= static_cast<double>(n - 1) * n;
            power *= s * s;
        }
        sum += h[static_cast<std::size_t>(n)] * power / factorial;
    }
    return sum;
}

namespace detail {

inline constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;

// erf(z) = 2/sqrt(pi) sum (-1)^n z^(2n+1) / (n! (2n+1)).
// Terms do not cancel near the imaginary axis.
inline ComplexValue erf_maclaurin(ComplexValue z) {
    const ComplexValue mz2 = -z * z;
    ComplexValue term = z;  // (-z^2)^n z / n!
    ComplexValue sum = z;
    for (int n = 1; n < 600; ++n) {
        term *= mz2 / static_cast<double>(n);
        const ComplexValue add = term / static_cast<double>(2 * n + 1);
        sum += add;
        if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
    }
    return kTwoOverSqrtPi * sum;
}

// erf(z) = 2/sqrt(pi) exp(-z^2) sum (2z^2)^n z / (2n+1)!!.
// Terms do not cancel near the real axis.
inline ComplexValue erf_kummer(ComplexValue z) {
    const ComplexValue tz2 = 2.0 * z * z;
    ComplexValue term = z;
    ComplexValue sum = z;
    for (int n = 1; n < 600; ++n) {
        term *= tz2 / static_cast<double>(2 * n + 1);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return kTwoOverSqrtPi * std::exp(-z * z) * sum;
}

// Faddeeva w(zeta), Im zeta >= 0, from the Laplace continued fraction
// w = (i/sqrt(pi)) / (zeta - (1/2)/(zeta - (2/2)/(zeta - (3/2)/...))).
inline ComplexValue faddeeva_cf(ComplexValue zeta, int depth = 120) {
    ComplexValue f = zeta;
    for (int n = depth; n >= 1; --n) f = zeta - (0.5 * n) / f;
    return ComplexValue(0.0, std::numbers::inv_sqrtpi) / f;
}

// First quadrant only (Re z >= 0, Im z >= 0).
inline ComplexValue erf_first_quadrant(ComplexValue z) {
    const double r = std::abs(z);
    if (r < 3.0) return z.imag() >= z.real() ? erf_maclaurin(z) : erf_kummer(z);
    if (z.real() < 1.0 && r <= 8.0) return erf_maclaurin(z);
    // erfc(z) = exp(-z^2) w(iz)
    return 1.0 - std::exp(-z * z) * faddeeva_cf(ComplexValue(-z.imag(), z.real()));
}

}  // namespace detail

/// Radius below which erf_complex sums a power series.
inline constexpr double kErfSeriesRadius = 3.0;
/// Beyond this modulus erf_complex saturates to sign(Re z).
inline constexpr double kErfSaturationRadius = 30.0;

/// Complex error function.
///
/// |z| < 3: Maclaurin series when |Im z| >= |Re z|, Kummer's series otherwise.
/// |z| >= 3: Maclaurin series in the strip |Re z| < 1 up to |z| = 8, elsewhere
/// erf = 1 - exp(-z^2) w(iz) with w from a 120-level continued fraction.
/// Relative accuracy is better than 1e-12 on |z| <= 8. Odd symmetry and
/// erf(conj z) = conj erf(z) hold exactly. For |z| > 30 the result is
/// sign(Re z), or +/-i*inf on the imaginary axis; magnitudes that exceed
/// double range near the imaginary axis overflow to inf.
inline ComplexValue erf_complex(ComplexValue z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("erf_complex: non-finite argument");
    }
    if (z.real() == 0.0 && z.imag() == 0.0) return z;
    if (std::abs(z) > kErfSaturationRadius) {
        if (z.real() == 0.0) {
            return {0.0, std::copysign(std::numeric_limits<double>::infinity(), z.imag())};
        }
        return {std::copysign(1.0, z.real()), 0.0};
    }
    const bool flip_re = std::signbit(z.real());
    const bool flip_im = std::signbit(z.imag());
    ComplexValue w = detail::erf_first_quadrant({std::abs(z.real()), std::abs(z.imag())});
    // erf(-z) = -erf(z), erf(conj z) = conj erf(z)
    if (flip_re) w = -std::conj(w);
    if (flip_im) w = std::conj(w);
    return w;
}

}  // namespace specfun
}  // namespace wwflow
