#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "wwflow/errors.hpp"
#include "wwflow/grid.hpp"
#include "wwflow/hamiltonian.hpp"
#include "wwflow/specfun.hpp"

namespace wwflow {

enum class Axis { x, k };

/// G = (alpha^2/pi) exp(-alpha^2 (x^2 + k^2)).
struct GaussianEnsemble {
    double alpha = 1.0;
};

/// Product of gamma densities with integer shapes a (in x) and b (in k)
/// and rates alpha, beta; supported on the first quadrant.
struct GammaEnsemble {
    int a = 1;
    int b = 1;
    double alpha = 1.0;
    double beta = 1.0;
};

/// (1/4) G(|x|, |k|) with G a gamma ensemble of the same parameters.
struct LaplacianEnsemble {
    int a = 1;
    int b = 1;
    double alpha = 1.0;
    double beta = 1.0;

    GammaEnsemble folded() const { return {a, b, alpha, beta}; }
};

/// W = exp(-H(x, k)) / Z, normalized numerically. Stationary under the
/// classical flow of the same Hamiltonian.
struct ThermalEnsemble {
    std::shared_ptr<const SeparableHamiltonian> hamiltonian;
    double log_zx = 0.0;  // log of int exp(-V) dx
    double log_zk = 0.0;  // log of int exp(-K) dk
};

/// User-supplied density; derivatives fall back to central finite
/// differences (order <= kMaxOrder, accuracy degrades quickly with order).
struct CustomEnsemble {
    static constexpr int kMaxOrder = 6;
    std::function<double(double, double)> density;
    double step = 1e-3;
};

using Ensemble = std::variant<GaussianEnsemble, GammaEnsemble, LaplacianEnsemble, ThermalEnsemble, CustomEnsemble>;

inline GaussianEnsemble make_gaussian(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("gaussian ensemble: alpha must be positive");
    return {alpha};
}

namespace detail {

inline int integer_shape(double v, const char* name) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 64.0) {
        throw DomainError(std::string("gamma shape ") + name + " must be an integer in [1, 64], got " +
                          std::to_string(v));
    }
    return static_cast<int>(v);
}

inline void positive_rate(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("gamma rate ") + name + " must be positive");
}

}  // namespace detail

/// Shapes are taken as reals so that non-integer input is rejected here.
inline GammaEnsemble make_gamma(double a, double b, double alpha, double beta) {
    const int ia = detail::integer_shape(a, "a");
    const int ib = detail::integer_shape(b, "b");
    detail::positive_rate(alpha, "alpha");
    detail::positive_rate(beta, "beta");
    return {ia, ib, alpha, beta};
}

inline LaplacianEnsemble make_laplacian(double a, double b, double alpha, double beta) {
    const auto g = make_gamma(a, b, alpha, beta);
    return {g.a, g.b, g.alpha, g.beta};
}

inline ThermalEnsemble make_thermal(const SeparableHamiltonian& h) {
    ThermalEnsemble t;
    t.hamiltonian = std::make_shared<const SeparableHamiltonian>(h);
    boost::math::quadrature::sinh_sinh<double> integrator;
    // Shift by the minimum so the integrands peak at 1.
    const double v0 = h.potential().value(0.0);
    const double k0 = h.kinetic().value(0.0);
    const auto fx = [&](double x) { return std::exp(-(h.potential().value(x) - v0)); };
    const auto fk = [&](double k) { return std::exp(-(h.kinetic().value(k) - k0)); };
    t.log_zx = std::log(integrator.integrate(fx, 1e-14)) - v0;
    t.log_zk = std::log(integrator.integrate(fk, 1e-14)) - k0;
    return t;
}

namespace detail {

inline double gamma_norm(int shape, double rate) {
    return std::pow(rate, shape) / std::tgamma(static_cast<double>(shape));
}

// d^n/du^n [u^{s-1} exp(-r u)] for u > 0 via Leibniz.
inline double gamma_factor_derivative(int n, int s, double r, double u) {
    const double e = std::exp(-r * u);
    double sum = 0.0;
    double binom = 1.0;    // C(n, j)
    double falling = 1.0;  // (s-1)!/(s-1-j)!
    for (int j = 0; j <= std::min(n, s - 1); ++j) {
        if (j > 0) {
            binom *= static_cast<double>(n - j + 1) / j;
            falling *= static_cast<double>(s - j);
        }
        sum += binom * falling * std::pow(u, s - 1 - j) * std::pow(-r, n - j);
    }
    return sum * e;
}

inline double gamma_factor(int s, double r, double u) { return std::pow(u, s - 1) * std::exp(-r * u); }

// All derivatives 0..nmax of exp(-f(u)) given f's derivatives.
inline std::vector<double> exp_neg_derivatives(const HamiltonianTerm& term, double shift, int nmax, double u) {
    std::vector<double> q(static_cast<std::size_t>(nmax) + 1, 0.0);  // q^(j) = -f^(j)
    for (int j = 1; j <= nmax; ++j) q[j] = -term.derivative(j, u);
    std::vector<double> d(static_cast<std::size_t>(nmax) + 1, 0.0);
    d[0] = std::exp(-(term.value(u) + shift));
    for (int n = 1; n <= nmax; ++n) {
        double s = 0.0;
        double binom = 1.0;  // C(n-1, j)
        for (int j = 0; j <= n - 1; ++j) {
            if (j > 0) binom *= static_cast<double>(n - j) / j;
            s += binom * q[j + 1] * d[n - 1 - j];
        }
        d[n] = s;
    }
    return d;
}

inline double fd_derivative(const std::function<double(double)>& f, int n, double u, double h) {
    // n-th central difference.
    double s = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= n; ++j) {
        if (j > 0) binom *= static_cast<double>(n - j + 1) / j;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        s += sign * binom * f(u + (0.5 * n - j) * h);
    }
    return s / std::pow(h, n);
}

inline void require_gamma_support(double x, double k) {
    if (!(x > 0.0) || !(k > 0.0)) {
        throw DomainError("gamma ensemble: point (" + std::to_string(x) + ", " + std::to_string(k) +
                          ") is outside the open first quadrant");
    }
}

}  // namespace detail

/// Distribution value; zero outside the gamma support.
inline double eval(const Ensemble& e, double x, double k) {
    return std::visit(
        [&](const auto& ens) -> double {
            using T = std::decay_t<decltype(ens)>;
            if constexpr (std::is_same_v<T, GaussianEnsemble>) {
                const double a2 = ens.alpha * ens.alpha;
                return a2 * std::numbers::inv_pi * std::exp(-a2 * (x * x + k * k));
            } else if constexpr (std::is_same_v<T, GammaEnsemble>) {
                if (x < 0.0 || k < 0.0) return 0.0;
                return detail::gamma_norm(ens.a, ens.alpha) * detail::gamma_norm(ens.b, ens.beta) *
                       detail::gamma_factor(ens.a, ens.alpha, x) * detail::gamma_factor(ens.b, ens.beta, k);
            } else if constexpr (std::is_same_v<T, LaplacianEnsemble>) {
                return 0.25 * eval(Ensemble{ens.folded()}, std::abs(x), std::abs(k));
            } else if constexpr (std::is_same_v<T, ThermalEnsemble>) {
                return std::exp(-((*ens.hamiltonian)(x, k) + ens.log_zx + ens.log_zk));
            } else {
                return ens.density(x, k);
            }
        },
        e);
}

/// Derivatives of W along one axis, orders 0..nmax, at (x, k).
///
/// Gaussian: (-alpha)^n H_n(alpha*zeta) G. Gamma: Leibniz expansion of
/// u^{s-1} e^{-r u}; requires x, k > 0. Laplacian: the gamma result at
/// (|x|, |k|) times sign^n / 4; throws SingularPointError on the
/// differentiated axis. Thermal: exponential recurrence on the Hamiltonian
/// term. Custom: central finite differences up to CustomEnsemble::kMaxOrder.
inline std::vector<double> derivative_table(const Ensemble& e, Axis axis, int nmax, double x, double k) {
    if (nmax < 0) throw DomainError("derivative_table: negative order");
    return std::visit(
        [&](const auto& ens) -> std::vector<double> {
            using T = std::decay_t<decltype(ens)>;
            std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
            const double along = axis == Axis::x ? x : k;
            if constexpr (std::is_same_v<T, GaussianEnsemble>) {
                const double g = eval(e, x, k);
                const auto h = specfun::hermite_table(nmax, ens.alpha * along);
                double scale = 1.0;
                for (int n = 0; n <= nmax; ++n) {
                    out[n] = scale * h[n] * g;
                    scale *= -ens.alpha;
                }
            } else if constexpr (std::is_same_v<T, GammaEnsemble>) {
                detail::require_gamma_support(x, k);
                const double norm = detail::gamma_norm(ens.a, ens.alpha) * detail::gamma_norm(ens.b, ens.beta);
                const int s = axis == Axis::x ? ens.a : ens.b;
                const double r = axis == Axis::x ? ens.alpha : ens.beta;
                const double other = axis == Axis::x ? detail::gamma_factor(ens.b, ens.beta, k)
                                                     : detail::gamma_factor(ens.a, ens.alpha, x);
                for (int n = 0; n <= nmax; ++n) out[n] = norm * other * detail::gamma_factor_derivative(n, s, r, along);
            } else if constexpr (std::is_same_v<T, LaplacianEnsemble>) {
                if (along == 0.0 && nmax >= 1) {
                    throw SingularPointError("laplacian ensemble is not differentiable on the axis " +
                                             std::string(axis == Axis::x ? "x = 0" : "k = 0"));
                }
                const double ax = std::abs(x), ak = std::abs(k);
                if (ax == 0.0 || ak == 0.0) {
                    // Off-axis derivative along the other coordinate: the folded
                    // factor on the zero axis is evaluated directly.
                    const auto g = ens.folded();
                    const double norm = detail::gamma_norm(g.a, g.alpha) * detail::gamma_norm(g.b, g.beta);
                    const int s = axis == Axis::x ? g.a : g.b;
                    const double r = axis == Axis::x ? g.alpha : g.beta;
                    const double other = axis == Axis::x ? detail::gamma_factor(g.b, g.beta, ak)
                                                         : detail::gamma_factor(g.a, g.alpha, ax);
                    const double sgn = along < 0.0 ? -1.0 : 1.0;
                    double sp = 1.0;
                    for (int n = 0; n <= nmax; ++n) {
                        out[n] = 0.25 * sp * norm * other *
                                 detail::gamma_factor_derivative(n, s, r, std::abs(along));
                        sp *= sgn;
                    }
                    if (nmax == 0) out[0] = eval(e, x, k);
                } else {
                    const auto folded = derivative_table(Ensemble{ens.folded()}, axis, nmax, ax, ak);
                    const double sgn = along < 0.0 ? -1.0 : 1.0;
                    double sp = 1.0;
                    for (int n = 0; n <= nmax; ++n) {
                        out[n] = 0.25 * sp * folded[n];
                        sp *= sgn;
                    }
                }
            } else if constexpr (std::is_same_v<T, ThermalEnsemble>) {
                const auto& h = *ens.hamiltonian;
                const auto& term = axis == Axis::x ? h.potential() : h.kinetic();
                const double other = axis == Axis::x ? std::exp(-(h.kinetic().value(k) + ens.log_zk))
                                                     : std::exp(-(h.potential().value(x) + ens.log_zx));
                const double shift = axis == Axis::x ? ens.log_zx : ens.log_zk;
                const auto d = detail::exp_neg_derivatives(term, shift, nmax, along);
                for (int n = 0; n <= nmax; ++n) out[n] = d[n] * other;
            } else {
                if (nmax > CustomEnsemble::kMaxOrder) {
                    throw UnsupportedConfigurationError("custom ensemble: finite differences limited to order " +
                                                        std::to_string(CustomEnsemble::kMaxOrder));
                }
                const std::function<double(double)> f = [&](double u) {
                    return axis == Axis::x ? ens.density(u, k) : ens.density(x, u);
                };
                out[0] = f(along);
                for (int n = 1; n <= nmax; ++n) out[n] = detail::fd_derivative(f, n, along, ens.step);
            }
            return out;
        },
        e);
}

inline double partial_derivative(const Ensemble& e, int order, Axis axis, double x, double k) {
    if (order < 0) throw DomainError("partial_derivative: negative order");
    return derivative_table(e, axis, order, x, k).back();
}

/// Support restriction of the ensemble, used to validate evaluation points.
inline void require_differentiable(const Ensemble& e, double x, double k) {
    if (const auto* g = std::get_if<GammaEnsemble>(&e)) {
        (void)g;
        detail::require_gamma_support(x, k);
    } else if (std::holds_alternative<LaplacianEnsemble>(e)) {
        if (x == 0.0 || k == 0.0) throw SingularPointError("laplacian ensemble is not differentiable on the axes");
    }
}

inline std::string describe(const Ensemble& e) {
    return std::visit(
        [](const auto& ens) -> std::string {
            using T = std::decay_t<decltype(ens)>;
            if constexpr (std::is_same_v<T, GaussianEnsemble>) {
                return "gaussian(alpha=" + std::to_string(ens.alpha) + ")";
            } else if constexpr (std::is_same_v<T, GammaEnsemble> || std::is_same_v<T, LaplacianEnsemble>) {
                return std::string(std::is_same_v<T, GammaEnsemble> ? "gamma" : "laplacian") +
                       "(a=" + std::to_string(ens.a) + ", b=" + std::to_string(ens.b) +
                       ", alpha=" + std::to_string(ens.alpha) + ", beta=" + std::to_string(ens.beta) + ")";
            } else if constexpr (std::is_same_v<T, ThermalEnsemble>) {
                return "thermal(" + ens.hamiltonian->label() + ", g=" + std::to_string(ens.hamiltonian->g()) + ")";
            } else {
                return "custom";
            }
        },
        e);
}

// ---------------------------------------------------------------------------
// Phase-space averages. Quadrature uses the corrected trapezoidal rule on the
// grid nodes; for the Laplacian ensemble the rule restarts at a node on zero.
// Gaussian masses converge far faster than the 1e-6 coverage limit once the
// grid spans +-6/alpha; gamma grids carry a fourth-order error from the
// x = 0 edge, a few 1e-6 at spacing 0.06/alpha for shapes 3 and 4.

namespace detail {

inline std::pair<std::vector<double>, std::vector<double>> grid_weights(const Ensemble& e, const FieldGrid& grid) {
    std::size_t sx = 0, sk = 0;
    if (std::holds_alternative<LaplacianEnsemble>(e)) {
        sx = quadrature::zero_node(grid.x_min(), grid.x_max(), grid.nx());
        sk = quadrature::zero_node(grid.k_min(), grid.k_max(), grid.nk());
    }
    return {quadrature::split_weights(grid.nx(), grid.dx(), sx), quadrature::split_weights(grid.nk(), grid.dk(), sk)};
}

template <class F>
double integrate_on(const Ensemble& e, const FieldGrid& grid, F&& integrand) {
    const auto [wx, wk] = grid_weights(e, grid);
    double total = 0.0;
    for (std::size_t j = 0; j < grid.nk(); ++j) {
        double row = 0.0;
        for (std::size_t i = 0; i < grid.nx(); ++i) row += wx[i] * integrand(grid.x(i), grid.k(j));
        total += wk[j] * row;
    }
    return total;
}

}  // namespace detail

/// Integral of W over the grid.
inline double total_mass(const Ensemble& e, const FieldGrid& grid) {
    return detail::integrate_on(e, grid, [&](double x, double k) { return eval(e, x, k); });
}

/// Integral of W * O over the grid.
inline double expectation(const Ensemble& e, const std::function<double(double, double)>& observable,
                          const FieldGrid& grid) {
    return detail::integrate_on(e, grid, [&](double x, double k) { return eval(e, x, k) * observable(x, k); });
}

struct PurityReport {
    double value = 0.0;
    double tail_mass = 0.0;
    /// Above the pure-state bound of 1 (e.g. Gaussians with alpha > 1).
    bool exceeds_pure_bound = false;
};

inline constexpr double kMaxTailMass = 1e-6;

/// 2*pi * integral of W^2. Throws CoverageError if the grid misses more than
/// 1e-6 of the probability mass.
inline PurityReport purity(const Ensemble& e, const FieldGrid& grid) {
    const double tail = std::abs(1.0 - total_mass(e, grid));
    if (tail > kMaxTailMass) {
        throw CoverageError("purity: grid misses " + std::to_string(tail) + " of the probability mass", tail);
    }
    PurityReport r;
    r.tail_mass = tail;
    r.value = 2.0 * std::numbers::pi * detail::integrate_on(e, grid, [&](double x, double k) {
                  const double w = eval(e, x, k);
                  return w * w;
              });
    r.exceeds_pure_bound = r.value > 1.0;
    return r;
}

/// One-dimensional marginal: W integrated over the other coordinate with
/// double-exponential quadrature.
inline double marginal(const Ensemble& e, Axis axis, double coordinate) {
    const auto f = [&](double u) {
        return axis == Axis::x ? eval(e, coordinate, u) : eval(e, u, coordinate);
    };
    const bool half_line = std::holds_alternative<GammaEnsemble>(e);
    const bool folded = std::holds_alternative<LaplacianEnsemble>(e);
    boost::math::quadrature::exp_sinh<double> semi;
    if (half_line) {
        if (coordinate < 0.0) return 0.0;
        return semi.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
    }
    if (folded) {
        // Even integrand with a kink at 0.
        return 2.0 * semi.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
    }
    boost::math::quadrature::sinh_sinh<double> whole;
    return whole.integrate(f, 1e-13);
}

}  // namespace wwflow
