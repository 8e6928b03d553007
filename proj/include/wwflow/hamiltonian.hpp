#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "wwflow/errors.hpp"

namespace wwflow {

/// Odd derivatives of a one-variable term written as
///   d^{2eta+1}f/du^{2eta+1} = linear_coefficient * [eta == 0] + rate^{2eta+1} * profile(u).
/// Closed-form currents exist only for terms of this shape.
struct OddDerivativeFactorization {
    double linear_coefficient = 0.0;
    double rate = 1.0;
    std::function<double(double)> profile;

    double odd_derivative(int eta, double u) const {
        const double lin = eta == 0 ? linear_coefficient : 0.0;
        return lin + std::pow(rate, 2 * eta + 1) * profile(u);
    }
};

/// One half of a separable Hamiltonian: K(k) or V(x).
struct HamiltonianTerm {
    std::function<double(double)> value;
    /// derivative(n, u) = d^n f / du^n for n >= 1.
    std::function<double(int, double)> derivative;
    std::optional<OddDerivativeFactorization> factorization;

    double odd_derivative(int eta, double u) const { return derivative(2 * eta + 1, u); }
};

enum class HamiltonianKind { typical_lv, modified_lv, harmonic, custom };

/// H(x, k) = K(k) + V(x). Immutable once built.
class SeparableHamiltonian {
public:
    SeparableHamiltonian(HamiltonianKind kind, std::string label, double g, HamiltonianTerm kinetic,
                         HamiltonianTerm potential)
        : kind_(kind),
          label_(std::move(label)),
          g_(g),
          kinetic_(std::move(kinetic)),
          potential_(std::move(potential)) {}

    HamiltonianKind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    double g() const { return g_; }
    const HamiltonianTerm& kinetic() const { return kinetic_; }
    const HamiltonianTerm& potential() const { return potential_; }

    double operator()(double x, double k) const { return kinetic_.value(k) + potential_.value(x); }

    double kinetic_derivative(int n, double k) const { return kinetic_.derivative(n, k); }
    double potential_derivative(int n, double x) const { return potential_.derivative(n, x); }
    double odd_derivative_K(int eta, double k) const { return kinetic_.odd_derivative(eta, k); }
    double odd_derivative_V(int eta, double x) const { return potential_.odd_derivative(eta, x); }

    /// Both terms carry an odd-derivative factorization.
    bool factorized() const {
        return kinetic_.factorization.has_value() && potential_.factorization.has_value();
    }

    /// Minimum of H, attained at the origin for all built-in Hamiltonians.
    double minimum_energy() const { return (*this)(0.0, 0.0); }

private:
    HamiltonianKind kind_;
    std::string label_;
    double g_;
    HamiltonianTerm kinetic_;
    HamiltonianTerm potential_;
};

namespace detail {

inline void require_positive_g(double g, const char* who) {
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw DomainError(std::string(who) + ": anisotropy g must be positive, got " + std::to_string(g));
    }
}

// u + exp(-u), scaled by c.
inline HamiltonianTerm lv_term(double c) {
    HamiltonianTerm t;
    t.value = [c](double u) { return c * (u + std::exp(-u)); };
    t.derivative = [c](int n, double u) {
        if (n == 1) return c * (1.0 - std::exp(-u));
        return c * ((n % 2 == 0) ? 1.0 : -1.0) * std::exp(-u);
    };
    t.factorization = OddDerivativeFactorization{c, -1.0, [c](double u) { return c * std::exp(-u); }};
    return t;
}

inline HamiltonianTerm cosh_term(double c) {
    HamiltonianTerm t;
    t.value = [c](double u) { return c * std::cosh(u); };
    t.derivative = [c](int n, double u) { return c * ((n % 2 == 0) ? std::cosh(u) : std::sinh(u)); };
    t.factorization = OddDerivativeFactorization{0.0, 1.0, [c](double u) { return c * std::sinh(u); }};
    return t;
}

inline HamiltonianTerm quadratic_term(double offset) {
    HamiltonianTerm t;
    t.value = [offset](double u) { return offset + 0.5 * u * u; };
    t.derivative = [](int n, double u) {
        if (n == 1) return u;
        return n == 2 ? 1.0 : 0.0;
    };
    return t;
}

}  // namespace detail

/// H = g x + k + g e^{-x} + e^{-k}.
inline SeparableHamiltonian make_typical_lv(double g) {
    detail::require_positive_g(g, "make_typical_lv");
    return {HamiltonianKind::typical_lv, "lv", g, detail::lv_term(1.0), detail::lv_term(g)};
}

/// H = cosh(k) + g cosh(x).
inline SeparableHamiltonian make_modified_lv(double g) {
    detail::require_positive_g(g, "make_modified_lv");
    return {HamiltonianKind::modified_lv, "mlv", g, detail::cosh_term(1.0), detail::cosh_term(g)};
}

/// Small-amplitude limit of both LV forms: H = (1 + g) + (x^2 + k^2)/2.
inline SeparableHamiltonian make_harmonic(double g) {
    detail::require_positive_g(g, "make_harmonic");
    return {HamiltonianKind::harmonic, "harmonic", g, detail::quadratic_term(1.0),
            detail::quadratic_term(g)};
}

/// Lookup by CLI label: "lv", "mlv" or "harmonic".
inline SeparableHamiltonian make_hamiltonian(std::string_view label, double g) {
    if (label == "lv") return make_typical_lv(g);
    if (label == "mlv") return make_modified_lv(g);
    if (label == "harmonic") return make_harmonic(g);
    throw DomainError("unknown hamiltonian '" + std::string(label) + "' (expected lv, mlv or harmonic)");
}

/// (dx/dtau, dk/dtau) = (dK/dk, -dV/dx).
inline std::pair<double, double> classical_velocity(const SeparableHamiltonian& h, double x, double k) {
    return {h.kinetic_derivative(1, k), -h.potential_derivative(1, x)};
}

}  // namespace wwflow
