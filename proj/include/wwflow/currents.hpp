#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "wwflow/ensembles.hpp"
#include "wwflow/errors.hpp"
#include "wwflow/hamiltonian.hpp"
#include "wwflow/jet.hpp"
#include "wwflow/specfun.hpp"

namespace wwflow {

/// Divergence components (d/dx J_x, d/dk J_k).
struct Divergence {
    double x = 0.0;
    double k = 0.0;
    double total() const { return x + k; }
};

/// Current components (J_x, J_k).
struct Current {
    double x = 0.0;
    double k = 0.0;
};

struct Stationarity {
    double total = 0.0;
    double classical = 0.0;
    double quantum = 0.0;
};

enum class Method { series, closed_form, classical };

/// Truncation policy of the eta-series: stop once two consecutive terms are
/// below tol relative to max(|partial sum|, largest term seen), or fail at eta_max.
struct SeriesOptions {
    int eta_max = 40;
    double tol = 1e-14;
};

/// Largest imaginary residue tolerated in an integrated current.
inline constexpr double kImaginaryResidueLimit = 1e-10;

// ---------------------------------------------------------------------------
// Generic eta-series engine.
//
//   dJx/dx = + sum_eta c_eta K^(2eta+1)(k) d_x^(2eta+1) W
//   dJk/dk = - sum_eta c_eta V^(2eta+1)(x) d_k^(2eta+1) W
//   Jx     = + sum_eta c_eta K^(2eta+1)(k) d_x^(2eta) W
//   Jk     = - sum_eta c_eta V^(2eta+1)(x) d_k^(2eta) W
//
// with c_eta = (i/2)^(2eta) / (2eta+1)! = (-1/4)^eta / (2eta+1)!.

namespace detail {

enum class SeriesKind { divergence, current };

inline double sum_series(const HamiltonianTerm& term, double hamiltonian_at, const Ensemble& e, Axis axis,
                         SeriesKind kind, double x, double k, const SeriesOptions& opt, int first_eta = 0) {
    if (opt.eta_max < 0 || opt.eta_max > 80) throw DomainError("series: eta_max must lie in [0, 80]");
    // Only request W-derivatives the Hamiltonian actually needs.
    int needed = -1;
    std::vector<double> hder(static_cast<std::size_t>(opt.eta_max) + 1);
    for (int eta = 0; eta <= opt.eta_max; ++eta) {
        hder[eta] = term.odd_derivative(eta, hamiltonian_at);
        if (hder[eta] != 0.0) needed = eta;
    }
    if (needed < first_eta) return 0.0;
    const int offset = kind == SeriesKind::divergence ? 1 : 0;
    const auto wder = derivative_table(e, axis, 2 * needed + offset, x, k);

    double sum = 0.0;
    double biggest = 0.0;
    double coeff = 1.0;  // c_eta
    int quiet = 0;
    double last = 0.0;
    for (int eta = 0; eta <= opt.eta_max; ++eta) {
        if (eta > 0) coeff *= -0.25 / ((2.0 * eta) * (2.0 * eta + 1.0));
        double term_value = 0.0;
        if (eta <= needed && eta >= first_eta) term_value = coeff * hder[eta] * wder[2 * eta + offset];
        sum += term_value;
        biggest = std::max(biggest, std::abs(term_value));
        last = std::abs(term_value);
        if (eta >= first_eta && last <= opt.tol * std::max(std::abs(sum), biggest)) {
            if (++quiet >= 2) return sum;
        } else {
            quiet = 0;
        }
    }
    if (last <= opt.tol * std::max(std::abs(sum), biggest)) return sum;
    throw ConvergenceError("eta-series did not converge by eta_max = " + std::to_string(opt.eta_max) +
                               " (last term " + std::to_string(last) + ")",
                           last);
}

}  // namespace detail

inline double series_div_x(const SeparableHamiltonian& h, const Ensemble& e, double x, double k,
                           const SeriesOptions& opt = {}) {
    return detail::sum_series(h.kinetic(), k, e, Axis::x, detail::SeriesKind::divergence, x, k, opt);
}

inline double series_div_k(const SeparableHamiltonian& h, const Ensemble& e, double x, double k,
                           const SeriesOptions& opt = {}) {
    return -detail::sum_series(h.potential(), x, e, Axis::k, detail::SeriesKind::divergence, x, k, opt);
}

inline Current series_current(const SeparableHamiltonian& h, const Ensemble& e, double x, double k,
                              const SeriesOptions& opt = {}) {
    return {detail::sum_series(h.kinetic(), k, e, Axis::x, detail::SeriesKind::current, x, k, opt),
            -detail::sum_series(h.potential(), x, e, Axis::k, detail::SeriesKind::current, x, k, opt)};
}

/// eta >= 1 part of the divergence, summed directly.
inline Divergence series_quantum_div(const SeparableHamiltonian& h, const Ensemble& e, double x, double k,
                                     const SeriesOptions& opt = {}) {
    return {detail::sum_series(h.kinetic(), k, e, Axis::x, detail::SeriesKind::divergence, x, k, opt, 1),
            -detail::sum_series(h.potential(), x, e, Axis::k, detail::SeriesKind::divergence, x, k, opt, 1)};
}

// ---------------------------------------------------------------------------
// Classical (eta = 0) limit: J^C = (W dK/dk, -W dV/dx).

inline Current classical_current(const SeparableHamiltonian& h, const Ensemble& e, double x, double k) {
    const double w = eval(e, x, k);
    return {w * h.kinetic_derivative(1, k), -w * h.potential_derivative(1, x)};
}

inline Divergence classical_div(const SeparableHamiltonian& h, const Ensemble& e, double x, double k) {
    return {h.kinetic_derivative(1, k) * partial_derivative(e, 1, Axis::x, x, k),
            -h.potential_derivative(1, x) * partial_derivative(e, 1, Axis::k, x, k)};
}

// ---------------------------------------------------------------------------
// Closed forms, Gaussian ensemble.

enum class LvKind { typical, modified };

inline LvKind lv_kind(const SeparableHamiltonian& h) {
    if (h.kind() == HamiltonianKind::typical_lv) return LvKind::typical;
    if (h.kind() == HamiltonianKind::modified_lv) return LvKind::modified;
    throw UnsupportedConfigurationError("closed forms exist only for the typical and modified LV Hamiltonians, got '" +
                                        h.label() + "'");
}

inline double gaussian_value(double alpha, double x, double k) {
    const double a2 = alpha * alpha;
    return a2 * std::numbers::inv_pi * std::exp(-a2 * (x * x + k * k));
}

/// Resummed divergences for Gaussian ensembles.
///   typical:  (-2[a^2 x - sin(a^2 x) e^{a^2/4 - k}] G, +2g[a^2 k - sin(a^2 k) e^{a^2/4 - x}] G)
///   modified: (-2 sinh(k) sin(a^2 x) e^{a^2/4} G,      +2g sinh(x) sin(a^2 k) e^{a^2/4} G)
inline Divergence closed_gaussian_div(LvKind kind, double alpha, double g, double x, double k) {
    const double a2 = alpha * alpha;
    const double gv = gaussian_value(alpha, x, k);
    const double q = std::exp(a2 / 4.0);
    if (kind == LvKind::typical) {
        return {-2.0 * (a2 * x - std::sin(a2 * x) * q * std::exp(-k)) * gv,
                2.0 * g * (a2 * k - std::sin(a2 * k) * q * std::exp(-x)) * gv};
    }
    return {-2.0 * std::sinh(k) * std::sin(a2 * x) * q * gv, 2.0 * g * std::sinh(x) * std::sin(a2 * k) * q * gv};
}

/// Classical part of closed_gaussian_div.
inline Divergence closed_gaussian_classical_div(LvKind kind, double alpha, double g, double x, double k) {
    const double a2 = alpha * alpha;
    const double gv = gaussian_value(alpha, x, k);
    if (kind == LvKind::typical) {
        return {-2.0 * a2 * x * (1.0 - std::exp(-k)) * gv, 2.0 * g * a2 * k * (1.0 - std::exp(-x)) * gv};
    }
    return {-2.0 * a2 * x * std::sinh(k) * gv, 2.0 * g * a2 * k * std::sinh(x) * gv};
}

namespace detail {

// i * {Erf[a(u - i/2)] - Erf[a(u + i/2)]}, which is real.
inline double erf_bracket_times_i(double alpha, double u) {
    const ComplexValue lo = specfun::erf_complex({alpha * u, -alpha / 2.0});
    const ComplexValue hi = specfun::erf_complex({alpha * u, alpha / 2.0});
    const ComplexValue v = ComplexValue(0.0, 1.0) * (lo - hi);
    if (std::abs(v.imag()) > kImaginaryResidueLimit) {
        throw NumericalConsistencyError("erf bracket has imaginary residue " + std::to_string(v.imag()));
    }
    return v.real();
}

}  // namespace detail

/// Integrated currents for Gaussian ensembles (decaying at infinity).
///   typical:  Jx = G - (a/(2 sqrt pi)) e^{-(k + a^2 k^2)} * i{Erf[a(x-i/2)] - Erf[a(x+i/2)]}
///             Jk = -g G + (g a/(2 sqrt pi)) e^{-(x + a^2 x^2)} * i{Erf[a(k-i/2)] - Erf[a(k+i/2)]}
///   modified: Jx = +(a/(2 sqrt pi)) sinh(k) e^{-a^2 k^2} * i{...x...}
///             Jk = -(g a/(2 sqrt pi)) sinh(x) e^{-a^2 x^2} * i{...k...}
inline Current closed_gaussian_current(LvKind kind, double alpha, double g, double x, double k) {
    const double c = alpha / (2.0 * std::sqrt(std::numbers::pi));
    const double a2 = alpha * alpha;
    const double bx = detail::erf_bracket_times_i(alpha, x);
    const double bk = detail::erf_bracket_times_i(alpha, k);
    if (kind == LvKind::typical) {
        const double gv = gaussian_value(alpha, x, k);
        return {gv - c * std::exp(-(k + a2 * k * k)) * bx, -g * gv + g * c * std::exp(-(x + a2 * x * x)) * bk};
    }
    return {c * std::sinh(k) * std::exp(-a2 * k * k) * bx, -g * c * std::sinh(x) * std::exp(-a2 * x * x) * bk};
}

// ---------------------------------------------------------------------------
// Closed forms, gamma / Laplacian ensembles.
//
// With C = beta^b alpha^a / (Gamma(a) Gamma(b)) held fixed and the rates
// inside the exponential differentiated through Jet arithmetic:
//   dJx/dx = (-1)^a k^{b-1} C d_alpha^{a-1} { [l_K alpha + 2 kappa(k) sin(alpha mu/2)] e^{-alpha x - beta k} }
//   dJk/dk = -(-1)^b x^{a-1} C d_beta^{b-1} { [l_V beta + 2 ups(x) sin(beta lambda/2)] e^{-alpha x - beta k} }
//   Jx     = -(-1)^a k^{b-1} C d_alpha^{a-1} { [l_K + kappa(k) (2/alpha) sin(alpha mu/2)] e^{...} }
//   Jk     = +(-1)^b x^{a-1} C d_beta^{b-1}  { [l_V + ups(x) (2/beta) sin(beta lambda/2)] e^{...} }
// where (l, rate, profile) is the odd-derivative factorization of K or V.

namespace detail {

inline const OddDerivativeFactorization& factorization_of(const HamiltonianTerm& t, const char* which) {
    if (!t.factorization) {
        throw UnsupportedConfigurationError(std::string("closed forms need a factorized ") + which + " term");
    }
    return *t.factorization;
}

// Shared kernel: returns d_r^{s-1}{ [lin * (r or 1) + amp * f(r)] e^{-r u} } at r, times e^{-other}.
// `integrated` selects f(r) = (2/r) sin(r rate / 2) instead of 2 sin(r rate / 2).
inline double gamma_kernel(int shape, double rate_value, double u, double other_exponent, double lin, double amp,
                           double rate, bool integrated) {
    const int order = shape - 1;
    const Jet r = Jet::variable(rate_value, order);
    const Jet half = r * (0.5 * rate);
    Jet bracket;
    if (integrated) {
        bracket = lin + amp * (2.0 * sin(half) / r);
    } else {
        bracket = lin * r + amp * (2.0 * sin(half));
    }
    const Jet e = exp(-(r * u));
    return (bracket * e).derivative(order) * std::exp(-other_exponent);
}

struct GammaPoint {
    double xw, kw;  // coordinates inside W
    double xh, kh;  // coordinates inside the Hamiltonian profiles
};

inline Divergence gamma_div_at(const SeparableHamiltonian& h, const GammaEnsemble& g, const GammaPoint& p) {
    const auto& fk = factorization_of(h.kinetic(), "kinetic");
    const auto& fv = factorization_of(h.potential(), "potential");
    const double c = gamma_norm(g.a, g.alpha) * gamma_norm(g.b, g.beta);
    const double sa = (g.a % 2 == 0) ? 1.0 : -1.0;
    const double sb = (g.b % 2 == 0) ? 1.0 : -1.0;
    const double dx = sa * std::pow(p.kw, g.b - 1) * c *
                      gamma_kernel(g.a, g.alpha, p.xw, g.beta * p.kw, fk.linear_coefficient, fk.profile(p.kh),
                                   fk.rate, false);
    const double dk = -sb * std::pow(p.xw, g.a - 1) * c *
                      gamma_kernel(g.b, g.beta, p.kw, g.alpha * p.xw, fv.linear_coefficient, fv.profile(p.xh),
                                   fv.rate, false);
    return {dx, dk};
}

inline Current gamma_current_at(const SeparableHamiltonian& h, const GammaEnsemble& g, const GammaPoint& p) {
    const auto& fk = factorization_of(h.kinetic(), "kinetic");
    const auto& fv = factorization_of(h.potential(), "potential");
    const double c = gamma_norm(g.a, g.alpha) * gamma_norm(g.b, g.beta);
    const double sa = (g.a % 2 == 0) ? 1.0 : -1.0;
    const double sb = (g.b % 2 == 0) ? 1.0 : -1.0;
    const double jx = -sa * std::pow(p.kw, g.b - 1) * c *
                      gamma_kernel(g.a, g.alpha, p.xw, g.beta * p.kw, fk.linear_coefficient, fk.profile(p.kh),
                                   fk.rate, true);
    const double jk = sb * std::pow(p.xw, g.a - 1) * c *
                      gamma_kernel(g.b, g.beta, p.kw, g.alpha * p.xw, fv.linear_coefficient, fv.profile(p.xh),
                                   fv.rate, true);
    return {jx, jk};
}

}  // namespace detail

using GammaLikeEnsemble = std::variant<GammaEnsemble, LaplacianEnsemble>;

/// Closed-form divergences for gamma (x, k > 0) and Laplacian (x, k != 0)
/// ensembles. The Laplacian result is sign(x)/4 (resp. sign(k)/4) times
/// the gamma form at (|x|, |k|), with Hamiltonian profiles at (x, k).
inline Divergence gamma_current_div(const SeparableHamiltonian& h, const GammaLikeEnsemble& e, double x, double k) {
    lv_kind(h);
    if (const auto* g = std::get_if<GammaEnsemble>(&e)) {
        detail::require_gamma_support(x, k);
        return detail::gamma_div_at(h, *g, {x, k, x, k});
    }
    const auto& l = std::get<LaplacianEnsemble>(e);
    if (x == 0.0 || k == 0.0) throw SingularPointError("laplacian closed forms are undefined on the axes");
    const auto d = detail::gamma_div_at(h, l.folded(), {std::abs(x), std::abs(k), x, k});
    return {0.25 * std::copysign(1.0, x) * d.x, 0.25 * std::copysign(1.0, k) * d.k};
}

/// Closed-form integrated currents for gamma / Laplacian ensembles.
inline Current gamma_current(const SeparableHamiltonian& h, const GammaLikeEnsemble& e, double x, double k) {
    lv_kind(h);
    if (const auto* g = std::get_if<GammaEnsemble>(&e)) {
        detail::require_gamma_support(x, k);
        return detail::gamma_current_at(h, *g, {x, k, x, k});
    }
    const auto& l = std::get<LaplacianEnsemble>(e);
    if (x == 0.0 || k == 0.0) throw SingularPointError("laplacian closed forms are undefined on the axes");
    const auto c = detail::gamma_current_at(h, l.folded(), {std::abs(x), std::abs(k), x, k});
    return {0.25 * c.x, 0.25 * c.k};
}

// ---------------------------------------------------------------------------

/// Wigner current field of one ensemble under one Hamiltonian, evaluated by
/// the configured method. Immutable; all evaluators are pure.
class CurrentField {
public:
    CurrentField(SeparableHamiltonian h, Ensemble e, Method method, SeriesOptions opt = {}, double w_floor = 1e-12)
        : h_(std::move(h)), e_(std::move(e)), method_(method), opt_(opt), w_floor_(w_floor) {
        if (method_ == Method::closed_form) {
            lv_kind(h_);
            if (!closed_form_ensemble()) {
                throw UnsupportedConfigurationError("closed forms exist only for gaussian, gamma and laplacian ensembles");
            }
        }
    }

    const SeparableHamiltonian& hamiltonian() const { return h_; }
    const Ensemble& ensemble() const { return e_; }
    Method method() const { return method_; }
    const SeriesOptions& series_options() const { return opt_; }
    double w_floor() const { return w_floor_; }

    double density(double x, double k) const { return eval(e_, x, k); }

    Divergence divergence(double x, double k) const {
        require_differentiable(e_, x, k);
        switch (method_) {
            case Method::series:
                return {series_div_x(h_, e_, x, k, opt_), series_div_k(h_, e_, x, k, opt_)};
            case Method::classical:
                return classical_div(h_, e_, x, k);
            case Method::closed_form:
                break;
        }
        if (const auto* g = std::get_if<GaussianEnsemble>(&e_)) return closed_gaussian_div(lv_kind(h_), g->alpha, h_.g(), x, k);
        if (const auto* g = std::get_if<GammaEnsemble>(&e_)) return gamma_current_div(h_, *g, x, k);
        return gamma_current_div(h_, std::get<LaplacianEnsemble>(e_), x, k);
    }

    Current current(double x, double k) const {
        require_differentiable(e_, x, k);
        switch (method_) {
            case Method::series:
                return series_current(h_, e_, x, k, opt_);
            case Method::classical:
                return classical_current(h_, e_, x, k);
            case Method::closed_form:
                break;
        }
        if (const auto* g = std::get_if<GaussianEnsemble>(&e_)) return closed_gaussian_current(lv_kind(h_), g->alpha, h_.g(), x, k);
        if (const auto* g = std::get_if<GammaEnsemble>(&e_)) return gamma_current(h_, *g, x, k);
        return gamma_current(h_, std::get<LaplacianEnsemble>(e_), x, k);
    }

    Divergence classical_divergence(double x, double k) const {
        require_differentiable(e_, x, k);
        return classical_div(h_, e_, x, k);
    }

    /// Stationarity quantifier div J split into its eta = 0 part and the rest.
    Stationarity stationarity(double x, double k) const {
        const double total = divergence(x, k).total();
        const double classical = classical_div(h_, e_, x, k).total();
        return {total, classical, total - classical};
    }

    /// Liouvillianity quantifier div(J/W) = div J / W - J . grad W / W^2.
    /// Empty (masked) where W <= w_floor.
    std::optional<double> liouvillianity(double x, double k) const {
        require_differentiable(e_, x, k);
        const double w = eval(e_, x, k);
        if (!(w > w_floor_)) return std::nullopt;
        const Divergence d = divergence(x, k);
        const Current j = current(x, k);
        const double wx = partial_derivative(e_, 1, Axis::x, x, k);
        const double wk = partial_derivative(e_, 1, Axis::k, x, k);
        return d.total() / w - (j.x * wx + j.k * wk) / (w * w);
    }

private:
    bool closed_form_ensemble() const {
        return std::holds_alternative<GaussianEnsemble>(e_) || std::holds_alternative<GammaEnsemble>(e_) ||
               std::holds_alternative<LaplacianEnsemble>(e_);
    }

    SeparableHamiltonian h_;
    Ensemble e_;
    Method method_;
    SeriesOptions opt_;
    double w_floor_;
};

inline std::optional<Method> parse_method(std::string_view s) {
    if (s == "series") return Method::series;
    if (s == "closed" || s == "closed_form") return Method::closed_form;
    if (s == "classical") return Method::classical;
    return std::nullopt;
}

inline const char* to_string(Method m) {
    switch (m) {
        case Method::series: return "series";
        case Method::closed_form: return "closed";
        case Method::classical: return "classical";
    }
    return "?";
}

}  // namespace wwflow
