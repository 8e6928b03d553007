#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "wwflow/errors.hpp"
#include "wwflow/hamiltonian.hpp"

namespace wwflow {

struct OrbitSample {
    double tau = 0.0;
    double x = 0.0;
    double k = 0.0;
};

struct OrbitOptions {
    double dt = 1e-3;
    double tau_max = 1e4;
    /// Bisection tolerance on the return time.
    double section_tol = 1e-10;
    /// Allowed max |H - eps|; negative selects 1e-8 * max(1, |eps|).
    double drift_tol = -1.0;
};

/// One classical orbit sampled at the fixed RK4 step. For a closed orbit the
/// last sample is the bisection-refined Poincare return at tau = period.
struct Orbit {
    SeparableHamiltonian hamiltonian;
    std::vector<OrbitSample> samples;
    double epsilon = 0.0;
    double g = 1.0;
    std::optional<double> period;
    double dt = 0.0;
    double energy_drift = 0.0;
    /// Distance between the return state and the initial state.
    double closure = 0.0;

    /// Fixed-point orbit: a single sample and no period.
    bool degenerate() const { return !period.has_value() && samples.size() == 1; }
};

namespace detail {

struct PhasePoint {
    double x, k;
};

inline PhasePoint rk4_step(const SeparableHamiltonian& h, PhasePoint p, double dt) {
    auto f = [&](PhasePoint q) { return PhasePoint{h.kinetic_derivative(1, q.k), -h.potential_derivative(1, q.x)}; };
    const PhasePoint a = f(p);
    const PhasePoint b = f({p.x + 0.5 * dt * a.x, p.k + 0.5 * dt * a.k});
    const PhasePoint c = f({p.x + 0.5 * dt * b.x, p.k + 0.5 * dt * b.k});
    const PhasePoint d = f({p.x + dt * c.x, p.k + dt * c.k});
    return {p.x + dt / 6.0 * (a.x + 2.0 * b.x + 2.0 * c.x + d.x), p.k + dt / 6.0 * (a.k + 2.0 * b.k + 2.0 * c.k + d.k)};
}

inline void require_closed(const Orbit& o, const char* who) {
    if (o.degenerate()) return;
    if (!o.period) throw DomainError(std::string(who) + ": orbit is not closed");
    if (o.samples.size() < 3) throw DomainError(std::string(who) + ": orbit has too few samples");
}

// Trapezoid in tau of f(sample) over the whole loop.
template <class F>
double loop_integral(const Orbit& o, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < o.samples.size(); ++i) {
        const auto& a = o.samples[i];
        const auto& b = o.samples[i + 1];
        s += 0.5 * (b.tau - a.tau) * (f(a) + f(b));
    }
    return s;
}

}  // namespace detail

/// Fixed-step RK4 integration of (dx/dtau, dk/dtau) = (K'(k), -V'(x)) from
/// (x0, k0) until the first return to the line through the start point
/// normal to the initial velocity. Level curves of the built-in
/// Hamiltonians are convex, so the first upward crossing is the return.
inline Orbit integrate_orbit(const SeparableHamiltonian& h, double x0, double k0, const OrbitOptions& opt = {}) {
    if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw DomainError("integrate_orbit: dt must be positive");
    if (!std::isfinite(x0) || !std::isfinite(k0)) throw DomainError("integrate_orbit: non-finite initial point");

    Orbit o{h, {}, h(x0, k0), h.g(), std::nullopt, opt.dt, 0.0, 0.0};
    o.samples.push_back({0.0, x0, k0});
    const auto [vx, vk] = classical_velocity(h, x0, k0);
    const double speed = std::hypot(vx, vk);
    if (speed == 0.0) return o;

    const double nx = vx / speed, nk = vk / speed;
    auto section = [&](detail::PhasePoint p) { return nx * (p.x - x0) + nk * (p.k - k0); };
    const double drift_tol = opt.drift_tol >= 0.0 ? opt.drift_tol : 1e-8 * std::max(1.0, std::abs(o.epsilon));

    detail::PhasePoint p{x0, k0};
    double s_prev = 0.0;
    double tau = 0.0;
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(opt.tau_max / opt.dt));
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        const detail::PhasePoint next = detail::rk4_step(h, p, opt.dt);
        const double s_next = section(next);
        if (s_prev < 0.0 && s_next >= 0.0) {
            double lo = 0.0, hi = opt.dt;
            while (hi - lo > opt.section_tol) {
                const double mid = 0.5 * (lo + hi);
                if (section(detail::rk4_step(h, p, mid)) < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            const double sub = 0.5 * (lo + hi);
            const detail::PhasePoint end = detail::rk4_step(h, p, sub);
            o.period = tau + sub;
            o.samples.push_back({*o.period, end.x, end.k});
            o.closure = std::hypot(end.x - x0, end.k - k0);
            o.energy_drift = std::max(o.energy_drift, std::abs(h(end.x, end.k) - o.epsilon));
            if (o.energy_drift > drift_tol) {
                throw AccuracyError("integrate_orbit: energy drift " + std::to_string(o.energy_drift) +
                                        " exceeds tolerance; reduce dt",
                                    o.energy_drift);
            }
            return o;
        }
        p = next;
        s_prev = s_next;
        tau = static_cast<double>(step + 1) * opt.dt;
        o.samples.push_back({tau, p.x, p.k});
        o.energy_drift = std::max(o.energy_drift, std::abs(h(p.x, p.k) - o.epsilon));
        if (!std::isfinite(p.x) || !std::isfinite(p.k)) {
            throw OpenOrbitError("integrate_orbit: trajectory diverged at tau = " + std::to_string(tau));
        }
    }
    throw OpenOrbitError("integrate_orbit: no Poincare return within tau_max = " + std::to_string(opt.tau_max));
}

/// Point (x0, 0) with x0 >= 0 on the level H = eps. Assumes V increases on
/// x > 0 and H is minimal at the origin, as for all built-in Hamiltonians.
inline std::pair<double, double> initial_point_for_energy(const SeparableHamiltonian& h, double epsilon) {
    const double emin = h.minimum_energy();
    if (!std::isfinite(epsilon) || epsilon < emin) {
        throw DomainError("energy " + std::to_string(epsilon) + " lies below the minimum " + std::to_string(emin) +
                          " of the hamiltonian");
    }
    if (epsilon == emin) return {0.0, 0.0};
    auto f = [&](double x) { return h(x, 0.0) - epsilon; };
    double hi = 1.0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e6) throw DomainError("initial_point_for_energy: level curve not bracketed");
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return {0.5 * (r.first + r.second), 0.0};
}

inline Orbit orbit_for_energy(const SeparableHamiltonian& h, double epsilon, const OrbitOptions& opt = {}) {
    const auto [x0, k0] = initial_point_for_energy(h, epsilon);
    Orbit o = integrate_orbit(h, x0, k0, opt);
    o.epsilon = epsilon;
    return o;
}

/// |T(dt) - T(dt/2)| / T(dt/2) for the orbit through (x0, k0).
inline double period_step_convergence(const SeparableHamiltonian& h, double x0, double k0, double dt = 1e-3) {
    OrbitOptions coarse;
    coarse.dt = dt;
    OrbitOptions fine = coarse;
    fine.dt = dt / 2.0;
    const auto a = integrate_orbit(h, x0, k0, coarse);
    const auto b = integrate_orbit(h, x0, k0, fine);
    if (a.degenerate() || b.degenerate()) return 0.0;
    return std::abs(*a.period - *b.period) / *b.period;
}

/// Level value through species (y, z), i.e. H(-ln y, -ln z):
///   typical LV  eps = g y + z - ln(y^g z)
///   modified LV eps = (g y + g/y + z + 1/z) / 2
inline double level_epsilon(const SeparableHamiltonian& h, double y, double z) {
    if (!(y > 0.0) || !(z > 0.0)) throw DomainError("level_epsilon: species must be positive");
    return h(-std::log(y), -std::log(z));
}

struct PeriodIntegrals {
    double mean_y = 1.0;
    double mean_z = 1.0;
    double mean_yz = 1.0;
    double mean_inv_y = 1.0;
    double mean_inv_z = 1.0;
    /// Mean of (g y + z) / eps.
    double mean_energy_ratio = 1.0;
};

/// Time averages over one period of y = e^{-x}, z = e^{-k} and related
/// products. A fixed-point orbit returns the equilibrium values.
inline PeriodIntegrals period_integrals(const Orbit& o) {
    detail::require_closed(o, "period_integrals");
    if (o.degenerate()) {
        const auto& s = o.samples.front();
        const double y = std::exp(-s.x), z = std::exp(-s.k);
        return {y, z, y * z, 1.0 / y, 1.0 / z, (o.g * y + z) / o.epsilon};
    }
    const double t = *o.period;
    auto mean = [&](auto f) { return detail::loop_integral(o, f) / t; };
    PeriodIntegrals r;
    r.mean_y = mean([](const OrbitSample& s) { return std::exp(-s.x); });
    r.mean_z = mean([](const OrbitSample& s) { return std::exp(-s.k); });
    r.mean_yz = mean([](const OrbitSample& s) { return std::exp(-s.x - s.k); });
    r.mean_inv_y = mean([](const OrbitSample& s) { return std::exp(s.x); });
    r.mean_inv_z = mean([](const OrbitSample& s) { return std::exp(s.k); });
    r.mean_energy_ratio = mean([&](const OrbitSample& s) { return o.g * std::exp(-s.x) + std::exp(-s.k); }) / o.epsilon;
    return r;
}

struct EnclosedAreas {
    double area_xk = 0.0;
    double area_yz = 0.0;
    double area_virial = 0.0;
};

/// area_xk = loop integral of k dx over the sample polygon, area_yz = minus
/// the loop integral of y dz, and area_virial = half the time integral of
/// k K'(k) + x V'(x). Orbits run clockwise, so all three come out positive.
inline EnclosedAreas enclosed_areas(const Orbit& o) {
    detail::require_closed(o, "enclosed_areas");
    if (o.degenerate()) return {};
    EnclosedAreas a;
    const auto& s = o.samples;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        a.area_xk += 0.5 * (s[i].k + s[i + 1].k) * (s[i + 1].x - s[i].x);
        const double y0 = std::exp(-s[i].x), y1 = std::exp(-s[i + 1].x);
        const double z0 = std::exp(-s[i].k), z1 = std::exp(-s[i + 1].k);
        a.area_yz -= 0.5 * (y0 + y1) * (z1 - z0);
    }
    const auto& h = o.hamiltonian;
    a.area_virial = 0.5 * detail::loop_integral(o, [&](const OrbitSample& p) {
        return p.k * h.kinetic_derivative(1, p.k) + p.x * h.potential_derivative(1, p.x);
    });
    return a;
}

/// Quantum number l with 2 pi l equal to the loop integral of k dx.
inline double bohr_sommerfeld(const Orbit& o) { return enclosed_areas(o).area_xk / (2.0 * std::numbers::pi); }

struct ParametricResiduals {
    double max_residual_sum = 0.0;
    double max_residual_constraint = 0.0;
};

/// Residuals of the semi-analytic parametric solutions along an orbit (g = 1).
///   typical LV:  T = y + z,       |ln(yz) - T + eps| and T'^2 - T^2 + 4 e^{T - eps}
///   modified LV: T = (y + z) / 2, |yz - T/(eps - T)| and T'^2 - T^2 (T - eps)^2 - T (T - eps)
/// T' comes from five-point central differences on the uniform part of the sample list.
inline ParametricResiduals parametric_check(const Orbit& o) {
    const auto kind = o.hamiltonian.kind();
    if (kind != HamiltonianKind::typical_lv && kind != HamiltonianKind::modified_lv) {
        throw UnsupportedConfigurationError("parametric_check: only the typical and modified LV orbits have parametric solutions");
    }
    if (o.g != 1.0) {
        throw UnsupportedConfigurationError("parametric_check: parametric solutions need the isotropic case g = 1");
    }
    detail::require_closed(o, "parametric_check");
    const double eps = o.epsilon;
    const bool typical = kind == HamiltonianKind::typical_lv;
    auto param = [&](const OrbitSample& s) {
        const double y = std::exp(-s.x), z = std::exp(-s.k);
        return typical ? y + z : 0.5 * (y + z);
    };

    ParametricResiduals r;
    for (const auto& s : o.samples) {
        const double y = std::exp(-s.x), z = std::exp(-s.k);
        const double t = param(s);
        const double res = typical ? std::abs(std::log(y * z) - t + eps) : std::abs(y * z - t / (eps - t));
        r.max_residual_sum = std::max(r.max_residual_sum, res);
    }
    if (o.degenerate()) return r;

    // Drop the refined final sample, whose spacing is not dt.
    const std::size_t n = o.samples.size();
    for (std::size_t i = 2; i + 3 < n; ++i) {
        const double t = param(o.samples[i]);
        const double tdot = (8.0 * (param(o.samples[i + 1]) - param(o.samples[i - 1])) -
                             (param(o.samples[i + 2]) - param(o.samples[i - 2]))) /
                            (12.0 * o.dt);
        const double res = typical ? tdot * tdot - t * t + 4.0 * std::exp(t - eps)
                                   : tdot * tdot - t * t * (t - eps) * (t - eps) - t * (t - eps);
        r.max_residual_constraint = std::max(r.max_residual_constraint, std::abs(res));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Species picture: y = e^{-x} (prey), z = e^{-k} (predator).

struct SpeciesSample {
    double tau = 0.0;
    double y = 1.0;
    double z = 1.0;
};

struct SpeciesPath {
    std::vector<SpeciesSample> samples;
};

inline SpeciesPath to_species(const Orbit& o) {
    SpeciesPath p;
    p.samples.reserve(o.samples.size());
    for (const auto& s : o.samples) p.samples.push_back({s.tau, std::exp(-s.x), std::exp(-s.k)});
    return p;
}

/// RK4 integration of the species equations for `steps` steps of size dt.
///   typical LV:  y' = yz - y,         z' = g (z - yz)
///   modified LV: y' = (yz - y/z) / 2, z' = g (z/y - yz) / 2
inline SpeciesPath integrate_species(const SeparableHamiltonian& h, double y0, double z0, double dt, std::size_t steps) {
    if (!(y0 > 0.0) || !(z0 > 0.0)) throw DomainError("integrate_species: species must be positive");
    const auto kind = h.kind();
    if (kind != HamiltonianKind::typical_lv && kind != HamiltonianKind::modified_lv) {
        throw UnsupportedConfigurationError("integrate_species: species equations exist only for LV hamiltonians");
    }
    const double g = h.g();
    const bool typical = kind == HamiltonianKind::typical_lv;
    auto f = [&](double y, double z) -> std::array<double, 2> {
        if (typical) return {y * z - y, g * (z - y * z)};
        return {0.5 * (y * z - y / z), 0.5 * g * (z / y - y * z)};
    };
    SpeciesPath p;
    p.samples.reserve(steps + 1);
    double y = y0, z = z0;
    p.samples.push_back({0.0, y, z});
    for (std::size_t i = 0; i < steps; ++i) {
        const auto a = f(y, z);
        const auto b = f(y + 0.5 * dt * a[0], z + 0.5 * dt * a[1]);
        const auto c = f(y + 0.5 * dt * b[0], z + 0.5 * dt * b[1]);
        const auto d = f(y + dt * c[0], z + dt * c[1]);
        y += dt / 6.0 * (a[0] + 2.0 * b[0] + 2.0 * c[0] + d[0]);
        z += dt / 6.0 * (a[1] + 2.0 * b[1] + 2.0 * c[1] + d[1]);
        p.samples.push_back({static_cast<double>(i + 1) * dt, y, z});
    }
    return p;
}

struct LogCirculation {
    double ln_y = 0.0;
    double ln_z = 0.0;
};

/// Loop integrals of dy/y = -K'(k) dtau and dz/z = V'(x) dtau.
inline LogCirculation log_circulation(const Orbit& o) {
    detail::require_closed(o, "log_circulation");
    if (o.degenerate()) return {};
    const auto& h = o.hamiltonian;
    return {-detail::loop_integral(o, [&](const OrbitSample& s) { return h.kinetic_derivative(1, s.k); }),
            detail::loop_integral(o, [&](const OrbitSample& s) { return h.potential_derivative(1, s.x); })};
}

inline double max_abs_x(const Orbit& o) {
    double m = 0.0;
    for (const auto& s : o.samples) m = std::max(m, std::abs(s.x));
    return m;
}

/// Largest prey population max y = max e^{-x} along the orbit.
inline double peak_prey(const Orbit& o) {
    double m = 0.0;
    for (const auto& s : o.samples) m = std::max(m, std::exp(-s.x));
    return m;
}

}  // namespace wwflow
