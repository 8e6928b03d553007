#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wwflow/classical.hpp"
#include "wwflow/currents.hpp"
#include "wwflow/ensembles.hpp"
#include "wwflow/fieldmap.hpp"
#include "wwflow/grid.hpp"
#include "wwflow/hamiltonian.hpp"
#include "wwflow/specfun.hpp"

namespace wwflow::validation {

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Worst observed value of the checked quantity.
    double measured = 0.0;
    double tolerance = 0.0;
    double seconds = 0.0;
    std::string detail;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Ensemble families drawn in the stationarity and Liouvillianity maps.
struct Family {
    Ensemble ensemble;
    double lo, hi;  // square sampling window
};

inline std::vector<Family> standard_families() {
    std::vector<Family> out;
    for (double a : {0.25, 0.5, 1.0}) out.push_back({make_gaussian(a), -3.0, 3.0});
    for (int s : {2, 3, 4}) out.push_back({make_gamma(s, s, 1.0, 1.0), 0.25, 6.0});
    // 11 nodes on [-3, 3.5] miss both axes.
    for (int s : {2, 3, 4}) out.push_back({make_laplacian(s, s, 1.0, 1.0), -3.0, 3.5});
    return out;
}

}  // namespace detail

/// Odd-Hermite generating identity on a 9x9 grid over [-2,2] x [0.1,1].
inline CheckResult generating_identity(double tol = 1e-10) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            const double u = -2.0 + 0.5 * i;
            const double s = 0.1 + 0.9 * j / 8.0;
            const double exact = std::sinh(2.0 * s * u) * std::exp(-s * s);
            worst = std::max(worst, std::abs(specfun::odd_hermite_sum(u, s, 40) - exact));
        }
    }
    const double t = detail::seconds_since(t0);
    return {"generating identity", worst < tol && t < 1.0, worst, tol, t, detail::fmt("81 points, %.3f s", t)};
}

/// Closed-form divergences against the eta <= 40 series, pointwise relative,
/// on 11x11 grids for every standard family under both LV Hamiltonians (g = 1).
inline CheckResult series_vs_closed(double tol = 1e-8) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string where;
    for (const char* label : {"lv", "mlv"}) {
        const auto h = make_hamiltonian(label, 1.0);
        for (const auto& fam : detail::standard_families()) {
            const CurrentField series(h, fam.ensemble, Method::series);
            const CurrentField closed(h, fam.ensemble, Method::closed_form);
            for (int i = 0; i <= 10; ++i) {
                for (int j = 0; j <= 10; ++j) {
                    const double x = fam.lo + (fam.hi - fam.lo) * i / 10.0;
                    const double k = fam.lo + (fam.hi - fam.lo) * j / 10.0;
                    const auto s = series.divergence(x, k);
                    const auto c = closed.divergence(x, k);
                    for (auto [a, b] : {std::pair{s.x, c.x}, std::pair{s.k, c.k}}) {
                        const double rel = std::abs(a - b) / std::max(std::abs(b), 1e-300);
                        if (rel > worst) {
                            worst = rel;
                            where = std::string(label) + " " + describe(fam.ensemble);
                        }
                    }
                }
            }
        }
    }
    const double t = detail::seconds_since(t0);
    return {"series vs closed form", worst < tol && t < 10.0, worst, tol, t,
            "18 families x 121 points, worst at " + where + detail::fmt(", %.2f s", t)};
}

/// Central differences (step 1e-4) of the integrated currents against the
/// closed-form divergences at 50 random points per family.
inline CheckResult current_divergence_consistency(double tol = 1e-5, std::uint64_t seed = 20240611) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    const double step = 1e-4;
    double worst = 0.0;
    std::size_t points = 0;
    for (const char* label : {"lv", "mlv"}) {
        const auto h = make_hamiltonian(label, 1.0);
        for (const auto& fam : detail::standard_families()) {
            const CurrentField cf(h, fam.ensemble, Method::closed_form);
            const bool laplacian = std::holds_alternative<LaplacianEnsemble>(fam.ensemble);
            std::uniform_real_distribution<double> u(fam.lo, fam.hi);
            for (int n = 0; n < 50; ++n) {
                double x = u(rng), k = u(rng);
                if (laplacian) {
                    // Keep the stencil off the non-differentiable axes.
                    if (std::abs(x) < 0.1) x = std::copysign(0.1, x) + x;
                    if (std::abs(k) < 0.1) k = std::copysign(0.1, k) + k;
                }
                const auto d = cf.divergence(x, k);
                const double fx = (cf.current(x + step, k).x - cf.current(x - step, k).x) / (2.0 * step);
                const double fk = (cf.current(x, k + step).k - cf.current(x, k - step).k) / (2.0 * step);
                worst = std::max({worst, std::abs(fx - d.x), std::abs(fk - d.k)});
                ++points;
            }
        }
    }
    const double t = detail::seconds_since(t0);
    return {"current/divergence consistency", worst < tol, worst, tol, t,
            std::to_string(points) + " random points, step 1e-4"};
}

/// Classical divergence of W proportional to e^{-H} on [-2,2]^2 (41x41).
inline CheckResult thermal_stationarity(double tol = 1e-8) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const char* label : {"lv", "mlv"}) {
        const auto h = make_hamiltonian(label, 1.0);
        const Ensemble e = make_thermal(h);
        for (int i = 0; i <= 40; ++i) {
            for (int j = 0; j <= 40; ++j) {
                const double x = -2.0 + 0.1 * i, k = -2.0 + 0.1 * j;
                worst = std::max(worst, std::abs(classical_div(h, e, x, k).total()));
            }
        }
    }
    return {"thermal classical stationarity", worst < tol, worst, tol, detail::seconds_since(t0),
            "typical and modified LV, 41x41 on [-2,2]^2"};
}

/// Liouvillianity of Gaussian ensembles under the harmonic Hamiltonian on
/// the default [-4,4]^2 241x241 grid. Cells below the W floor are skipped
/// and counted.
inline CheckResult harmonic_liouvillianity(double tol = 1e-10) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::size_t masked = 0;
    const auto grid = FieldGrid::square(-4.0, 4.0, 241);
    for (double alpha : {0.25, 0.5, 1.0}) {
        const CurrentField cf(make_harmonic(1.0), make_gaussian(alpha), Method::series);
        for (std::size_t j = 0; j < grid.nk(); ++j) {
            for (std::size_t i = 0; i < grid.nx(); ++i) {
                const auto l = cf.liouvillianity(grid.x(i), grid.k(j));
                if (!l) {
                    ++masked;
                    continue;
                }
                worst = std::max(worst, std::abs(*l));
            }
        }
    }
    return {"harmonic Liouvillianity", worst < tol, worst, tol, detail::seconds_since(t0),
            std::to_string(masked) + " cells below the W floor"};
}

/// Typical LV (g = 1) orbits at the standard energy levels: energy drift, period
/// means, area equality and Bohr-Sommerfeld consistency.
inline CheckResult orbit_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto h = make_typical_lv(1.0);
    bool ok = true;
    double worst_drift = 0.0, worst_mean = 0.0, worst_area = 0.0, worst_ell = 0.0;
    for (double eps : {2.05, 2.2, 2.5, 4.0, 6.0}) {
        const auto o = orbit_for_energy(h, eps);
        const auto m = period_integrals(o);
        const auto a = enclosed_areas(o);
        const double ell_xk = bohr_sommerfeld(o);
        const double ell_yz = a.area_yz / (2.0 * std::numbers::pi);
        worst_drift = std::max(worst_drift, o.energy_drift);
        worst_mean = std::max({worst_mean, std::abs(m.mean_y - 1.0), std::abs(m.mean_z - 1.0), std::abs(m.mean_yz - 1.0)});
        worst_area = std::max(worst_area, std::abs(a.area_yz - a.area_xk) / a.area_xk);
        worst_ell = std::max(worst_ell, std::abs(ell_xk - ell_yz) / ell_xk);
    }
    const double t = detail::seconds_since(t0);
    ok = worst_drift < 1e-8 && worst_mean < 1e-4 && worst_area < 1e-3 && worst_ell < 1e-3 && t < 30.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "drift %.1e (<1e-8), means %.1e (<1e-4), area %.1e (<1e-3), l %.1e (<1e-3), %.2f s",
                  worst_drift, worst_mean, worst_area, worst_ell, t);
    return {"typical LV orbit suite", ok, std::max({worst_drift / 1e-8, worst_mean / 1e-4, worst_area / 1e-3, worst_ell / 1e-3}),
            1.0, t, buf};
}

/// l(eps) = eps - (1 + g) for the harmonic Hamiltonian, g = 1.
inline CheckResult harmonic_quantization(double tol = 1e-4) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double eps : {2.0, 3.0, 4.0}) {
        const auto o = orbit_for_energy(make_harmonic(1.0), eps);
        worst = std::max(worst, std::abs(bohr_sommerfeld(o) - (eps - 2.0)));
    }
    return {"harmonic quantization", worst < tol, worst, tol, detail::seconds_since(t0), "eps in {2,3,4}"};
}

/// Gaussian purity 2 pi int W^2 = alpha^2 on a grid of +-8/alpha, 801 nodes.
inline CheckResult gaussian_purity(double tol = 1e-5) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const auto r = purity(make_gaussian(alpha), FieldGrid::square(-8.0 / alpha, 8.0 / alpha, 801));
        worst = std::max(worst, std::abs(r.value - alpha * alpha));
    }
    return {"Gaussian purity", worst < tol, worst, tol, detail::seconds_since(t0), "alpha in {1/2,1,2}"};
}

enum class AmplitudeMeasure {
    /// max |x| along the orbit.
    max_abs_x,
    /// max y = max e^{-x}, the prey peak.
    peak_prey,
};

/// Modified-LV orbit amplitude exceeds the typical-LV amplitude at equal eps (g = 1).
inline CheckResult amplitude_persistence(AmplitudeMeasure measure) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto typical = make_typical_lv(1.0);
    const auto modified = make_modified_lv(1.0);
    bool ok = true;
    double margin = INFINITY;
    std::string detail;
    for (double eps : {2.5, 4.0, 6.0}) {
        const auto ot = orbit_for_energy(typical, eps);
        const auto om = orbit_for_energy(modified, eps);
        const double at = measure == AmplitudeMeasure::max_abs_x ? max_abs_x(ot) : peak_prey(ot);
        const double am = measure == AmplitudeMeasure::max_abs_x ? max_abs_x(om) : peak_prey(om);
        ok = ok && am > at;
        margin = std::min(margin, am - at);
        if (!detail.empty()) detail += ", ";
        detail += detail::fmt("eps=%g: %.4f vs %.4f", eps, am, at);
    }
    const char* name = measure == AmplitudeMeasure::max_abs_x ? "amplitude persistence (max|x|)"
                                                              : "amplitude persistence (peak prey)";
    return {name, ok, margin, 0.0, detail::seconds_since(t0), "modified vs typical, " + detail};
}

/// Renders a small field with one and with several workers and compares the
/// CSV text byte for byte.
inline CheckResult render_determinism() {
    const auto t0 = std::chrono::steady_clock::now();
    RenderSpec spec(make_modified_lv(1.0), make_gaussian(1.0));
    spec.quantifier = Quantifier::stationarity_quantum;
    const auto grid = FieldGrid::square(-4.0, 4.0, 61);
    auto text = [&](unsigned workers) {
        spec.workers = workers;
        const auto r = render_field(spec, grid);
        std::string s;
        for (double v : r.field.values()) s += wwflow::detail::format_g17(v) + "\n";
        return std::make_pair(s, r.masked_error);
    };
    const auto a = text(1);
    const auto b = text(4);
    const bool ok = a.first == b.first && a.second == 0;
    return {"render determinism", ok, ok ? 0.0 : 1.0, 0.0, detail::seconds_since(t0), "1 vs 4 workers, 61x61"};
}

/// Invariant suite run by the `validate` subcommand.
inline std::vector<CheckResult> run_all() {
    return {generating_identity(),
            series_vs_closed(),
            current_divergence_consistency(),
            thermal_stationarity(),
            harmonic_liouvillianity(),
            orbit_suite(),
            harmonic_quantization(),
            gaussian_purity(),
            amplitude_persistence(AmplitudeMeasure::peak_prey),
            render_determinism()};
}

}  // namespace wwflow::validation
