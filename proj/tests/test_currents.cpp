#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wwflow/currents.hpp"

using namespace wwflow;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

// Pointwise agreement with an absolute floor scaled to the field's peak, so
// exact zeros of one side do not blow up the relative measure.
void expect_close(double got, double want, double tol, double floor, const std::string& where) {
    EXPECT_LE(std::abs(got - want), tol * std::max(std::abs(want), floor)) << where << " got " << got << " want " << want;
}

// Gaussian derivative d^n/du^n exp(-a^2 u^2) * a^2/pi * exp(-a^2 v^2), from Hermite polynomials.
double gaussian_derivative(int n, double alpha, double u, double v) {
    return std::pow(-alpha, n) * specfun::hermite(n, alpha * u) * alpha * alpha * std::numbers::inv_pi *
           std::exp(-alpha * alpha * (u * u + v * v));
}

// eta >= 1 terms of div(J/W) for a Gaussian ensemble, summed term by term:
//   sum c_eta [K^(2eta+1) d_x(W_x^(2eta)/W) - V^(2eta+1) d_k(W_k^(2eta)/W)].
double liouvillianity_series_oracle(const SeparableHamiltonian& h, double alpha, double x, double k) {
    const double w = gaussian_derivative(0, alpha, x, k);
    const double wx1 = gaussian_derivative(1, alpha, x, k);
    const double wk1 = gaussian_derivative(1, alpha, k, x);
    double sum = 0.0, c = 1.0;
    for (int eta = 1; eta <= 40; ++eta) {
        c *= -0.25 / ((2.0 * eta) * (2.0 * eta + 1.0));
        const int n = 2 * eta;
        const double dx = gaussian_derivative(n + 1, alpha, x, k) / w - gaussian_derivative(n, alpha, x, k) * wx1 / (w * w);
        const double dk = gaussian_derivative(n + 1, alpha, k, x) / w - gaussian_derivative(n, alpha, k, x) * wk1 / (w * w);
        const double term = c * (h.odd_derivative_K(eta, k) * dx - h.odd_derivative_V(eta, x) * dk);
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && eta > 4) break;
    }
    return sum;
}

}  // namespace

TEST(Series, SpecExamples) {
    const auto lv = make_typical_lv(1.0);
    EXPECT_EQ(series_div_x(lv, make_gaussian(1.0), 0.0, 0.7), 0.0);

    const auto d = closed_gaussian_div(LvKind::typical, 0.5, 1.0, 0.5, 0.5);
    EXPECT_NEAR(series_div_x(lv, make_gaussian(0.5), 0.5, 0.5), d.x, 1e-10);

    const auto mlv = make_modified_lv(1.0);
    EXPECT_EQ(series_div_k(mlv, make_gaussian(1.0), 1.3, 0.0), 0.0);

    const auto lv2 = make_typical_lv(2.0);
    EXPECT_NEAR(series_div_k(lv2, make_gaussian(0.5), 0.3, 0.8), closed_gaussian_div(LvKind::typical, 0.5, 2.0, 0.3, 0.8).k,
                1e-10);
}

TEST(Series, HarmonicEqualsClassical) {
    const auto h = make_harmonic(1.3);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> d(-2.5, 2.5);
    const std::vector<Ensemble> ensembles{make_gaussian(0.7), make_laplacian(2, 3, 1.0, 1.5)};
    for (const auto& e : ensembles) {
        for (int trial = 0; trial < 30; ++trial) {
            const double x = d(rng), k = d(rng);
            const auto c = classical_div(h, e, x, k);
            EXPECT_EQ(series_div_x(h, e, x, k), c.x);
            EXPECT_EQ(series_div_k(h, e, x, k), c.k);
            const auto q = series_quantum_div(h, e, x, k);
            EXPECT_EQ(q.x, 0.0);
            EXPECT_EQ(q.k, 0.0);
        }
    }
}

TEST(Series, NonConvergenceIsReported) {
    SeriesOptions opt;
    opt.eta_max = 2;
    try {
        series_div_x(make_typical_lv(1.0), make_gaussian(1.0), 0.7, 0.3, opt);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.residual(), 0.0);
    }
    opt.eta_max = 81;
    EXPECT_THROW(series_div_x(make_typical_lv(1.0), make_gaussian(1.0), 0.7, 0.3, opt), DomainError);
}

TEST(ClosedGaussian, SpecExamples) {
    const auto z = closed_gaussian_div(LvKind::modified, 0.8, 1.5, 0.0, 0.0);
    EXPECT_EQ(z.x, 0.0);
    EXPECT_EQ(z.k, 0.0);

    const double g1 = std::exp(-0.25) / std::numbers::pi;
    const double expected = -2.0 * (0.5 - std::sin(0.5) * std::exp(0.25)) * g1;
    const auto d = closed_gaussian_div(LvKind::typical, 1.0, 1.0, 0.5, 0.0);
    EXPECT_NEAR(d.x, expected, 1e-15);
    EXPECT_NEAR(series_div_x(make_typical_lv(1.0), make_gaussian(1.0), 0.5, 0.0), expected, 1e-10);
}

TEST(ClosedGaussian, ClassicalLimit) {
    // Relative deviation from the classical form is alpha^2 e^{-k} x / (4 x (1 - e^{-k})) to leading order.
    const double x = 1.0, k = 1.0;
    const double lead = std::exp(-k) / (4.0 * (1.0 - std::exp(-k)));
    for (double alpha : {1e-3, 1e-4}) {
        const double closed = closed_gaussian_div(LvKind::typical, alpha, 1.0, x, k).x;
        const double classical = -2.0 * alpha * alpha * x * (1.0 - std::exp(-k)) * gaussian_value(alpha, x, k);
        const double deviation = (closed - classical) / std::abs(classical);
        EXPECT_NEAR(deviation, lead * alpha * alpha, 1e-3 * lead * alpha * alpha) << alpha;
    }
    const double alpha = 1e-4;
    const double closed = closed_gaussian_div(LvKind::typical, alpha, 1.0, x, k).x;
    const double classical = -2.0 * alpha * alpha * x * (1.0 - std::exp(-k)) * gaussian_value(alpha, x, k);
    EXPECT_LT(rel(closed, classical), 1e-8);
}

TEST(ClosedGaussian, QuantumPartScalesAsAlphaFourth) {
    const double x = 1.0, k = 0.6;
    double previous_ratio = std::numeric_limits<double>::infinity();
    for (double alpha : {0.2, 0.1, 0.05}) {
        CurrentField cf(make_typical_lv(1.0), make_gaussian(alpha), Method::closed_form);
        const auto s = cf.stationarity(x, k);
        const double ratio = std::abs(s.quantum / s.classical);
        EXPECT_LT(ratio, previous_ratio) << alpha;
        previous_ratio = ratio;
        // Leading quantum term of the x-part: 2 a^4 x e^{-k} / 4 G; the k-part mirrors it.
        const double g = gaussian_value(alpha, x, k);
        const double lead = 0.5 * std::pow(alpha, 4) * (x * std::exp(-k) - k * std::exp(-x)) * g;
        EXPECT_NEAR(s.quantum / lead, 1.0, 0.05) << alpha;
    }
}

TEST(ClosedGaussian, ModifiedZeroSets) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double u = d(rng);
        for (double alpha : {0.25, 0.5, 1.0}) {
            EXPECT_LT(std::abs(closed_gaussian_div(LvKind::modified, alpha, 1.0, u, 0.0).x), 1e-14);
            EXPECT_LT(std::abs(closed_gaussian_div(LvKind::modified, alpha, 1.0, 0.0, u).x), 1e-14);
        }
    }
}

TEST(ClosedGaussian, AgreesWithSeriesOnGrid) {
    for (auto kind : {LvKind::typical, LvKind::modified}) {
        const auto h = kind == LvKind::typical ? make_typical_lv(1.0) : make_modified_lv(1.0);
        for (double alpha : {0.25, 0.5, 1.0}) {
            const double peak = alpha * alpha / std::numbers::pi;
            for (int i = 0; i < 11; ++i) {
                for (int j = 0; j < 11; ++j) {
                    const double x = -2.0 + 0.4 * i, k = -2.0 + 0.4 * j;
                    const auto c = closed_gaussian_div(kind, alpha, 1.0, x, k);
                    const std::string where = "alpha=" + std::to_string(alpha) + " x=" + std::to_string(x) + " k=" + std::to_string(k);
                    expect_close(series_div_x(h, make_gaussian(alpha), x, k), c.x, 1e-8, 1e-12 * peak, where);
                    expect_close(series_div_k(h, make_gaussian(alpha), x, k), c.k, 1e-8, 1e-12 * peak, where);
                }
            }
        }
    }
}

TEST(ClosedGaussian, ClassicalPartMatchesEtaZero) {
    for (auto kind : {LvKind::typical, LvKind::modified}) {
        const auto h = kind == LvKind::typical ? make_typical_lv(1.4) : make_modified_lv(1.4);
        const auto c = classical_div(h, make_gaussian(0.6), 0.7, -0.3);
        const auto f = closed_gaussian_classical_div(kind, 0.6, 1.4, 0.7, -0.3);
        EXPECT_NEAR(c.x, f.x, 1e-15);
        EXPECT_NEAR(c.k, f.k, 1e-15);
    }
    const auto axis = classical_div(make_typical_lv(1.0), make_gaussian(1.0), 1.0, 0.0);
    EXPECT_EQ(axis.x, 0.0);
    EXPECT_EQ(axis.k, 0.0);
}

TEST(ClosedGaussianCurrent, SpecExamples) {
    EXPECT_EQ(closed_gaussian_current(LvKind::modified, 1.0, 1.0, 0.9, 0.0).x, 0.0);
    EXPECT_LT(std::abs(closed_gaussian_current(LvKind::typical, 1.0, 1.0, 8.0, 0.3).x), 1e-10);

    const double h = 1e-4;
    const double fd = (closed_gaussian_current(LvKind::typical, 0.5, 1.0, 0.7 + h, 0.4).x -
                       closed_gaussian_current(LvKind::typical, 0.5, 1.0, 0.7 - h, 0.4).x) / (2 * h);
    EXPECT_NEAR(fd, closed_gaussian_div(LvKind::typical, 0.5, 1.0, 0.7, 0.4).x, 1e-6);
}

TEST(ClosedGaussianCurrent, MatchesSeriesCurrent) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (auto kind : {LvKind::typical, LvKind::modified}) {
        const auto h = kind == LvKind::typical ? make_typical_lv(1.0) : make_modified_lv(1.0);
        for (double alpha : {0.5, 1.0}) {
            for (int trial = 0; trial < 20; ++trial) {
                const double x = d(rng), k = d(rng);
                const auto s = series_current(h, make_gaussian(alpha), x, k);
                const auto c = closed_gaussian_current(kind, alpha, 1.0, x, k);
                EXPECT_NEAR(s.x, c.x, 1e-12);
                EXPECT_NEAR(s.k, c.k, 1e-12);
            }
        }
    }
}

TEST(ClosedGaussianCurrent, DerivativesMatchDivergences) {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    const double h = 1e-4;
    for (auto kind : {LvKind::typical, LvKind::modified}) {
        for (double alpha : {0.25, 0.5, 1.0}) {
            for (int trial = 0; trial < 20; ++trial) {
                const double x = d(rng), k = d(rng);
                const auto div = closed_gaussian_div(kind, alpha, 1.3, x, k);
                const double fx = (closed_gaussian_current(kind, alpha, 1.3, x + h, k).x -
                                   closed_gaussian_current(kind, alpha, 1.3, x - h, k).x) / (2 * h);
                const double fk = (closed_gaussian_current(kind, alpha, 1.3, x, k + h).k -
                                   closed_gaussian_current(kind, alpha, 1.3, x, k - h).k) / (2 * h);
                EXPECT_NEAR(fx, div.x, 1e-6);
                EXPECT_NEAR(fk, div.k, 1e-6);
            }
        }
    }
}

TEST(ClosedGaussianCurrent, RealnessOfErfBracket) {
    for (double alpha : {0.25, 1.0, 2.0}) {
        for (double u = -6.0; u <= 6.0; u += 0.25) EXPECT_NO_THROW(detail::erf_bracket_times_i(alpha, u));
    }
}

TEST(GammaClosed, SignAuditAgainstSeries) {
    const auto lv = make_typical_lv(1.0);
    const auto g = make_gamma(1, 1, 1, 1);
    const auto d = gamma_current_div(lv, g, 1.0, 1.0);
    const double expected = -(1.0 - 2.0 * std::sin(0.5) * std::exp(-1.0)) * std::exp(-2.0);
    EXPECT_NEAR(d.x, expected, 1e-15);
    EXPECT_NEAR(series_div_x(lv, g, 1.0, 1.0), d.x, 1e-9);
    EXPECT_NEAR(series_div_k(lv, g, 1.0, 1.0), d.k, 1e-9);
}

TEST(GammaClosed, AgreesWithSeriesOnGrid) {
    for (const auto& h : {make_typical_lv(1.0), make_modified_lv(1.0), make_typical_lv(1.7)}) {
        for (int s : {1, 2, 3, 4}) {
            const auto g = make_gamma(s, s, 1, 1);
            for (int i = 0; i < 11; ++i) {
                for (int j = 0; j < 11; ++j) {
                    const double x = 0.2 + 0.38 * i, k = 0.2 + 0.38 * j;
                    const auto c = gamma_current_div(h, g, x, k);
                    const std::string where = h.label() + " s=" + std::to_string(s) + " x=" + std::to_string(x) + " k=" + std::to_string(k);
                    expect_close(series_div_x(h, g, x, k), c.x, 1e-8, 1e-12, where);
                    expect_close(series_div_k(h, g, x, k), c.k, 1e-8, 1e-12, where);
                }
            }
        }
    }
}

TEST(GammaClosed, MixedShapesAndRates) {
    const auto h = make_typical_lv(1.2);
    const auto g = make_gamma(3, 2, 1.5, 0.7);
    for (double x : {0.4, 1.3, 3.0}) {
        for (double k : {0.3, 2.2}) {
            const auto c = gamma_current_div(h, g, x, k);
            EXPECT_NEAR(series_div_x(h, g, x, k), c.x, 1e-8 * std::max(std::abs(c.x), 1e-10));
            EXPECT_NEAR(series_div_k(h, g, x, k), c.k, 1e-8 * std::max(std::abs(c.k), 1e-10));
            const auto j = gamma_current(h, g, x, k);
            const auto sj = series_current(h, g, x, k);
            EXPECT_NEAR(sj.x, j.x, 1e-10);
            EXPECT_NEAR(sj.k, j.k, 1e-10);
        }
    }
}

TEST(GammaClosed, CurrentDerivativesMatchDivergences) {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> d(0.3, 5.0);
    const double step = 1e-4;
    for (const auto& h : {make_typical_lv(1.0), make_modified_lv(1.0)}) {
        for (int s : {1, 2, 3, 4}) {
            const GammaLikeEnsemble e = make_gamma(s, s, 1, 1);
            for (int trial = 0; trial < 15; ++trial) {
                const double x = d(rng), k = d(rng);
                const auto div = gamma_current_div(h, e, x, k);
                const double fx = (gamma_current(h, e, x + step, k).x - gamma_current(h, e, x - step, k).x) / (2 * step);
                const double fk = (gamma_current(h, e, x, k + step).k - gamma_current(h, e, x, k - step).k) / (2 * step);
                EXPECT_NEAR(fx, div.x, 1e-6);
                EXPECT_NEAR(fk, div.k, 1e-6);
            }
        }
    }
}

TEST(GammaClosed, SpecExamples) {
    const auto mlv = make_modified_lv(1.0);
    EXPECT_LT(std::abs(gamma_current_div(mlv, make_gamma(2, 3, 1, 1), 1.1, 1e-12).x), 1e-11);
    EXPECT_LT(std::abs(gamma_current(mlv, make_gamma(2, 3, 1, 1), 1.1, 1e-12).x), 1e-11);
    const auto lv = make_typical_lv(1.0);
    EXPECT_LT(std::abs(gamma_current(lv, make_gamma(2, 2, 1, 1), 60.0, 1.0).x), 1e-20);

    const auto gd = gamma_current_div(lv, make_gamma(2, 3, 1.2, 0.8), 1.5, 2.0);
    const auto ld = gamma_current_div(lv, make_laplacian(2, 3, 1.2, 0.8), 1.5, 2.0);
    EXPECT_DOUBLE_EQ(ld.x, 0.25 * gd.x);
    EXPECT_DOUBLE_EQ(ld.k, 0.25 * gd.k);
}

TEST(GammaClosed, Errors) {
    const auto lv = make_typical_lv(1.0);
    EXPECT_THROW(gamma_current_div(lv, make_gamma(2, 2, 1, 1), -0.5, 1.0), DomainError);
    EXPECT_THROW(gamma_current_div(lv, make_laplacian(2, 2, 1, 1), 0.0, 1.0), SingularPointError);
    EXPECT_THROW(gamma_current(lv, make_laplacian(2, 2, 1, 1), 1.0, 0.0), SingularPointError);
    EXPECT_THROW(gamma_current_div(make_harmonic(1.0), make_gamma(2, 2, 1, 1), 1.0, 1.0), UnsupportedConfigurationError);
}

TEST(LaplacianClosed, AgreesWithSeriesInAllQuadrants) {
    const auto h = make_typical_lv(1.0);
    const auto e = make_laplacian(2, 2, 1, 1);
    for (double x : {-2.1, -0.4, 0.6, 1.9}) {
        for (double k : {-1.7, -0.3, 0.5, 2.4}) {
            const auto c = gamma_current_div(h, e, x, k);
            EXPECT_NEAR(series_div_x(h, e, x, k), c.x, 1e-8 * std::max(std::abs(c.x), 1e-12)) << x << "," << k;
            EXPECT_NEAR(series_div_k(h, e, x, k), c.k, 1e-8 * std::max(std::abs(c.k), 1e-12)) << x << "," << k;
        }
    }
}

TEST(LaplacianClosed, OppositeSignToGaussianAtProbe) {
    // Characterization at (0.8, 0.8), typical LV, g = 1. The total divergence
    // cancels on the diagonal at g = 1, so the x-components are pinned.
    const auto h = make_typical_lv(1.0);
    const double gauss[3] = {-0.000998651670354671, -0.012131963178895028, -0.068345073530420547};
    const double lap[3] = {0.0060709631057426616, 0.0040145927969812882, 0.00051080089585219348};
    const double alphas[3] = {0.25, 0.5, 1.0};
    for (int i = 0; i < 3; ++i) {
        CurrentField g(h, make_gaussian(alphas[i]), Method::closed_form);
        CurrentField l(h, make_laplacian(i + 2, i + 2, 1, 1), Method::closed_form);
        const double gx = g.divergence(0.8, 0.8).x;
        const double lx = l.divergence(0.8, 0.8).x;
        EXPECT_NEAR(gx, gauss[i], 1e-12 * std::abs(gauss[i]));
        EXPECT_NEAR(lx, lap[i], 1e-12 * std::abs(lap[i]));
        EXPECT_LT(gx * lx, 0.0);
    }
}

TEST(CurrentField, ConstructionRules) {
    EXPECT_THROW(CurrentField(make_harmonic(1.0), make_gaussian(1.0), Method::closed_form), UnsupportedConfigurationError);
    EXPECT_THROW(CurrentField(make_typical_lv(1.0), make_thermal(make_typical_lv(1.0)), Method::closed_form),
                 UnsupportedConfigurationError);
    EXPECT_NO_THROW(CurrentField(make_harmonic(1.0), make_gaussian(1.0), Method::series));
    EXPECT_EQ(parse_method("closed"), Method::closed_form);
    EXPECT_EQ(parse_method("series"), Method::series);
    EXPECT_FALSE(parse_method("spectral").has_value());
    EXPECT_STREQ(to_string(Method::classical), "classical");
}

TEST(Stationarity, HarmonicGaussianVanishes) {
    CurrentField cf(make_harmonic(1.0), make_gaussian(1.0), Method::series);
    for (double x : {-1.0, 0.3, 2.0}) {
        for (double k : {-0.5, 0.0, 1.5}) {
            const auto s = cf.stationarity(x, k);
            EXPECT_NEAR(s.total, 0.0, 1e-16);
            EXPECT_NEAR(s.classical, 0.0, 1e-16);
            EXPECT_EQ(s.quantum, 0.0);
        }
    }
}

TEST(Stationarity, QuantumPartMatchesDirectSeries) {
    const auto h = make_typical_lv(1.0);
    CurrentField cf(h, make_gaussian(1.0), Method::closed_form);
    const auto s = cf.stationarity(0.5, 0.5);
    const auto c = closed_gaussian_div(LvKind::typical, 1.0, 1.0, 0.5, 0.5);
    EXPECT_EQ(s.total, c.total());
    EXPECT_EQ(s.quantum, s.total - s.classical);
    EXPECT_NEAR(s.quantum, series_quantum_div(h, make_gaussian(1.0), 0.5, 0.5).total(), 1e-9);
    // Off the diagonal as well, where the components do not cancel.
    const auto s2 = cf.stationarity(0.5, -0.9);
    EXPECT_NEAR(s2.quantum, series_quantum_div(h, make_gaussian(1.0), 0.5, -0.9).total(), 1e-9);
}

TEST(Stationarity, OutsideGammaSupportIsDomainError) {
    CurrentField cf(make_typical_lv(1.0), make_gamma(2, 2, 1, 1), Method::closed_form);
    EXPECT_THROW(cf.stationarity(-1e-9, 1.0), DomainError);
}

TEST(Stationarity, ThermalEnsembleIsClassicallyStationary) {
    for (const auto& h : {make_typical_lv(1.0), make_modified_lv(1.0), make_typical_lv(2.0)}) {
        CurrentField cf(h, make_thermal(h), Method::classical);
        double worst = 0.0;
        for (int i = 0; i <= 40; ++i) {
            for (int j = 0; j <= 40; ++j) {
                const double x = -3.0 + 0.15 * i, k = -3.0 + 0.15 * j;
                worst = std::max(worst, std::abs(cf.classical_divergence(x, k).total()));
            }
        }
        EXPECT_LT(worst, 1e-8) << h.label();
    }
}

TEST(Liouvillianity, HarmonicGaussianVanishes) {
    CurrentField cf(make_harmonic(1.0), make_gaussian(0.8), Method::series);
    for (double x : {-2.0, -0.2, 1.1}) {
        for (double k : {-1.4, 0.0, 0.9}) {
            const auto v = cf.liouvillianity(x, k);
            ASSERT_TRUE(v.has_value());
            EXPECT_LT(std::abs(*v), 1e-12);
        }
    }
}

TEST(Liouvillianity, MatchesTermByTermSeries) {
    const auto h = make_typical_lv(1.0);
    CurrentField cf(h, make_gaussian(0.5), Method::closed_form);
    EXPECT_NEAR(*cf.liouvillianity(1.0, 1.0), liouvillianity_series_oracle(h, 0.5, 1.0, 1.0), 1e-8);
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (const auto& hh : {make_typical_lv(1.0), make_modified_lv(1.0)}) {
        for (double alpha : {0.5, 1.0}) {
            CurrentField f(hh, make_gaussian(alpha), Method::closed_form);
            for (int trial = 0; trial < 20; ++trial) {
                const double x = d(rng), k = d(rng);
                const double oracle = liouvillianity_series_oracle(hh, alpha, x, k);
                EXPECT_NEAR(*f.liouvillianity(x, k), oracle, 1e-8 * std::max(1.0, std::abs(oracle))) << x << "," << k;
            }
        }
    }
}

TEST(Liouvillianity, MaskedBelowFloor) {
    CurrentField cf(make_typical_lv(1.0), make_gaussian(1.0), Method::closed_form, {}, 1e-12);
    EXPECT_FALSE(cf.liouvillianity(6.0, 0.0).has_value());
    EXPECT_TRUE(cf.liouvillianity(1.0, 0.0).has_value());
    CurrentField strict(make_typical_lv(1.0), make_gaussian(1.0), Method::closed_form, {}, 1.0);
    EXPECT_FALSE(strict.liouvillianity(0.0, 0.0).has_value());
}

TEST(Concurrency, EvaluationOrderDoesNotMatter) {
    CurrentField cf(make_modified_lv(1.0), make_gaussian(0.5), Method::series);
    const auto a = cf.divergence(0.3, -1.2);
    (void)cf.divergence(2.0, 1.0);
    const auto b = cf.divergence(0.3, -1.2);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.k, b.k);
}
