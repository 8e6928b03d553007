#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/differentiation/autodiff.hpp>

#include "wwflow/hamiltonian.hpp"

using namespace wwflow;

namespace {

// n-th derivative by central differences with one Richardson step.
double fd(const std::function<double(double)>& f, int n, double u, double h) {
    auto central = [&](double step) {
        double s = 0.0, binom = 1.0;
        for (int j = 0; j <= n; ++j) {
            s += ((j % 2) ? -1.0 : 1.0) * binom * f(u + (0.5 * n - j) * step);
            binom = binom * (n - j) / (j + 1);
        }
        return s / std::pow(step, n);
    };
    return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

}  // namespace

TEST(TypicalLv, SpecExamples) {
    const auto h = make_typical_lv(1.0);
    EXPECT_DOUBLE_EQ(h(0.0, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(h.odd_derivative_K(0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(h.odd_derivative_K(1, 1.0), -std::exp(-1.0));
    EXPECT_EQ(h.label(), "lv");
    EXPECT_TRUE(h.factorized());
}

TEST(TypicalLv, FactorizationShape) {
    const auto h = make_typical_lv(2.5);
    const auto& fk = *h.kinetic().factorization;
    const auto& fv = *h.potential().factorization;
    EXPECT_EQ(fk.linear_coefficient, 1.0);
    EXPECT_EQ(fk.rate, -1.0);
    EXPECT_DOUBLE_EQ(fk.profile(0.3), std::exp(-0.3));
    EXPECT_EQ(fv.linear_coefficient, 2.5);
    EXPECT_EQ(fv.rate, -1.0);
    EXPECT_DOUBLE_EQ(fv.profile(0.3), 2.5 * std::exp(-0.3));
    // g(delta_eta0 - e^{-x})
    for (int eta = 0; eta < 4; ++eta) {
        const double expected = 2.5 * ((eta == 0 ? 1.0 : 0.0) - std::exp(-0.4));
        EXPECT_NEAR(h.odd_derivative_V(eta, 0.4), expected, 1e-15);
        EXPECT_NEAR(fv.odd_derivative(eta, 0.4), expected, 1e-15);
    }
}

TEST(ModifiedLv, SpecExamples) {
    const auto h = make_modified_lv(1.0);
    EXPECT_DOUBLE_EQ(h(0.0, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(h.odd_derivative_K(2, 1.0), std::sinh(1.0));
    EXPECT_DOUBLE_EQ(h(-0.8, 1.3), h(0.8, 1.3));
    const auto& fk = *h.kinetic().factorization;
    EXPECT_EQ(fk.linear_coefficient, 0.0);
    EXPECT_EQ(fk.rate, 1.0);
}

TEST(Harmonic, SpecExamples) {
    const auto h = make_harmonic(1.0);
    EXPECT_DOUBLE_EQ(h(0.0, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(h.odd_derivative_V(1, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(h(1.0, 0.0), 2.5);
    EXPECT_FALSE(h.factorized());
    EXPECT_DOUBLE_EQ(make_harmonic(3.0)(0.0, 0.0), 4.0);
}

TEST(ClassicalVelocity, SpecExamples) {
    const auto [a, b] = classical_velocity(make_typical_lv(1.0), 0.0, 0.0);
    EXPECT_EQ(a, 0.0);
    EXPECT_EQ(b, 0.0);
    const auto [c, d] = classical_velocity(make_modified_lv(1.0), 0.0, 1.0);
    EXPECT_DOUBLE_EQ(c, std::sinh(1.0));
    EXPECT_DOUBLE_EQ(d, 0.0);
    const auto [e, f] = classical_velocity(make_harmonic(1.0), 1.0, 0.0);
    EXPECT_DOUBLE_EQ(e, 0.0);
    EXPECT_DOUBLE_EQ(f, -1.0);
    const auto [vx, vk] = classical_velocity(make_typical_lv(2.0), 0.3, 0.7);
    EXPECT_DOUBLE_EQ(vx, 1.0 - std::exp(-0.7));
    EXPECT_DOUBLE_EQ(vk, 2.0 * std::exp(-0.3) - 2.0);
}

TEST(Hamiltonian, RejectsNonPositiveAnisotropy) {
    for (double g : {0.0, -1.0, std::nan("")}) {
        EXPECT_THROW(make_typical_lv(g), DomainError);
        EXPECT_THROW(make_modified_lv(g), DomainError);
        EXPECT_THROW(make_harmonic(g), DomainError);
    }
}

TEST(Hamiltonian, LabelLookup) {
    EXPECT_EQ(make_hamiltonian("lv", 1.0).kind(), HamiltonianKind::typical_lv);
    EXPECT_EQ(make_hamiltonian("mlv", 1.0).kind(), HamiltonianKind::modified_lv);
    EXPECT_EQ(make_hamiltonian("harmonic", 1.0).kind(), HamiltonianKind::harmonic);
    EXPECT_THROW(make_hamiltonian("duffing", 1.0), DomainError);
}

TEST(Hamiltonian, FactorizationMatchesFiniteDifferences) {
    // Central differences, step 1e-3 with one Richardson step, resolve the
    // first and third derivatives; higher orders drown in rounding.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (const auto& h : {make_typical_lv(1.0), make_typical_lv(1.7), make_modified_lv(1.0), make_modified_lv(0.6)}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double u = d(rng);
            for (int eta = 0; eta < 2; ++eta) {
                const int n = 2 * eta + 1;
                const double step = eta == 0 ? 1e-3 : 2e-2;
                const double fk = fd(h.kinetic().value, n, u, step);
                const double fv = fd(h.potential().value, n, u, step);
                const double ak = h.kinetic().factorization->odd_derivative(eta, u);
                const double av = h.potential().factorization->odd_derivative(eta, u);
                EXPECT_NEAR(fk, ak, 1e-7 * std::max(1.0, std::abs(ak))) << h.label() << " eta=" << eta << " u=" << u;
                EXPECT_NEAR(fv, av, 1e-7 * std::max(1.0, std::abs(av))) << h.label() << " eta=" << eta << " u=" << u;
                EXPECT_EQ(ak, h.odd_derivative_K(eta, u));
            }
        }
    }
}

TEST(Hamiltonian, FactorizationMatchesAutodiff) {
    using boost::math::differentiation::make_fvar;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (double g : {1.0, 1.7}) {
        const auto lv = make_typical_lv(g);
        const auto mlv = make_modified_lv(g);
        for (int trial = 0; trial < 20; ++trial) {
            const double u = d(rng);
            const auto t = make_fvar<double, 8>(u);
            const auto lv_k = t + exp(-t);
            const auto lv_v = g * (t + exp(-t));
            const auto mlv_k = cosh(t);
            const auto mlv_v = g * cosh(t);
            ASSERT_NEAR(lv_k.derivative(0), lv.kinetic().value(u), 1e-14);
            ASSERT_NEAR(mlv_v.derivative(0), mlv.potential().value(u), 1e-14);
            for (int eta = 0; eta < 4; ++eta) {
                const unsigned n = 2 * eta + 1;
                EXPECT_NEAR(lv.kinetic().factorization->odd_derivative(eta, u), lv_k.derivative(n), 1e-12 * std::exp(std::abs(u)));
                EXPECT_NEAR(lv.potential().factorization->odd_derivative(eta, u), lv_v.derivative(n), 1e-12 * g * std::exp(std::abs(u)));
                EXPECT_NEAR(mlv.kinetic().factorization->odd_derivative(eta, u), mlv_k.derivative(n), 1e-12 * std::cosh(u));
                EXPECT_NEAR(mlv.potential().factorization->odd_derivative(eta, u), mlv_v.derivative(n), 1e-12 * g * std::cosh(u));
                // Even orders from the plain derivative evaluator.
                EXPECT_NEAR(lv.kinetic_derivative(n + 1, u), lv_k.derivative(n + 1), 1e-12 * std::exp(std::abs(u)));
            }
        }
    }
}

TEST(Hamiltonian, ClassicalFlowIsDivergenceFree) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const double step = 1e-5;
    for (const auto& h : {make_typical_lv(1.3), make_modified_lv(1.0), make_harmonic(1.0)}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double x = d(rng), k = d(rng);
            const double dvx = (classical_velocity(h, x + step, k).first - classical_velocity(h, x - step, k).first) / (2 * step);
            const double dvk = (classical_velocity(h, x, k + step).second - classical_velocity(h, x, k - step).second) / (2 * step);
            EXPECT_LT(std::abs(dvx + dvk), 1e-10);
        }
    }
}

TEST(Hamiltonian, SeparableSum) {
    const auto h = make_typical_lv(1.4);
    EXPECT_DOUBLE_EQ(h(0.3, -0.2), h.kinetic().value(-0.2) + h.potential().value(0.3));
    EXPECT_DOUBLE_EQ(h.minimum_energy(), 2.4);
}
