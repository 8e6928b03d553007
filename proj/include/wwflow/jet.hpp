#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wwflow {

/// Truncated Taylor series in one parameter t around t0.
///
/// Coefficient j holds f^(j)(t0) / j!. Arithmetic follows the usual
/// truncated product / chain rules, so the n-th derivative of any expression
/// built from jets is exact up to rounding for n <= order().
class Jet {
public:
    Jet() : c_(1, 0.0) {}

    static Jet constant(double value, int order) {
        Jet j(order);
        j.c_[0] = value;
        return j;
    }

    /// The independent parameter itself, seeded at t0 = value.
    static Jet variable(double value, int order) {
        Jet j(order);
        j.c_[0] = value;
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double value() const { return c_[0]; }
    double coefficient(int j) const { return c_.at(static_cast<std::size_t>(j)); }

    /// n-th derivative with respect to the parameter.
    double derivative(int n) const {
        double f = 1.0;
        for (int m = 2; m <= n; ++m) f *= m;
        return f * coefficient(n);
    }

    Jet& operator+=(const Jet& o) {
        check(o);
        for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        check(o);
        for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
        return *this;
    }
    Jet& operator*=(double s) {
        for (auto& v : c_) v *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a += -s; }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
    friend Jet operator-(Jet a) { return a *= -1.0; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        a.check(b);
        Jet r(a.order());
        for (std::size_t n = 0; n < a.c_.size(); ++n) {
            double s = 0.0;
            for (std::size_t j = 0; j <= n; ++j) s += a.c_[j] * b.c_[n - j];
            r.c_[n] = s;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        a.check(b);
        if (b.c_[0] == 0.0) throw std::domain_error("Jet: division by a jet with zero value");
        Jet q(a.order());
        for (std::size_t n = 0; n < a.c_.size(); ++n) {
            double s = a.c_[n];
            for (std::size_t j = 1; j <= n; ++j) s -= b.c_[j] * q.c_[n - j];
            q.c_[n] = s / b.c_[0];
        }
        return q;
    }

    friend Jet exp(const Jet& f) {
        Jet e(f.order());
        e.c_[0] = std::exp(f.c_[0]);
        for (std::size_t n = 1; n < f.c_.size(); ++n) {
            double s = 0.0;
            for (std::size_t j = 1; j <= n; ++j) s += static_cast<double>(j) * f.c_[j] * e.c_[n - j];
            e.c_[n] = s / static_cast<double>(n);
        }
        return e;
    }

    friend Jet sin(const Jet& f) { return sincos(f).first; }
    friend Jet cos(const Jet& f) { return sincos(f).second; }

    friend std::pair<Jet, Jet> sincos(const Jet& f) {
        Jet s(f.order()), c(f.order());
        s.c_[0] = std::sin(f.c_[0]);
        c.c_[0] = std::cos(f.c_[0]);
        for (std::size_t n = 1; n < f.c_.size(); ++n) {
            double ss = 0.0, cc = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double jf = static_cast<double>(j) * f.c_[j];
                ss += jf * c.c_[n - j];
                cc += jf * s.c_[n - j];
            }
            s.c_[n] = ss / static_cast<double>(n);
            c.c_[n] = -cc / static_cast<double>(n);
        }
        return {s, c};
    }

private:
    explicit Jet(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
        if (order < 0) throw std::domain_error("Jet: negative order");
    }

    void check(const Jet& o) const {
        if (o.c_.size() != c_.size()) throw std::domain_error("Jet: order mismatch");
    }

    std::vector<double> c_;
};

}  // namespace wwflow
