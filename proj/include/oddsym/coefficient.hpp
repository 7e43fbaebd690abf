#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "oddsym/error.hpp"

namespace oddsym {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

// Gaussian rational a + b*i with exact arithmetic, i^2 = -1.
struct Coefficient {
    Rational re;
    Rational im;

    Coefficient() = default;
    Coefficient(int v) : re(v) {}          // NOLINT: implicit by design
    Coefficient(Rational r) : re(std::move(r)) {}
    Coefficient(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static Coefficient i() { return Coefficient(Rational(0), Rational(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_one() const { return re == 1 && im == 0; }

    Coefficient operator-() const { return Coefficient(-re, -im); }

    Coefficient& operator+=(const Coefficient& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Coefficient& operator-=(const Coefficient& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
    friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }

    friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
        return Coefficient(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    Coefficient& operator*=(const Coefficient& o) { return *this = *this * o; }

    Coefficient inverse() const {
        Rational norm = re * re + im * im;
        if (norm == 0)
            throw PreconditionError("division by zero coefficient");
        return Coefficient(re / norm, -im / norm);
    }
    friend Coefficient operator/(const Coefficient& a, const Coefficient& b) {
        return a * b.inverse();
    }

    friend bool operator==(const Coefficient& a, const Coefficient& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const Coefficient& a, const Coefficient& b) { return !(a == b); }
};

} // namespace oddsym
