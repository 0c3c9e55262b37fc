#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <ostream>
#include <string>

#include "thurston/errors.hpp"

namespace thurston {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary precision rational, always in lowest terms with positive denominator.
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline std::string to_string(const Rational& q) {
    const BigInt den = denominator_of(q);
    if (den == 1) return numerator_of(q).str();
    return numerator_of(q).str() + "/" + den.str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Exact complex number with rational real and imaginary parts.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {}  // NOLINT
    GaussianRational(long long re) : re_(re) {}  // NOLINT
    GaussianRational(int re) : re_(re) {}        // NOLINT

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    [[nodiscard]] const Rational& re() const noexcept { return re_; }
    [[nodiscard]] const Rational& im() const noexcept { return im_; }

    [[nodiscard]] bool is_zero() const { return re_ == 0 && im_ == 0; }
    [[nodiscard]] bool is_real() const { return im_ == 0; }
    [[nodiscard]] bool is_one() const { return re_ == 1 && im_ == 0; }

    [[nodiscard]] GaussianRational conj() const { return {re_, -im_}; }
    /// |q|^2 = re^2 + im^2
    [[nodiscard]] Rational norm2() const { return re_ * re_ + im_ * im_; }

    [[nodiscard]] std::complex<double> to_complex() const { return {to_double(re_), to_double(im_)}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rational re = re_ * o.re_ - im_ * o.im_;
        im_ = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(re);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        if (o.is_zero()) throw UsageError("division by zero");
        const Rational n = o.norm2();
        *this *= o.conj();
        re_ /= n;
        im_ /= n;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    Rational re_{0};
    Rational im_{0};
};

/// Text form accepted back by the expression parser: `3/2`, `-1/2i`, `(1/3+2/3i)`.
inline std::string to_string(const GaussianRational& q) {
    if (q.is_real()) return to_string(q.re());
    if (q.re() == 0) {
        if (q.im() == 1) return "i";
        if (q.im() == -1) return "-i";
        return to_string(q.im()) + "i";
    }
    std::string s = "(" + to_string(q.re());
    s += q.im() < 0 ? "-" : "+";
    const Rational mag = q.im() < 0 ? Rational(-q.im()) : q.im();
    s += (mag == 1 ? std::string() : to_string(mag)) + "i)";
    return s;
}

inline std::ostream& operator<<(std::ostream& os, const GaussianRational& q) { return os << to_string(q); }

}  // namespace thurston
