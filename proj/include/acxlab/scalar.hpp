#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

namespace acxlab {

using Rational = mpq_class;

/// Minimal complex number over an arbitrary field. std::complex is only
/// specified for floating-point types, so exact rationals need their own.
template <class T>
struct Complex {
    T re{0};
    T im{0};

    Complex() = default;
    Complex(T r) : re(std::move(r)), im(0) {}
    Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}
    template <class U, class = std::enable_if_t<std::is_arithmetic_v<U> && !std::is_same_v<U, T>>>
    Complex(U r) : re(r), im(0) {}

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Complex& o) {
        T r = re * o.re - im * o.im;
        T i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    Complex& operator*=(const T& s) { re *= s; im *= s; return *this; }
    Complex& operator/=(const Complex& o) {
        T den = o.re * o.re + o.im * o.im;
        T r = (re * o.re + im * o.im) / den;
        T i = (im * o.re - re * o.im) / den;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator*(Complex a, const T& s) { return a *= s; }
    friend Complex operator*(const T& s, Complex a) { return a *= s; }
    friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
    Complex operator-() const { return Complex(-re, -im); }

    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

template <class T>
Complex<T> conj(const Complex<T>& z) {
    return Complex<T>(z.re, -z.im);
}

template <class T>
Complex<T> imag_unit() {
    return Complex<T>(T(0), T(1));
}

// Scalar helpers shared by the exact and floating paths.

inline double to_double(double x) { return x; }
/// Nearest double when numerator and denominator are exact doubles (IEEE division
/// rounds correctly); GMP's get_d truncates, which would turn 1/10 into nextbelow(0.1).
inline double to_double(const Rational& x) {
    if (mpz_sizeinbase(x.get_num_mpz_t(), 2) <= 53 && mpz_sizeinbase(x.get_den_mpz_t(), 2) <= 53) {
        return x.get_num().get_d() / x.get_den().get_d();
    }
    return x.get_d();
}

template <class T>
std::complex<double> to_complex_double(const Complex<T>& z) {
    return {to_double(z.re), to_double(z.im)};
}

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
template <class T>
bool is_zero(const Complex<T>& z) {
    return is_zero(z.re) && is_zero(z.im);
}

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Rational& x) { return std::abs(to_double(x)); }
template <class T>
double magnitude(const Complex<T>& z) {
    return std::hypot(to_double(z.re), to_double(z.im));
}

/// Converts a value of one scalar kind into another (exact when possible).
template <class T>
T scalar_cast(double x) {
    if constexpr (std::is_same_v<T, Rational>) {
        return Rational(x);
    } else {
        return T(x);
    }
}

template <class T>
T scalar_cast(const Rational& x) {
    if constexpr (std::is_same_v<T, Rational>) {
        return x;
    } else {
        return T(to_double(x));
    }
}

template <class T>
T int_power(T base, int e) {
    T result(1);
    if (e < 0) {
        base = T(1) / base;
        e = -e;
    }
    while (e > 0) {
        if (e & 1) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

inline std::string scalar_to_string(const Rational& x) { return x.get_str(); }
inline std::string scalar_to_string(double x) { return std::to_string(x); }

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

}  // namespace acxlab
