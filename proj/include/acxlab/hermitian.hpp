#pragma once

#include "acxlab/errors.hpp"
#include "acxlab/polynomial.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace acxlab {

/// Point of C^2 with complex double coordinates.
using CPoint = std::array<std::complex<double>, 2>;

inline std::array<double, 4> to_real_point(const CPoint& z) {
    return {z[0].real(), z[0].imag(), z[1].real(), z[1].imag()};
}

inline CPoint to_complex_point(const std::array<double, 4>& x) {
    return {std::complex<double>(x[0], x[1]), std::complex<double>(x[2], x[3])};
}

/// Real-valued polynomial in (z1, conj z1, z2, conj z2). The monomial with
/// exponents (a, b, c, d) is z1^a conj(z1)^b z2^c conj(z2)^d.
template <class T>
class HermitianPolynomial {
public:
    using Scalar = T;
    using C = Complex<T>;
    using Raw = Poly4<C>;

    HermitianPolynomial() = default;
    explicit HermitianPolynomial(Raw raw, int degree_cap = 12) : raw_(std::move(raw)), degree_cap_(degree_cap) {}

    static HermitianPolynomial constant(const T& c) { return HermitianPolynomial(Raw(C(c))); }

    /// Re(c * z1^a conj(z1)^b z2^c conj(z2)^d), kept real by adding the conjugate monomial.
    static HermitianPolynomial real_part(const Exp4& e, const C& c) {
        Raw r;
        C half = c * C(T(1) / T(2));
        r.add_term(e, half);
        r.add_term(swap_conj(e), acxlab::conj(half));
        return HermitianPolynomial(std::move(r));
    }

    /// |z1|^(2p) |z2|^(2q) times a real coefficient.
    static HermitianPolynomial modulus_power(int p, int q, const T& c) {
        return HermitianPolynomial(Raw::monomial({p, p, q, q}, C(c)));
    }

    /// Re z2.
    static HermitianPolynomial re_z2() { return real_part({0, 0, 1, 0}, C(T(1))); }

    static Exp4 swap_conj(const Exp4& e) { return {e[1], e[0], e[3], e[2]}; }

    const Raw& raw() const { return raw_; }
    int degree_cap() const { return degree_cap_; }
    void set_degree_cap(int d) { degree_cap_ = d; }
    int degree() const { return raw_.degree(); }
    bool is_zero() const { return raw_.is_zero(); }

    C coeff(const Exp4& e) const { return raw_.coeff(e); }

    /// Conjugate polynomial: conj(f).
    HermitianPolynomial conjugate() const {
        Raw r;
        for (const auto& [e, c] : raw_.terms()) r.add_term(swap_conj(e), acxlab::conj(c));
        return HermitianPolynomial(std::move(r), degree_cap_);
    }

    /// True when the coefficient table is conjugate-symmetric (exact for rationals).
    bool is_real(double tol = 0.0) const {
        for (const auto& [e, c] : raw_.terms()) {
            C d = c - acxlab::conj(raw_.coeff(swap_conj(e)));
            if (magnitude(d) > tol) return false;
        }
        return true;
    }

    HermitianPolynomial& operator+=(const HermitianPolynomial& o) { raw_ += o.raw_; return *this; }
    HermitianPolynomial& operator-=(const HermitianPolynomial& o) { raw_ -= o.raw_; return *this; }
    HermitianPolynomial& operator*=(const T& s) { raw_ *= C(s); return *this; }
    friend HermitianPolynomial operator+(HermitianPolynomial a, const HermitianPolynomial& b) { return a += b; }
    friend HermitianPolynomial operator-(HermitianPolynomial a, const HermitianPolynomial& b) { return a -= b; }
    friend HermitianPolynomial operator*(HermitianPolynomial a, const T& s) { return a *= s; }
    friend HermitianPolynomial operator*(const T& s, HermitianPolynomial a) { return a *= s; }
    friend HermitianPolynomial operator*(const HermitianPolynomial& a, const HermitianPolynomial& b) {
        return HermitianPolynomial(a.raw_ * b.raw_, std::max(a.degree_cap_, b.degree_cap_));
    }
    friend bool operator==(const HermitianPolynomial& a, const HermitianPolynomial& b) { return a.raw_ == b.raw_; }
    friend bool operator!=(const HermitianPolynomial& a, const HermitianPolynomial& b) { return !(a == b); }

    /// Wirtinger derivatives. var: 0 = z1, 1 = conj z1, 2 = z2, 3 = conj z2.
    /// The result is complex-valued in general, so it is returned as a raw polynomial.
    Raw wirtinger(int var) const { return raw_.derivative(var); }

    /// 4 d^2/dz1 dconj(z1) = d^2/dx1^2 + d^2/dy1^2.
    HermitianPolynomial laplacian_z1() const {
        Raw r = raw_.derivative(0).derivative(1);
        r *= C(T(4));
        return HermitianPolynomial(std::move(r), degree_cap_);
    }

    /// Complex value at an exact complex point.
    C eval_complex(const Complex<T>& z1, const Complex<T>& z2) const {
        std::array<C, 4> x{z1, acxlab::conj(z1), z2, acxlab::conj(z2)};
        return raw_.eval(x);
    }

    T eval(const Complex<T>& z1, const Complex<T>& z2) const { return eval_complex(z1, z2).re; }

    double eval(const CPoint& z) const {
        std::array<std::complex<double>, 4> x{z[0], std::conj(z[0]), z[1], std::conj(z[1])};
        std::complex<double> acc(0.0);
        for (const auto& [e, c] : raw_.terms()) {
            std::complex<double> t(to_double(c.re), to_double(c.im));
            for (int v = 0; v < 4; ++v) {
                for (int k = 0; k < e[v]; ++k) t *= x[v];
            }
            acc += t;
        }
        return acc.real();
    }

    /// g(w) = f(w + p), exact Taylor shift.
    HermitianPolynomial recenter(const Complex<T>& p1, const Complex<T>& p2) const {
        std::array<Raw, 4> subs{
            Raw::variable(0) + Raw(p1),
            Raw::variable(1) + Raw(acxlab::conj(p1)),
            Raw::variable(2) + Raw(p2),
            Raw::variable(3) + Raw(acxlab::conj(p2)),
        };
        return HermitianPolynomial(raw_.compose(subs), degree_cap_);
    }

    /// Real polynomial in (x1, y1, x2, y2).
    Poly4<T> to_real() const {
        using RC = Poly4<C>;
        C i(T(0), T(1));
        // Substitution in real variables, carried with complex coefficients.
        std::array<RC, 4> subs{
            RC::variable(0) + RC::variable(1) * i,
            RC::variable(0) - RC::variable(1) * i,
            RC::variable(2) + RC::variable(3) * i,
            RC::variable(2) - RC::variable(3) * i,
        };
        RC c = raw_.compose(subs);
        Poly4<T> r;
        for (const auto& [e, v] : c.terms()) r.add_term(e, v.re);
        return r;
    }

    static HermitianPolynomial from_real(const Poly4<T>& p, int degree_cap = 12) {
        C half(T(1) / T(2), T(0));
        C mhalf_i(T(0), -T(1) / T(2));
        // x = (z + conj z)/2, y = -i (z - conj z)/2.
        std::array<Raw, 4> subs{
            (Raw::variable(0) + Raw::variable(1)) * half,
            (Raw::variable(0) - Raw::variable(1)) * mhalf_i,
            (Raw::variable(2) + Raw::variable(3)) * half,
            (Raw::variable(2) - Raw::variable(3)) * mhalf_i,
        };
        Poly4<C> lifted = p.template map_coeffs<C>([](const T& c) { return C(c); });
        return HermitianPolynomial(lifted.compose(subs), degree_cap);
    }

    /// Rescales each monomial: coefficient *= s1^(a+b) s2^(c+d) * factor.
    HermitianPolynomial scaled(const T& s1, const T& s2, const T& factor) const {
        Raw r;
        for (const auto& [e, c] : raw_.terms()) {
            r.add_term(e, c * C(int_power(s1, e[0] + e[1]) * int_power(s2, e[2] + e[3]) * factor));
        }
        return HermitianPolynomial(std::move(r), degree_cap_);
    }

    template <class D>
    HermitianPolynomial<D> cast() const {
        return HermitianPolynomial<D>(raw_.template cast<Complex<D>>(), degree_cap_);
    }

    /// Composition with the holomorphic-coordinate substitution z1 -> s1, z2 -> s2,
    /// where s1, s2 are raw polynomials in the same formal variables.
    HermitianPolynomial substitute(const Raw& s1, const Raw& s2) const {
        auto conj_raw = [](const Raw& s) {
            Raw r;
            for (const auto& [e, c] : s.terms()) r.add_term(swap_conj(e), acxlab::conj(c));
            return r;
        };
        std::array<Raw, 4> subs{s1, conj_raw(s1), s2, conj_raw(s2)};
        return HermitianPolynomial(raw_.compose(subs), degree_cap_);
    }

private:
    Raw raw_;
    int degree_cap_ = 12;
};

using RationalHermitian = HermitianPolynomial<Rational>;
using RealHermitian = HermitianPolynomial<double>;

/// Polynomial homogeneous of a fixed degree in (z1, conj z1) only.
template <class T>
struct HomogeneousSlice {
    int degree = 0;
    HermitianPolynomial<T> poly;
};

/// Degree-d part of f made of monomials in z1, conj z1 only.
template <class T>
HomogeneousSlice<T> pure_z1_slice(const HermitianPolynomial<T>& f, int d) {
    typename HermitianPolynomial<T>::Raw r;
    for (const auto& [e, c] : f.raw().terms()) {
        if (e[2] == 0 && e[3] == 0 && e[0] + e[1] == d) r.add_term(e, c);
    }
    return {d, HermitianPolynomial<T>(std::move(r), f.degree_cap())};
}

/// Drops the harmonic monomials z1^d and conj(z1)^d.
template <class T>
HomogeneousSlice<T> nonharmonic_part(const HomogeneousSlice<T>& h) {
    typename HermitianPolynomial<T>::Raw r;
    for (const auto& [e, c] : h.poly.raw().terms()) {
        if (e[0] > 0 && e[1] > 0) r.add_term(e, c);
    }
    return {h.degree, HermitianPolynomial<T>(std::move(r), h.poly.degree_cap())};
}

/// Value of a slice at z1 = e^{i theta}.
template <class T>
double slice_on_circle(const HomogeneousSlice<T>& h, double theta) {
    std::complex<double> acc(0.0);
    for (const auto& [e, c] : h.poly.raw().terms()) {
        acc += std::complex<double>(to_double(c.re), to_double(c.im)) * std::polar(1.0, (e[0] - e[1]) * theta);
    }
    return acc.real();
}

namespace detail {

template <class F>
double golden_max(F f, double a, double b, int iters = 80) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = f(d);
        }
    }
    return std::max(fc, fd);
}

}  // namespace detail

/// sup over |z1| = 1 of |H|: grid maximum refined by golden-section search
/// around the best grid nodes.
template <class T>
double slice_norm(const HomogeneousSlice<T>& h, int grid = 4096) {
    if (h.poly.is_zero()) return 0.0;
    const double step = 2.0 * std::numbers::pi / grid;
    std::vector<double> vals(grid);
    for (int i = 0; i < grid; ++i) vals[i] = std::abs(slice_on_circle(h, i * step));
    double best = *std::max_element(vals.begin(), vals.end());
    auto f = [&](double t) { return std::abs(slice_on_circle(h, t)); };
    for (int i = 0; i < grid; ++i) {
        double prev = vals[(i + grid - 1) % grid], next = vals[(i + 1) % grid];
        if (vals[i] >= prev && vals[i] >= next && vals[i] >= 0.5 * best) {
            best = std::max(best, detail::golden_max(f, (i - 1) * step, (i + 1) * step));
        }
    }
    return best;
}

/// Upper bound on the circle sup from grid values alone: a trigonometric
/// polynomial of degree d sampled at N > 2d nodes has sup <= max / cos(d pi / N).
template <class T>
double slice_norm_bound(const HomogeneousSlice<T>& h, int grid = 4096) {
    if (h.poly.is_zero()) return 0.0;
    const double step = 2.0 * std::numbers::pi / grid;
    double m = 0.0;
    for (int i = 0; i < grid; ++i) m = std::max(m, std::abs(slice_on_circle(h, i * step)));
    return m / std::cos(h.degree * std::numbers::pi / grid);
}

/// delta^{-1} rho(t z1, delta z2) with delta = t^(2m): the monomial
/// z1^a zb1^b z2^c zb2^d is multiplied by t^((a+b) + 2m(c+d) - 2m). Exact.
template <class T>
HermitianPolynomial<T> model_dilate_root(const HermitianPolynomial<T>& rho, int m, const T& t) {
    typename HermitianPolynomial<T>::Raw r;
    for (const auto& [e, c] : rho.raw().terms()) {
        int p = (e[0] + e[1]) + 2 * m * (e[2] + e[3]) - 2 * m;
        r.add_term(e, c * Complex<T>(int_power(t, p)));
    }
    return HermitianPolynomial<T>(std::move(r), rho.degree_cap());
}

/// Same map for a floating delta: coefficient *= delta^((a+b)/(2m) + (c+d) - 1).
inline RealHermitian model_dilate(const RealHermitian& rho, int m, double delta) {
    RealHermitian::Raw r;
    for (const auto& [e, c] : rho.raw().terms()) {
        double p = double(e[0] + e[1]) / (2.0 * m) + (e[2] + e[3]) - 1.0;
        r.add_term(e, c * Complex<double>(std::pow(delta, p)));
    }
    return RealHermitian(std::move(r), rho.degree_cap());
}

}  // namespace acxlab
