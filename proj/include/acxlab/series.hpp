#pragma once

#include "acxlab/hermitian.hpp"
#include "acxlab/polynomial.hpp"

#include <complex>
#include <vector>

namespace acxlab {

/// Truncated power series sum c[a][b] zeta^a conj(zeta)^b with a + b <= N.
template <class T>
class BiSeries {
public:
    using C = Complex<T>;

    BiSeries() : BiSeries(0) {}
    explicit BiSeries(int order) : n_(order), c_(std::size_t(order + 1) * (order + 1), C(T(0))) {}

    static BiSeries constant(int order, const C& v) {
        BiSeries s(order);
        s.at(0, 0) = v;
        return s;
    }

    static BiSeries zeta(int order) {
        BiSeries s(order);
        if (order >= 1) s.at(1, 0) = C(T(1));
        return s;
    }

    int order() const { return n_; }

    C& at(int a, int b) { return c_[std::size_t(a) * (n_ + 1) + b]; }
    const C& at(int a, int b) const { return c_[std::size_t(a) * (n_ + 1) + b]; }

    C get(int a, int b) const {
        if (a < 0 || b < 0 || a + b > n_) return C(T(0));
        return at(a, b);
    }

    BiSeries& operator+=(const BiSeries& o) {
        for (int a = 0; a <= n_; ++a)
            for (int b = 0; a + b <= n_; ++b) at(a, b) += o.get(a, b);
        return *this;
    }
    BiSeries& operator-=(const BiSeries& o) {
        for (int a = 0; a <= n_; ++a)
            for (int b = 0; a + b <= n_; ++b) at(a, b) -= o.get(a, b);
        return *this;
    }
    BiSeries& operator*=(const C& s) {
        for (int a = 0; a <= n_; ++a)
            for (int b = 0; a + b <= n_; ++b) at(a, b) *= s;
        return *this;
    }
    friend BiSeries operator+(BiSeries a, const BiSeries& b) { return a += b; }
    friend BiSeries operator-(BiSeries a, const BiSeries& b) { return a -= b; }
    friend BiSeries operator*(BiSeries a, const C& s) { return a *= s; }

    friend BiSeries operator*(const BiSeries& x, const BiSeries& y) {
        const int n = std::min(x.n_, y.n_);
        BiSeries r(n);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b) {
                const C& cx = x.at(a, b);
                if (is_zero(cx)) continue;
                for (int c = 0; a + b + c <= n; ++c)
                    for (int d = 0; a + b + c + d <= n; ++d) {
                        const C& cy = y.at(c, d);
                        if (is_zero(cy)) continue;
                        r.at(a + c, b + d) += cx * cy;
                    }
            }
        return r;
    }

    /// conj(f(zeta)) as a series: swap exponents, conjugate coefficients.
    BiSeries conjugate() const {
        BiSeries r(n_);
        for (int a = 0; a <= n_; ++a)
            for (int b = 0; a + b <= n_; ++b) r.at(b, a) = acxlab::conj(at(a, b));
        return r;
    }

    BiSeries d_zeta() const {
        BiSeries r(n_);
        for (int a = 1; a <= n_; ++a)
            for (int b = 0; a + b <= n_; ++b) r.at(a - 1, b) = at(a, b) * C(T(a));
        return r;
    }

    BiSeries d_zetabar() const {
        BiSeries r(n_);
        for (int a = 0; a <= n_; ++a)
            for (int b = 1; a + b <= n_; ++b) r.at(a, b - 1) = at(a, b) * C(T(b));
        return r;
    }

    /// Right inverse of d/dconj(zeta): zeta^a zb^b -> zeta^a zb^(b+1)/(b+1); top degree dropped.
    BiSeries antiderivative_zetabar() const {
        BiSeries r(n_);
        for (int a = 0; a <= n_; ++a)
            for (int b = 0; a + b + 1 <= n_; ++b) r.at(a, b + 1) = at(a, b) / C(T(b + 1));
        return r;
    }

    /// Sum of coefficients of total degree k (gives d^k/dx^k at 0 divided by k!).
    C degree_sum(int k) const {
        C s(T(0));
        for (int a = 0; a <= k; ++a) s += get(a, k - a);
        return s;
    }

    std::complex<double> eval(std::complex<double> z) const {
        const std::complex<double> zb = std::conj(z);
        std::complex<double> acc(0.0), zp(1.0);
        for (int a = 0; a <= n_; ++a) {
            std::complex<double> inner(0.0);
            for (int b = n_ - a; b >= 0; --b) {
                const C& v = at(a, b);
                inner = inner * zb + std::complex<double>(to_double(v.re), to_double(v.im));
            }
            acc += zp * inner;
            zp *= z;
        }
        return acc;
    }

    double max_abs() const {
        double m = 0.0;
        for (int a = 0; a <= n_; ++a)
            for (int b = 0; a + b <= n_; ++b) m = std::max(m, magnitude(at(a, b)));
        return m;
    }

    /// Lowest total degree with a coefficient of magnitude > eps (exact zero test when eps < 0).
    int lowest_degree(double eps) const {
        for (int k = 0; k <= n_; ++k)
            for (int a = 0; a <= k; ++a) {
                const C& v = at(a, k - a);
                bool nz = eps < 0.0 ? !is_zero(v) : magnitude(v) > eps;
                if (nz) return k;
            }
        return -1;
    }

    template <class D>
    BiSeries<D> cast() const {
        BiSeries<D> r(n_);
        for (int a = 0; a <= n_; ++a)
            for (int b = 0; a + b <= n_; ++b) r.at(a, b) = convert<Complex<D>>(at(a, b));
        return r;
    }

private:
    int n_;
    std::vector<C> c_;
};

/// Substitutes series for the four formal variables of a polynomial.
template <class T, class C>
BiSeries<T> compose_series(const Poly4<C>& p, const std::array<BiSeries<T>, 4>& vars, int order) {
    std::array<std::vector<BiSeries<T>>, 4> pw;
    for (int v = 0; v < 4; ++v) {
        int d = std::max(p.degree_in(v), 0);
        pw[v].push_back(BiSeries<T>::constant(order, Complex<T>(T(1))));
        for (int k = 1; k <= d; ++k) pw[v].push_back(pw[v][k - 1] * vars[v]);
    }
    BiSeries<T> r(order);
    for (const auto& [e, c] : p.terms()) {
        BiSeries<T> t = BiSeries<T>::constant(order, convert<Complex<T>>(c));
        for (int v = 0; v < 4; ++v) {
            if (e[v] > 0) t = t * pw[v][e[v]];
        }
        r += t;
    }
    return r;
}

/// Real coordinate series (x1, y1, x2, y2) of a complex pair (w1, w2).
template <class T>
std::array<BiSeries<T>, 4> real_coordinates(const BiSeries<T>& w1, const BiSeries<T>& w2) {
    using C = Complex<T>;
    const C half(T(1) / T(2), T(0));
    const C mhalf_i(T(0), -T(1) / T(2));
    BiSeries<T> w1b = w1.conjugate(), w2b = w2.conjugate();
    return {(w1 + w1b) * half, (w1 - w1b) * mhalf_i, (w2 + w2b) * half, (w2 - w2b) * mhalf_i};
}

/// rho o u for a Hermitian polynomial and a series pair u = (w1, w2).
template <class T, class U>
BiSeries<T> compose_hermitian(const HermitianPolynomial<U>& rho, const BiSeries<T>& w1, const BiSeries<T>& w2) {
    std::array<BiSeries<T>, 4> vars{w1, w1.conjugate(), w2, w2.conjugate()};
    return compose_series(rho.raw(), vars, w1.order());
}

}  // namespace acxlab
