#pragma once

#include "acxlab/scalar.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <vector>

namespace acxlab {

using Exp4 = std::array<int, 4>;

inline int total_degree(const Exp4& e) { return e[0] + e[1] + e[2] + e[3]; }

/// Converts between coefficient kinds (rational, double, complex of either).
template <class To, class From>
To convert(const From& x) {
    if constexpr (std::is_same_v<To, From>) {
        return x;
    } else if constexpr (std::is_same_v<To, double>) {
        if constexpr (std::is_same_v<From, Rational>) {
            return to_double(x);
        } else {
            return static_cast<double>(x);
        }
    } else if constexpr (std::is_same_v<To, Rational>) {
        return Rational(x);
    } else if constexpr (std::is_same_v<To, Complex<double>>) {
        if constexpr (std::is_same_v<From, Complex<Rational>>) {
            return Complex<double>(to_double(x.re), to_double(x.im));
        } else if constexpr (std::is_same_v<From, std::complex<double>>) {
            return Complex<double>(x.real(), x.imag());
        } else {
            return Complex<double>(convert<double>(x), 0.0);
        }
    } else if constexpr (std::is_same_v<To, Complex<Rational>>) {
        if constexpr (std::is_same_v<From, Complex<double>>) {
            return Complex<Rational>(Rational(x.re), Rational(x.im));
        } else {
            return Complex<Rational>(convert<Rational>(x), Rational(0));
        }
    } else {
        return To(x);
    }
}

/// Sparse polynomial in four formal variables. Used both for real
/// polynomials in (x1, y1, x2, y2) and, with complex coefficients, for
/// polynomials in (z1, conj z1, z2, conj z2).
template <class C>
class Poly4 {
public:
    using Coeff = C;
    using Map = std::map<Exp4, C>;

    Poly4() = default;
    explicit Poly4(const C& constant) { add_term({0, 0, 0, 0}, constant); }

    static Poly4 monomial(const Exp4& e, const C& c) {
        Poly4 p;
        p.add_term(e, c);
        return p;
    }

    static Poly4 variable(int i) {
        Exp4 e{0, 0, 0, 0};
        e[i] = 1;
        return monomial(e, C(1));
    }

    const Map& terms() const { return terms_; }

    C coeff(const Exp4& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? C(0) : it->second;
    }

    void add_term(const Exp4& e, const C& c) {
        if (acxlab::is_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (acxlab::is_zero(it->second)) terms_.erase(it);
        }
    }

    void set_term(const Exp4& e, const C& c) {
        terms_.erase(e);
        add_term(e, c);
    }

    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exp4{0, 0, 0, 0});
    }

    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
        return d;
    }

    int degree_in(int var) const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
        return d;
    }

    Poly4& operator+=(const Poly4& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly4& operator-=(const Poly4& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    Poly4& operator*=(const C& s) {
        if (acxlab::is_zero(s)) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Poly4 operator+(Poly4 a, const Poly4& b) { return a += b; }
    friend Poly4 operator-(Poly4 a, const Poly4& b) { return a -= b; }
    friend Poly4 operator*(Poly4 a, const C& s) { return a *= s; }
    friend Poly4 operator*(const C& s, Poly4 a) { return a *= s; }
    Poly4 operator-() const {
        Poly4 r = *this;
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }

    friend Poly4 operator*(const Poly4& a, const Poly4& b) { return multiply(a, b, -1); }

    /// Product with all terms of total degree above max_degree dropped (-1 keeps everything).
    static Poly4 multiply(const Poly4& a, const Poly4& b, int max_degree) {
        Poly4 r;
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Exp4 e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]};
                if (max_degree >= 0 && total_degree(e) > max_degree) continue;
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    friend bool operator==(const Poly4& a, const Poly4& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly4& a, const Poly4& b) { return !(a == b); }

    Poly4 derivative(int var) const {
        Poly4 r;
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exp4 f = e;
            f[var] -= 1;
            r.add_term(f, c * C(e[var]));
        }
        return r;
    }

    Poly4 truncated(int max_degree) const {
        Poly4 r;
        for (const auto& [e, c] : terms_) {
            if (total_degree(e) <= max_degree) r.terms_.emplace(e, c);
        }
        return r;
    }

    /// Homogeneous component of the given total degree.
    Poly4 homogeneous_part(int d) const {
        Poly4 r;
        for (const auto& [e, c] : terms_) {
            if (total_degree(e) == d) r.terms_.emplace(e, c);
        }
        return r;
    }

    template <class D, class F>
    Poly4<D> map_coeffs(F f) const {
        Poly4<D> r;
        for (const auto& [e, c] : terms_) r.add_term(e, f(c));
        return r;
    }

    template <class D>
    Poly4<D> cast() const {
        return map_coeffs<D>([](const C& c) { return convert<D>(c); });
    }

    /// Evaluates at a point whose coordinates have type P; coefficients are
    /// converted to P.
    template <class P>
    P eval(const std::array<P, 4>& x) const {
        std::array<std::vector<P>, 4> pw;
        for (int v = 0; v < 4; ++v) {
            int d = std::max(degree_in(v), 0);
            pw[v].resize(d + 1);
            pw[v][0] = P(1);
            for (int k = 1; k <= d; ++k) pw[v][k] = pw[v][k - 1] * x[v];
        }
        P acc(0);
        for (const auto& [e, c] : terms_) {
            P t = convert<P>(c);
            for (int v = 0; v < 4; ++v) {
                if (e[v] > 0) t *= pw[v][e[v]];
            }
            acc += t;
        }
        return acc;
    }

    /// Substitutes subs[v] for variable v; terms above max_degree are dropped
    /// after every product when max_degree >= 0.
    template <class D>
    Poly4<D> compose(const std::array<Poly4<D>, 4>& subs, int max_degree = -1) const {
        std::array<std::vector<Poly4<D>>, 4> pw;
        for (int v = 0; v < 4; ++v) {
            int d = std::max(degree_in(v), 0);
            pw[v].reserve(d + 1);
            pw[v].push_back(Poly4<D>(D(1)));
            for (int k = 1; k <= d; ++k) pw[v].push_back(Poly4<D>::multiply(pw[v][k - 1], subs[v], max_degree));
        }
        Poly4<D> r;
        for (const auto& [e, c] : terms_) {
            Poly4<D> t(convert<D>(c));
            for (int v = 0; v < 4; ++v) {
                if (e[v] > 0) t = Poly4<D>::multiply(t, pw[v][e[v]], max_degree);
            }
            r += t;
        }
        return r;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [e, c] : terms_) m = std::max(m, magnitude(c));
        return m;
    }

private:
    Map terms_;
};

/// Flat evaluator for hot loops over double points.
class CompiledPoly {
public:
    CompiledPoly() = default;
    template <class C>
    explicit CompiledPoly(const Poly4<C>& p) {
        for (const auto& [e, c] : p.terms()) {
            exps_.push_back(e);
            coeffs_.push_back(convert<double>(c));
            for (int v = 0; v < 4; ++v) maxdeg_[v] = std::max(maxdeg_[v], e[v]);
        }
        for (int v = 0; v < 4; ++v) {
            if (maxdeg_[v] >= kMaxDegree) throw std::length_error("CompiledPoly: degree too large");
        }
    }

    double operator()(const std::array<double, 4>& x) const {
        if (exps_.empty()) return 0.0;
        double pw[4][kMaxDegree];
        for (int v = 0; v < 4; ++v) {
            pw[v][0] = 1.0;
            for (int k = 1; k <= maxdeg_[v]; ++k) pw[v][k] = pw[v][k - 1] * x[v];
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < exps_.size(); ++i) {
            const Exp4& e = exps_[i];
            acc += coeffs_[i] * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] * pw[3][e[3]];
        }
        return acc;
    }

    bool empty() const { return exps_.empty(); }

private:
    static constexpr int kMaxDegree = 48;
    std::vector<Exp4> exps_;
    std::vector<double> coeffs_;
    std::array<int, 4> maxdeg_{0, 0, 0, 0};
};

using RealPoly = Poly4<double>;
using RationalPoly = Poly4<Rational>;

}  // namespace acxlab
