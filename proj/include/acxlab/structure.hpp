#pragma once

#include "acxlab/errors.hpp"
#include "acxlab/linalg.hpp"
#include "acxlab/polynomial.hpp"

#include <memory>
#include <optional>
#include <utility>

namespace acxlab {

enum class StructureKind { standard, diagonal, general };

inline const char* structure_kind_name(StructureKind k) {
    switch (k) {
        case StructureKind::standard: return "standard";
        case StructureKind::diagonal: return "diagonal";
        case StructureKind::general: return "general";
    }
    return "general";
}

/// Field z -> J(z) of real 4x4 matrices with polynomial entries in
/// (x1, y1, x2, y2), plus an optional bound on a non-polynomial remainder.
template <class T>
class AlmostComplexStructure {
public:
    using P = Poly4<T>;
    using Entries = std::array<std::array<P, 4>, 4>;

    AlmostComplexStructure() : AlmostComplexStructure(standard_entries()) {}

    explicit AlmostComplexStructure(Entries e, Box domain = Box::unit(), double remainder_bound = 0.0)
        : entries_(std::move(e)), domain_(domain), remainder_bound_(remainder_bound) {
        kind_ = detect_kind();
        compile();
    }

    static AlmostComplexStructure standard(Box domain = Box::unit()) {
        return AlmostComplexStructure(standard_entries(), domain);
    }

    /// Blocks (a1 b1 / c1 -a1) and (a2 b2 / c2 -a2) on the diagonal.
    static AlmostComplexStructure diagonal(const P& a1, const P& b1, const P& c1, const P& a2, const P& b2, const P& c2,
                                           Box domain = Box::unit()) {
        Entries e;
        e[0][0] = a1;
        e[0][1] = b1;
        e[1][0] = c1;
        e[1][1] = -a1;
        e[2][2] = a2;
        e[2][3] = b2;
        e[3][2] = c2;
        e[3][3] = -a2;
        return AlmostComplexStructure(std::move(e), domain);
    }

    /// Diagonal structure with b = -(1 + a^2)/c, which makes J^2 = -Id hold
    /// identically. c must be a nonzero constant so that b stays polynomial.
    static AlmostComplexStructure diagonal_from_ac(const P& a1, const P& c1, const P& a2, const P& c2,
                                                   Box domain = Box::unit()) {
        auto b_of = [](const P& a, const P& c) {
            if (!c.is_constant() || c.is_zero()) {
                throw Error(ErrorKind::NonPolynomialCoefficient, "diagonal_from_ac needs a nonzero constant c");
            }
            T cinv = T(1) / c.coeff({0, 0, 0, 0});
            return (P(T(1)) + a * a) * T(-cinv);
        };
        return diagonal(a1, b_of(a1, c1), c1, a2, b_of(a2, c2), c2, domain);
    }

    const Entries& entries() const { return entries_; }
    const P& entry(int i, int j) const { return entries_[i][j]; }
    StructureKind kind() const { return kind_; }
    const Box& domain() const { return domain_; }
    double remainder_bound() const { return remainder_bound_; }
    bool is_standard() const { return kind_ == StructureKind::standard; }

    AlmostComplexStructure with_domain(const Box& b) const {
        AlmostComplexStructure r = *this;
        r.domain_ = b;
        return r;
    }

    Mat4 eval(const Vec4& x) const {
        Mat4 m;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m[i][j] = compiled_->value[i][j](x);
        return m;
    }

    Mat4T<T> eval_exact(const std::array<T, 4>& x) const {
        Mat4T<T> m;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m[i][j] = entries_[i][j].eval(x);
        return m;
    }

    /// Partial derivative of J with respect to real coordinate var.
    Mat4 derivative(int var, const Vec4& x) const {
        Mat4 m;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m[i][j] = compiled_->deriv[var][i][j](x);
        return m;
    }

    /// Directional derivative DJ[w] = sum_k w_k dJ/dx_k.
    Mat4 directional(const Vec4& x, const Vec4& w) const {
        Mat4 m{};
        for (int k = 0; k < 4; ++k) {
            if (w[k] == 0.0) continue;
            Mat4 d = derivative(k, x);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) m[i][j] += w[k] * d[i][j];
        }
        return m;
    }

    /// J - J_st as polynomial entries.
    Entries deviation() const {
        Entries e = entries_;
        Mat4T<T> st = standard_matrix<T>();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) e[i][j] -= P(st[i][j]);
        return e;
    }

    template <class D>
    AlmostComplexStructure<D> cast() const {
        typename AlmostComplexStructure<D>::Entries e;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) e[i][j] = entries_[i][j].template cast<D>();
        return AlmostComplexStructure<D>(std::move(e), domain_, remainder_bound_);
    }

    static Entries standard_entries() {
        Entries e;
        Mat4T<T> st = standard_matrix<T>();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) e[i][j] = P(st[i][j]);
        return e;
    }

private:
    struct Compiled {
        std::array<std::array<CompiledPoly, 4>, 4> value;
        std::array<std::array<std::array<CompiledPoly, 4>, 4>, 4> deriv;
    };

    StructureKind detect_kind() const {
        if (entries_ == standard_entries()) return StructureKind::standard;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if ((i < 2) != (j < 2) && !entries_[i][j].is_zero()) return StructureKind::general;
            }
        return StructureKind::diagonal;
    }

    void compile() {
        auto c = std::make_shared<Compiled>();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                c->value[i][j] = CompiledPoly(entries_[i][j]);
                for (int k = 0; k < 4; ++k) c->deriv[k][i][j] = CompiledPoly(entries_[i][j].derivative(k));
            }
        compiled_ = std::move(c);
    }

    Entries entries_;
    Box domain_;
    double remainder_bound_ = 0.0;
    StructureKind kind_ = StructureKind::general;
    std::shared_ptr<const Compiled> compiled_;
};

using RealStructure = AlmostComplexStructure<double>;
using RationalStructure = AlmostComplexStructure<Rational>;

template <class T>
using PolyMatrix = std::array<std::array<Poly4<T>, 4>, 4>;

template <class T>
PolyMatrix<T> poly_matmul(const PolyMatrix<T>& a, const PolyMatrix<T>& b) {
    PolyMatrix<T> r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Poly4<T> s;
            for (int k = 0; k < 4; ++k) {
                if (a[i][k].is_zero() || b[k][j].is_zero()) continue;
                s += a[i][k] * b[k][j];
            }
            r[i][j] = std::move(s);
        }
    return r;
}

struct ValidationReport {
    double max_deviation = 0.0;  // max over the grid of max-abs entry of J^2 + Id
    bool diagonal = false;
    bool normalized = false;     // J(z1, 0) = J_st identically
    std::optional<bool> exact_identity;  // symbolic J^2 = -Id check (rational coefficients only)
    std::size_t points = 0;
};

/// Checks J^2 = -Id on the grid and reads the diagonal / normalized flags.
template <class T>
ValidationReport validate_structure(const AlmostComplexStructure<T>& J, const SampleGrid& grid) {
    if (grid.points.empty()) throw Error(ErrorKind::EmptyGrid, "validation grid has no points");
    for (const auto& p : grid.points) {
        if (!J.domain().contains(p)) throw Error(ErrorKind::CoefficientDomainMismatch, "grid point outside evaluation domain");
    }
    ValidationReport rep;
    rep.points = grid.points.size();
    for (const auto& p : grid.points) {
        Mat4 m = J.eval(p);
        Mat4 sq = matmul(m, m);
        for (int i = 0; i < 4; ++i) sq[i][i] += 1.0;
        rep.max_deviation = std::max(rep.max_deviation, max_abs_entry(sq));
    }
    rep.diagonal = J.kind() != StructureKind::general;

    // J(z1, 0): substitute x2 = y2 = 0 and compare with J_st symbolically.
    using P = Poly4<T>;
    std::array<P, 4> slice{P::variable(0), P::variable(1), P(), P()};
    Mat4T<T> st = standard_matrix<T>();
    rep.normalized = true;
    for (int i = 0; i < 4 && rep.normalized; ++i)
        for (int j = 0; j < 4; ++j) {
            if (J.entry(i, j).compose(slice) != P(st[i][j])) {
                rep.normalized = false;
                break;
            }
        }

    if constexpr (is_exact_v<T>) {
        PolyMatrix<T> sq = poly_matmul(J.entries(), J.entries());
        bool ok = true;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                P expect = i == j ? P(T(-1)) : P();
                if (sq[i][j] != expect) ok = false;
            }
        rep.exact_identity = ok;
        if (ok) rep.max_deviation = 0.0;
    }
    return rep;
}

/// sup over the grid of max-abs entry of J - J_st.
template <class T>
double structure_deviation_sup(const AlmostComplexStructure<T>& J, const SampleGrid& grid) {
    Mat4 st = standard_matrix<double>();
    double r = 0.0;
    for (const auto& p : grid.points) {
        Mat4 m = J.eval(p);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r = std::max(r, std::abs(m[i][j] - st[i][j]));
    }
    return r;
}

/// max of the C^0 deviation and all first partial derivatives on the grid.
template <class T>
double structure_c1_norm(const AlmostComplexStructure<T>& J, const SampleGrid& grid) {
    double r = structure_deviation_sup(J, grid);
    for (const auto& p : grid.points) {
        for (int k = 0; k < 4; ++k) r = std::max(r, max_abs_entry(J.derivative(k, p)));
    }
    return r;
}

/// Polynomial map of R^4 with a polynomial inverse.
template <class T>
class Diffeomorphism {
public:
    using P = Poly4<T>;
    using Map = std::array<P, 4>;

    Diffeomorphism() : Diffeomorphism(identity_map(), identity_map()) {}
    Diffeomorphism(Map forward, Map inverse) : forward_(std::move(forward)), inverse_(std::move(inverse)) {}

    static Map identity_map() { return {P::variable(0), P::variable(1), P::variable(2), P::variable(3)}; }

    static Diffeomorphism identity() { return Diffeomorphism(); }

    /// x -> x + v.
    static Diffeomorphism translation(const std::array<T, 4>& v) {
        Map f = identity_map(), g = identity_map();
        for (int i = 0; i < 4; ++i) {
            f[i] += P(v[i]);
            g[i] -= P(v[i]);
        }
        return Diffeomorphism(f, g);
    }

    /// x -> A x.
    static Diffeomorphism linear(const Mat4T<T>& a) {
        Mat4T<T> ai = inverse4(a);
        Map f, g;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                f[i] += P::variable(j) * a[i][j];
                g[i] += P::variable(j) * ai[i][j];
            }
        return Diffeomorphism(f, g);
    }

    /// (z1, z2) -> (s1 z1, s2 z2) with real s1, s2.
    static Diffeomorphism dilation(const T& s1, const T& s2) {
        Mat4T<T> a = identity4<T>();
        a[0][0] = s1;
        a[1][1] = s1;
        a[2][2] = s2;
        a[3][3] = s2;
        return linear(a);
    }

    /// Holomorphic shear z2 -> z2 + sum_k c[k] z1^k (c[0], c[1] are allowed).
    static Diffeomorphism shear(const std::vector<Complex<T>>& c) {
        using CP = Poly4<Complex<T>>;
        CP z1 = CP::variable(0) + CP::variable(1) * Complex<T>(T(0), T(1));
        CP s;
        CP pw(Complex<T>(T(1)));
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (!is_zero(c[k])) s += pw * c[k];
            pw = pw * z1;
        }
        P re, im;
        for (const auto& [e, v] : s.terms()) {
            re.add_term(e, v.re);
            im.add_term(e, v.im);
        }
        Map f = identity_map(), g = identity_map();
        f[2] += re;
        f[3] += im;
        g[2] -= re;
        g[3] -= im;
        return Diffeomorphism(f, g);
    }

    const Map& forward() const { return forward_; }
    const Map& inverse() const { return inverse_; }

    Vec4 apply(const Vec4& x) const {
        Vec4 r;
        for (int i = 0; i < 4; ++i) r[i] = CompiledPoly(forward_[i])(x);
        return r;
    }

    Vec4 apply_inverse(const Vec4& x) const {
        Vec4 r;
        for (int i = 0; i < 4; ++i) r[i] = CompiledPoly(inverse_[i])(x);
        return r;
    }

    std::array<T, 4> apply_exact(const std::array<T, 4>& x) const {
        std::array<T, 4> r;
        for (int i = 0; i < 4; ++i) r[i] = forward_[i].eval(x);
        return r;
    }

    /// Jacobian entries d forward_i / d x_j.
    PolyMatrix<T> jacobian() const { return jacobian_of(forward_); }
    PolyMatrix<T> inverse_jacobian() const { return jacobian_of(inverse_); }

    Mat4 jacobian_at(const Vec4& x) const {
        PolyMatrix<T> j = jacobian();
        Mat4 m;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) m[a][b] = CompiledPoly(j[a][b])(x);
        return m;
    }

    Diffeomorphism inverted() const { return Diffeomorphism(inverse_, forward_); }

    /// max over the grid of |forward(inverse(q)) - q|.
    double roundtrip_error(const SampleGrid& g) const {
        double r = 0.0;
        for (const auto& q : g.points) r = std::max(r, norm4(sub4(apply(apply_inverse(q)), q)));
        return r;
    }

    static PolyMatrix<T> jacobian_of(const Map& m) {
        PolyMatrix<T> j;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) j[a][b] = m[a].derivative(b);
        return j;
    }

private:
    Map forward_;
    Map inverse_;
};

/// f o g.
template <class T>
Diffeomorphism<T> compose(const Diffeomorphism<T>& f, const Diffeomorphism<T>& g) {
    typename Diffeomorphism<T>::Map fw, inv;
    for (int i = 0; i < 4; ++i) {
        fw[i] = f.forward()[i].compose(g.forward());
        inv[i] = g.inverse()[i].compose(f.inverse());
    }
    return Diffeomorphism<T>(fw, inv);
}

/// Bounding box of f(box), from the image of a 5^4 sample (exact for affine f).
template <class T>
Box image_box(const Diffeomorphism<T>& f, const Box& b) {
    SampleGrid g = SampleGrid::box_grid(b, 5);
    Box r{{1e300, 1e300, 1e300, 1e300}, {-1e300, -1e300, -1e300, -1e300}};
    for (const auto& p : g.points) {
        Vec4 q = f.apply(p);
        for (int i = 0; i < 4; ++i) {
            r.lo[i] = std::min(r.lo[i], q[i]);
            r.hi[i] = std::max(r.hi[i], q[i]);
        }
    }
    return r;
}

/// f_*J(q) = Df(f^{-1} q) J(f^{-1} q) D(f^{-1})(q), exact on polynomial entries.
template <class T>
AlmostComplexStructure<T> pushforward(const AlmostComplexStructure<T>& J, const Diffeomorphism<T>& f) {
    Box target = image_box(f, J.domain());
    SampleGrid check = SampleGrid::box_grid(target, 3);
    if (f.roundtrip_error(check) > 1e-9 * (1.0 + norm4(target.hi) + norm4(target.lo))) {
        throw Error(ErrorKind::NonInvertibleOnDomain, "forward o inverse differs from the identity");
    }
    PolyMatrix<T> df = f.jacobian();
    PolyMatrix<T> a, jf;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            a[i][j] = df[i][j].compose(f.inverse());
            jf[i][j] = J.entry(i, j).compose(f.inverse());
        }
    PolyMatrix<T> dinv = f.inverse_jacobian();
    PolyMatrix<T> r = poly_matmul(poly_matmul(a, jf), dinv);
    return AlmostComplexStructure<T>(std::move(r), target, J.remainder_bound());
}

/// Result of normalize_chart: chart z = B^{-1}(q - p)/s and the pushed structure.
template <class T>
struct NormalizedChart {
    Diffeomorphism<T> chart;
    AlmostComplexStructure<T> structure;
    T scale;
    double sup_deviation = 0.0;
};

/// Chart sending p to 0 with z_*J(0) = J_st and sup over the unit box of
/// |z_*J - J_st| <= lambda0. The scale s is found by halving, then bisection.
template <class T>
NormalizedChart<T> normalize_chart(const AlmostComplexStructure<T>& J, const std::array<T, 4>& p, double lambda0,
                                   int halving_budget = 60) {
    if (!(lambda0 > 0.0)) throw Error(ErrorKind::CannotReachTolerance, "lambda0 must be positive");
    Mat4T<T> m = J.eval_exact(p);
    // Columns v1, J v1, v2, J v2 with v1 = e1 and v2 the axis vector giving the best-conditioned frame.
    auto column_frame = [&](int second) {
        Mat4T<T> b;
        std::array<T, 4> v1{T(1), T(0), T(0), T(0)};
        std::array<T, 4> v2{T(0), T(0), T(0), T(0)};
        v2[second] = T(1);
        std::array<T, 4> jv1 = matvec(m, v1), jv2 = matvec(m, v2);
        for (int i = 0; i < 4; ++i) {
            b[i][0] = v1[i];
            b[i][1] = jv1[i];
            b[i][2] = v2[i];
            b[i][3] = jv2[i];
        }
        return b;
    };
    Mat4T<T> frame;
    double best = -1.0;
    for (int second = 1; second < 4; ++second) {
        Mat4T<T> b = column_frame(second);
        double d = magnitude(det4(b));
        if (d > best + 1e-12) {
            best = d;
            frame = b;
        }
    }
    if (best <= 0.0) throw Error(ErrorKind::StructureInvalidAtPoint, "J(p) admits no complex frame");

    std::array<T, 4> neg_p;
    for (int i = 0; i < 4; ++i) neg_p[i] = -p[i];
    Diffeomorphism<T> shift = Diffeomorphism<T>::translation(neg_p);
    Diffeomorphism<T> unframe = Diffeomorphism<T>::linear(inverse4(frame));
    AlmostComplexStructure<T> framed = pushforward(pushforward(J, shift), unframe);

    SampleGrid unit = SampleGrid::box_grid(Box::unit(), 5);
    auto attempt = [&](const T& s) {
        Diffeomorphism<T> dil = Diffeomorphism<T>::dilation(T(1) / s, T(1) / s);
        AlmostComplexStructure<T> js = pushforward(framed, dil).with_domain(Box::unit());
        return std::make_pair(structure_deviation_sup(js, unit), std::make_pair(dil, js));
    };

    T s(1);
    auto res = attempt(s);
    if (res.first <= lambda0) {
        Diffeomorphism<T> chart = compose(res.second.first, compose(unframe, shift));
        return {chart, res.second.second, s, res.first};
    }
    T lo(0), hi = s;
    bool found = false;
    for (int k = 0; k < halving_budget; ++k) {
        hi = s;
        s = s / T(2);
        res = attempt(s);
        if (res.first <= lambda0) {
            lo = s;
            found = true;
            break;
        }
    }
    if (!found) throw Error(ErrorKind::CannotReachTolerance, "deviation stays above lambda0 after the dilation budget");
    for (int k = 0; k < 8; ++k) {
        T mid = (lo + hi) / T(2);
        auto r = attempt(mid);
        if (r.first <= lambda0) {
            lo = mid;
            res = r;
        } else {
            hi = mid;
        }
    }
    res = attempt(lo);
    Diffeomorphism<T> chart = compose(res.second.first, compose(unframe, shift));
    return {chart, res.second.second, lo, res.first};
}

/// Complexified tensor: J(dz) in the basis dz_l, dconj(z_l). A[j][k] multiplies
/// dz_k in the image of dz_j, B[j][k] multiplies dconj(z_k).
template <class T>
struct ComplexifiedStructure {
    using CP = Poly4<Complex<T>>;
    std::array<std::array<CP, 2>, 2> A;
    std::array<std::array<CP, 2>, 2> B;

    const CP& A11() const { return A[0][0]; }
    const CP& A22() const { return A[1][1]; }
    const CP& A12() const { return A[0][1]; }
    const CP& B11() const { return B[0][0]; }
    const CP& B22() const { return B[1][1]; }
    const CP& B12() const { return B[0][1]; }
};

/// Splits each real 2x2 block M into its complex-linear part p and
/// antilinear part q, with A[j][k] = p of block (k, j) and B[j][k] = conj(q).
template <class T>
ComplexifiedStructure<T> complexify(const AlmostComplexStructure<T>& J) {
    using CP = Poly4<Complex<T>>;
    auto lift = [](const Poly4<T>& p, const Complex<T>& s) {
        return p.template map_coeffs<Complex<T>>([&](const T& c) { return Complex<T>(c) * s; });
    };
    const Complex<T> half(T(1) / T(2), T(0));
    const Complex<T> ihalf(T(0), T(1) / T(2));
    auto conj_poly = [](const CP& p) {
        return p.template map_coeffs<Complex<T>>([](const Complex<T>& c) { return acxlab::conj(c); });
    };
    ComplexifiedStructure<T> out;
    for (int bj = 0; bj < 2; ++bj)
        for (int bk = 0; bk < 2; ++bk) {
            const auto& m11 = J.entry(2 * bj, 2 * bk);
            const auto& m12 = J.entry(2 * bj, 2 * bk + 1);
            const auto& m21 = J.entry(2 * bj + 1, 2 * bk);
            const auto& m22 = J.entry(2 * bj + 1, 2 * bk + 1);
            CP p = lift(m11 + m22, half) + lift(m21 - m12, ihalf);
            CP q = lift(m11 - m22, half) + lift(m21 + m12, ihalf);
            out.A[bk][bj] = p;
            out.B[bk][bj] = conj_poly(q);
        }
    return out;
}

/// Inverse of complexify.
template <class T>
AlmostComplexStructure<T> decomplexify(const ComplexifiedStructure<T>& c, Box domain = Box::unit()) {
    using P = Poly4<T>;
    auto re = [](const Poly4<Complex<T>>& p) { return p.template map_coeffs<T>([](const Complex<T>& v) { return v.re; }); };
    auto im = [](const Poly4<Complex<T>>& p) { return p.template map_coeffs<T>([](const Complex<T>& v) { return v.im; }); };
    typename AlmostComplexStructure<T>::Entries e;
    for (int bj = 0; bj < 2; ++bj)
        for (int bk = 0; bk < 2; ++bk) {
            const auto& p = c.A[bk][bj];
            // B stores conj(q): Re q = Re B, Im q = -Im B.
            P req = re(c.B[bk][bj]);
            P imq = -im(c.B[bk][bj]);
            e[2 * bj][2 * bk] = re(p) + req;
            e[2 * bj + 1][2 * bk + 1] = re(p) - req;
            e[2 * bj + 1][2 * bk] = im(p) + imq;
            e[2 * bj][2 * bk + 1] = imq - im(p);
        }
    return AlmostComplexStructure<T>(std::move(e), domain);
}

}  // namespace acxlab
