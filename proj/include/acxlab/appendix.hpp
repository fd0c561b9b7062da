#pragma once

#include "acxlab/polynomial.hpp"
#include "acxlab/scalar.hpp"

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace acxlab {

using IntMatrix = std::vector<std::vector<mpz_class>>;
using RationalMatrix = std::vector<std::vector<Rational>>;
using RationalVector = std::vector<Rational>;

/// Fraction-free (Bareiss) determinant of a square integer matrix.
inline mpz_class bareiss_determinant(IntMatrix a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && a[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(a[k], a[swap]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a[i][j] = t;
            }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

inline RationalMatrix to_rational(const IntMatrix& a) {
    RationalMatrix r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (const auto& v : a[i]) r[i].push_back(Rational(v));
    return r;
}

/// Reduced row echelon form over Q; returns the pivot columns.
inline std::vector<std::size_t> row_reduce(RationalMatrix& a) {
    std::vector<std::size_t> pivots;
    if (a.empty()) return pivots;
    const std::size_t rows = a.size(), cols = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        Rational inv = 1 / a[r][c];
        for (auto& x : a[r]) x *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(RationalMatrix a) { return row_reduce(a).size(); }

/// Basis of {x : A x = 0}.
inline std::vector<RationalVector> null_space(RationalMatrix a) {
    std::vector<RationalVector> basis;
    if (a.empty()) return basis;
    const std::size_t cols = a[0].size();
    auto piv = row_reduce(a);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : piv) is_pivot[c] = true;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        RationalVector v(cols, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -a[i][f];
        basis.push_back(v);
    }
    return basis;
}

inline RationalMatrix transpose(const RationalMatrix& a) {
    if (a.empty()) return {};
    RationalMatrix t(a[0].size(), RationalVector(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Squared distance from y to the column space of A, exact: the squared norm of the
/// projection of y onto the (Gram-Schmidt orthogonalized) left null space.
inline Rational least_squares_defect_squared(const RationalMatrix& a, const RationalVector& y) {
    auto left = null_space(transpose(a));
    std::vector<RationalVector> ortho;
    for (auto v : left) {
        for (const auto& q : ortho) {
            Rational f = dot(v, q) / dot(q, q);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= f * q[i];
        }
        ortho.push_back(v);
    }
    Rational s = 0;
    for (const auto& q : ortho) {
        Rational d = dot(q, y);
        s += d * d / dot(q, q);
    }
    return s;
}

/// The printed cubic-cancellation matrix acting on (r1..r4, s1..s4).
inline IntMatrix appendix_matrix() {
    return {{3, 0, 2, 0, 0, 1, 0, 0},  {3, 0, 0, 0, 0, -1, 0, 0}, {0, 1, 0, 0, 3, 0, 0, 0},
            {0, 2, 0, 3, 0, 0, -1, 0}, {0, 1, 0, 0, -3, 0, -2, 0}, {0, 0, 1, 0, 0, 0, 0, -3},
            {0, 0, 1, 0, 0, 2, 0, 3},  {0, 0, 0, 3, 0, 0, 1, 0}};
}

using RealPoly2 = RationalPoly;  // polynomials in x = variable 0, y = variable 1

/// First bracket: -y R_x - x R_y - x S_x + y S_y.
inline RealPoly2 first_bracket(const RealPoly2& R, const RealPoly2& S) {
    RealPoly2 x = RealPoly2::variable(0), y = RealPoly2::variable(1);
    return -(y * R.derivative(0)) - x * R.derivative(1) - x * S.derivative(0) + y * S.derivative(1);
}

/// Second bracket: x R_x - y R_y - y S_x - x S_y.
inline RealPoly2 second_bracket(const RealPoly2& R, const RealPoly2& S) {
    RealPoly2 x = RealPoly2::variable(0), y = RealPoly2::variable(1);
    return x * R.derivative(0) - y * R.derivative(1) - y * S.derivative(0) - x * S.derivative(1);
}

/// Homogeneous cubic c0 x^3 + c1 x^2 y + c2 x y^2 + c3 y^3.
inline RealPoly2 cubic(const std::array<Rational, 4>& c) {
    RealPoly2 x = RealPoly2::variable(0), y = RealPoly2::variable(1);
    return x * x * x * c[0] + x * x * y * c[1] + x * y * y * c[2] + y * y * y * c[3];
}

/// Coefficients (x^3, x^2 y, x y^2, y^3) of a polynomial's cubic part.
inline std::array<Rational, 4> cubic_coefficients(const RealPoly2& p) {
    std::array<Rational, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = p.coeff({3 - i, i, 0, 0});
    return c;
}

/// Rows of the cubic system as derived from the brackets: row k < 4 is the
/// x^(3-k) y^k coefficient of the first bracket, row 4 + k that of the second.
inline RationalMatrix derived_cubic_system() {
    RationalMatrix rows(8, RationalVector(8, Rational(0)));
    for (int u = 0; u < 8; ++u) {
        std::array<Rational, 4> e{};
        e[u % 4] = 1;
        RealPoly2 R = u < 4 ? cubic(e) : RealPoly2();
        RealPoly2 S = u < 4 ? RealPoly2() : cubic(e);
        auto b1 = cubic_coefficients(first_bracket(R, S));
        auto b2 = cubic_coefficients(second_bracket(R, S));
        for (int k = 0; k < 4; ++k) {
            rows[k][u] = b1[k];
            rows[4 + k][u] = b2[k];
        }
    }
    return rows;
}

/// Printed row i equals sign * derived row index (checked in the tests).
struct RowMapEntry {
    int derived_row;
    int sign;
};
inline std::array<RowMapEntry, 8> appendix_row_map() {
    return {{{1, -1}, {4, 1}, {0, -1}, {2, -1}, {5, 1}, {3, -1}, {6, -1}, {7, -1}}};
}

struct AppendixProblem {
    Rational alpha{0};
    Rational beta{0};
    std::array<Rational, 4> h3{};        // H3 coefficients (x^3, x^2 y, x y^2, y^3)
    std::array<Rational, 4> h3prime{};
    IntMatrix system_matrix = appendix_matrix();
    std::optional<RationalVector> rhs;   // overrides the Y derived from (H3, H3')
};

/// Cancelling H3 and H3' needs bracket cubic parts equal to (-H3, -H3'); Y follows the row map.
inline RationalVector appendix_rhs(const std::array<Rational, 4>& h3, const std::array<Rational, 4>& h3prime) {
    RationalVector target(8);
    for (int k = 0; k < 4; ++k) {
        target[k] = -h3[k];
        target[4 + k] = -h3prime[k];
    }
    RationalVector y(8);
    auto map = appendix_row_map();
    for (int i = 0; i < 8; ++i) y[i] = map[i].sign * target[map[i].derived_row];
    return y;
}

struct AppendixResult {
    mpz_class det;
    std::size_t rank = 0;
    std::size_t augmented_rank = 0;
    bool solvable = false;
    Rational residual_squared{0};
    double residual = 0.0;
    RationalVector rhs;
    std::vector<RationalVector> left_null_space;
    std::optional<RationalVector> solution;  // particular solution when solvable
};

inline AppendixResult appendix_system(const AppendixProblem& prob) {
    AppendixResult r;
    r.rhs = prob.rhs ? *prob.rhs : appendix_rhs(prob.h3, prob.h3prime);
    r.det = bareiss_determinant(prob.system_matrix);
    RationalMatrix a = to_rational(prob.system_matrix);
    r.rank = rank(a);
    RationalMatrix aug = a;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(r.rhs[i]);
    r.augmented_rank = rank(aug);
    r.solvable = r.augmented_rank == r.rank;
    r.left_null_space = null_space(transpose(a));
    r.residual_squared = least_squares_defect_squared(a, r.rhs);
    r.residual = std::sqrt(to_double(r.residual_squared));
    if (r.solvable) {
        auto piv = row_reduce(aug);
        RationalVector x(a[0].size(), Rational(0));
        for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug[i].back();
        r.solution = x;
    }
    return r;
}

struct QuadraticFamily {
    RealPoly2 R;
    RealPoly2 S;
};

/// All quadratic (R, S) killing the quadratic parts of both brackets:
/// R = r5 x^2 - 2 s5 x y - r5 y^2, S = s5 x^2 + 2 r5 x y - s5 y^2.
inline QuadraticFamily quadratic_cancellation(const Rational& r5, const Rational& s5) {
    RealPoly2 x = RealPoly2::variable(0), y = RealPoly2::variable(1);
    return {x * x * r5 - x * y * Rational(2 * s5) - y * y * r5, x * x * s5 + x * y * Rational(2 * r5) - y * y * s5};
}

/// The family as displayed in print, with S = s5 x^2 + 2 s5 x y - s5 y^2 (kept for comparison).
inline QuadraticFamily displayed_quadratic_family(const Rational& r5, const Rational& s5) {
    RealPoly2 x = RealPoly2::variable(0), y = RealPoly2::variable(1);
    return {x * x * r5 - x * y * Rational(2 * s5) - y * y * r5, x * x * s5 + x * y * Rational(2 * s5) - y * y * s5};
}

}  // namespace acxlab
