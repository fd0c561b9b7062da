#pragma once

#include "acxlab/errors.hpp"
#include "acxlab/scalar.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace acxlab {

using Vec4 = std::array<double, 4>;

template <class T>
using Mat4T = std::array<std::array<T, 4>, 4>;
using Mat4 = Mat4T<double>;

template <class T>
Mat4T<T> identity4() {
    Mat4T<T> m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = T(i == j ? 1 : 0);
    return m;
}

/// Matrix of the standard structure: each 2x2 block sends e_x to e_y.
template <class T>
Mat4T<T> standard_matrix() {
    Mat4T<T> m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = T(0);
    m[1][0] = T(1);
    m[0][1] = T(-1);
    m[3][2] = T(1);
    m[2][3] = T(-1);
    return m;
}

template <class T>
Mat4T<T> matmul(const Mat4T<T>& a, const Mat4T<T>& b) {
    Mat4T<T> r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            T s(0);
            for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
            r[i][j] = s;
        }
    return r;
}

template <class T>
std::array<T, 4> matvec(const Mat4T<T>& a, const std::array<T, 4>& v) {
    std::array<T, 4> r;
    for (int i = 0; i < 4; ++i) {
        T s(0);
        for (int k = 0; k < 4; ++k) s += a[i][k] * v[k];
        r[i] = s;
    }
    return r;
}

inline double dot4(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }
inline double norm4(const Vec4& a) { return std::sqrt(dot4(a, a)); }

inline Vec4 add4(const Vec4& a, const Vec4& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }
inline Vec4 sub4(const Vec4& a, const Vec4& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }
inline Vec4 scale4(const Vec4& a, double s) { return {a[0] * s, a[1] * s, a[2] * s, a[3] * s}; }

/// Gauss-Jordan inverse; works exactly over rationals. Throws on singular input.
template <class T>
Mat4T<T> inverse4(const Mat4T<T>& m) {
    Mat4T<T> a = m;
    Mat4T<T> inv = identity4<T>();
    for (int col = 0; col < 4; ++col) {
        int piv = -1;
        double best = 0.0;
        for (int r = col; r < 4; ++r) {
            double mag = magnitude(a[r][col]);
            if (mag > best) {
                best = mag;
                piv = r;
            }
        }
        if (piv < 0 || best == 0.0) throw Error(ErrorKind::NonInvertibleOnDomain, "singular 4x4 matrix");
        std::swap(a[col], a[piv]);
        std::swap(inv[col], inv[piv]);
        T d = a[col][col];
        for (int j = 0; j < 4; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            T f = a[r][col];
            if (is_zero(f)) continue;
            for (int j = 0; j < 4; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

template <class T>
T det4(const Mat4T<T>& m) {
    Mat4T<T> a = m;
    T det(1);
    for (int col = 0; col < 4; ++col) {
        int piv = -1;
        for (int r = col; r < 4; ++r) {
            if (!is_zero(a[r][col])) {
                piv = r;
                break;
            }
        }
        if (piv < 0) return T(0);
        if (piv != col) {
            std::swap(a[col], a[piv]);
            det = -det;
        }
        det *= a[col][col];
        for (int r = col + 1; r < 4; ++r) {
            T f = a[r][col] / a[col][col];
            for (int j = col; j < 4; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return det;
}

inline double max_abs_entry(const Mat4& m) {
    double r = 0.0;
    for (const auto& row : m)
        for (double v : row) r = std::max(r, std::abs(v));
    return r;
}

/// Axis-aligned box in R^4.
struct Box {
    Vec4 lo{-1.0, -1.0, -1.0, -1.0};
    Vec4 hi{1.0, 1.0, 1.0, 1.0};

    static Box unit() { return Box{}; }
    static Box centered(const Vec4& c, double radius) {
        return Box{{c[0] - radius, c[1] - radius, c[2] - radius, c[3] - radius},
                   {c[0] + radius, c[1] + radius, c[2] + radius, c[3] + radius}};
    }

    bool contains(const Vec4& p, double slack = 1e-12) const {
        for (int i = 0; i < 4; ++i) {
            if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
        }
        return true;
    }
};

/// Finite set of sample points.
struct SampleGrid {
    std::vector<Vec4> points;

    /// n points per axis (n >= 2 includes the faces; n == 1 is the center).
    static SampleGrid box_grid(const Box& b, int n) {
        SampleGrid g;
        if (n <= 0) return g;
        auto coord = [&](int axis, int i) {
            if (n == 1) return 0.5 * (b.lo[axis] + b.hi[axis]);
            return b.lo[axis] + (b.hi[axis] - b.lo[axis]) * i / double(n - 1);
        };
        g.points.reserve(std::size_t(n) * n * n * n);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    for (int e = 0; e < n; ++e) g.points.push_back({coord(0, a), coord(1, c), coord(2, d), coord(3, e)});
        return g;
    }
};

}  // namespace acxlab
