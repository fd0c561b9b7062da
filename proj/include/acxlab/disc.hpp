#pragma once

#include "acxlab/errors.hpp"
#include "acxlab/hermitian.hpp"
#include "acxlab/levi.hpp"
#include "acxlab/series.hpp"
#include "acxlab/structure.hpp"

#include <cmath>
#include <limits>

namespace acxlab {

struct DiscSpec {
    Vec4 center{};
    std::vector<Vec4> jet;  // jet[k] = d^k u / dx^k (0); jet[0] == center
    double radius_scale = 1.0;  // jet[k] is used as r^k jet[k] for k >= 1
    int grid_n = 129;
    double tol = 1e-8;
    int max_iterations = 50;
    int series_order = 24;
    int monitor_grid_n = 33;
    double smallness_budget = 0.25;
};

/// Pseudoholomorphic disc as a truncated series in (zeta, conj zeta) with
/// complex coordinates w1 = x1 + i y1, w2 = x2 + i y2.
struct Disc {
    BiSeries<double> w1;
    BiSeries<double> w2;
    double residual = 0.0;   // max over the grid of |u_y - J(u) u_x|
    int iterations = 0;
    int grid_n = 129;
    std::vector<double> residual_history;

    CPoint eval(std::complex<double> z) const { return {w1.eval(z), w2.eval(z)}; }
    Vec4 eval_real(std::complex<double> z) const { return to_real_point(eval(z)); }

    /// d u / d x (zeta) as a real vector.
    Vec4 dx(std::complex<double> z) const {
        return to_real_point({w1.d_zeta().eval(z) + w1.d_zetabar().eval(z), w2.d_zeta().eval(z) + w2.d_zetabar().eval(z)});
    }
};

/// Masked square grid of the closed unit disc.
inline std::vector<std::complex<double>> disc_grid(int n) {
    std::vector<std::complex<double>> pts;
    if (n < 2) {
        pts.emplace_back(0.0, 0.0);
        return pts;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = -1.0 + 2.0 * i / (n - 1), y = -1.0 + 2.0 * j / (n - 1);
            if (x * x + y * y <= 1.0 + 1e-12) pts.emplace_back(x, y);
        }
    return pts;
}

/// max over the grid of |u_y - J(u) u_x|.
template <class T>
double disc_residual(const AlmostComplexStructure<T>& J, const BiSeries<double>& w1, const BiSeries<double>& w2,
                     int grid_n) {
    BiSeries<double> d1 = w1.d_zeta(), e1 = w1.d_zetabar(), d2 = w2.d_zeta(), e2 = w2.d_zetabar();
    const std::complex<double> I(0.0, 1.0);
    double worst = 0.0;
    for (auto z : disc_grid(grid_n)) {
        std::complex<double> a1 = d1.eval(z), b1 = e1.eval(z), a2 = d2.eval(z), b2 = e2.eval(z);
        Vec4 ux = to_real_point({a1 + b1, a2 + b2});
        Vec4 uy = to_real_point({I * (a1 - b1), I * (a2 - b2)});
        Mat4 j = J.eval(to_real_point({w1.eval(z), w2.eval(z)}));
        Vec4 jux = matvec(j, ux);
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(uy[i] - jux[i]));
    }
    return worst;
}

namespace detail {

inline Complex<double> to_c(std::complex<double> z) { return Complex<double>(z.real(), z.imag()); }

}  // namespace detail

/// Solves u_y = J(u) u_x on the unit disc with the prescribed x-jet at 0 by
/// the fixed point u = h + T[(i/2) Q(u)], Q = (J(u) - J_st) u_x in complex form,
/// T the right inverse of d/dconj(zeta) on series, h holomorphic and fixed by the jet.
template <class T>
Disc solve(const AlmostComplexStructure<T>& J, const DiscSpec& spec) {
    if (spec.jet.size() < 2) throw Error(ErrorKind::JetTooShort, "disc jet needs the point and a direction");
    const int N = spec.series_order;
    const int K = int(spec.jet.size()) - 1;
    if (K > N) throw Error(ErrorKind::JetTooShort, "jet longer than the series order");

    // Target Taylor sums jet_k r^k / k! in complex coordinates.
    std::vector<std::complex<double>> t1(K + 1), t2(K + 1);
    double reach = 0.0, fact = 1.0, rk = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) {
            fact *= k;
            rk *= spec.radius_scale;
        }
        CPoint c = to_complex_point(spec.jet[k]);
        t1[k] = c[0] * (rk / fact);
        t2[k] = c[1] * (rk / fact);
        if (k > 0) reach += std::abs(t1[k]) + std::abs(t2[k]);
    }

    if (!J.is_standard()) {
        Box box = Box::centered(spec.jet[0], 1.25 * reach + 1e-9);
        double c1 = structure_c1_norm(J, SampleGrid::box_grid(box, 5));
        if (c1 > spec.smallness_budget) {
            throw Error(ErrorKind::PreconditionSmallness,
                        "C1 norm of J - J_st on the disc box is " + std::to_string(c1));
        }
    }

    auto holomorphic_fix = [&](BiSeries<double>& w, const std::vector<std::complex<double>>& target) {
        for (int k = 0; k <= N; ++k) {
            std::complex<double> rest(0.0);
            for (int b = 1; b <= k; ++b) rest += std::complex<double>(w.at(k - b, b).re, w.at(k - b, b).im);
            std::complex<double> want = k <= K ? target[k] : std::complex<double>(0.0);
            w.at(k, 0) = detail::to_c(want - rest);
        }
    };

    Disc d;
    d.grid_n = spec.grid_n;
    d.w1 = BiSeries<double>(N);
    d.w2 = BiSeries<double>(N);
    holomorphic_fix(d.w1, t1);
    holomorphic_fix(d.w2, t2);

    if (J.is_standard()) {
        d.iterations = 1;
        d.residual = disc_residual(J, d.w1, d.w2, spec.grid_n);
        d.residual_history.push_back(d.residual);
        return d;
    }

    auto dev = J.deviation();
    const Complex<double> half_i(0.0, 0.5);
    const Complex<double> I(0.0, 1.0);
    int stalled = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= spec.max_iterations; ++it) {
        auto X = real_coordinates(d.w1, d.w2);
        BiSeries<double> s1 = d.w1.d_zeta() + d.w1.d_zetabar();
        BiSeries<double> s2 = d.w2.d_zeta() + d.w2.d_zetabar();
        auto UX = real_coordinates(s1, s2);
        std::array<BiSeries<double>, 4> q{BiSeries<double>(N), BiSeries<double>(N), BiSeries<double>(N),
                                          BiSeries<double>(N)};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                if (dev[i][k].is_zero()) continue;
                q[i] += compose_series(dev[i][k], X, N) * UX[k];
            }
        BiSeries<double> f1 = (q[0] + q[1] * I) * half_i;
        BiSeries<double> f2 = (q[2] + q[3] * I) * half_i;
        BiSeries<double> n1 = f1.antiderivative_zetabar();
        BiSeries<double> n2 = f2.antiderivative_zetabar();
        holomorphic_fix(n1, t1);
        holomorphic_fix(n2, t2);
        double upd = std::max((n1 - d.w1).max_abs(), (n2 - d.w2).max_abs());
        d.w1 = std::move(n1);
        d.w2 = std::move(n2);
        d.iterations = it;
        double res = disc_residual(J, d.w1, d.w2, spec.monitor_grid_n);
        d.residual_history.push_back(res);
        if (upd <= 1e-16 * (1.0 + d.w1.max_abs() + d.w2.max_abs()) || res <= 1e-3 * spec.tol) break;
        if (res >= prev) {
            if (++stalled >= 5 && res > spec.tol) throw Error(ErrorKind::SolverDiverged, "residual stopped decreasing");
        } else {
            stalled = 0;
        }
        prev = std::min(prev, res);
    }
    d.residual = disc_residual(J, d.w1, d.w2, spec.grid_n);
    if (!(d.residual <= spec.tol)) {
        throw Error(ErrorKind::SolverDiverged, "final residual " + std::to_string(d.residual) + " above tolerance");
    }
    return d;
}

/// Disc spec from a point and a direction (optionally higher x-derivatives).
inline DiscSpec disc_spec(const Vec4& p, const Vec4& v, std::vector<Vec4> higher = {}) {
    DiscSpec s;
    s.center = p;
    s.jet = {p, v};
    for (auto& h : higher) s.jet.push_back(h);
    return s;
}

struct ContactOrder {
    int order = -1;         // -1: composition vanishes up to the cap ("> cap")
    int multiplicity = -1;  // vanishing order of u - u(0)
    int cap = 0;
    bool exceeds_cap() const { return order < 0; }
};

/// Order of the first nonzero term of rho o u and the multiplicity of u at 0.
template <class T, class U>
ContactOrder contact_order(const HermitianPolynomial<U>& rho, const BiSeries<T>& w1, const BiSeries<T>& w2, int cap,
                           double eps = 1e-9) {
    if (cap > w1.order()) throw Error(ErrorKind::JetTooShort, "series order below the requested cap");
    BiSeries<T> c = compose_hermitian(rho, w1, w2);
    const double e = is_exact_v<T> ? -1.0 : eps;
    ContactOrder r;
    r.cap = cap;
    int lo = c.lowest_degree(e);
    r.order = (lo >= 0 && lo <= cap) ? lo : -1;
    BiSeries<T> v1 = w1, v2 = w2;
    v1.at(0, 0) = Complex<T>(T(0));
    v2.at(0, 0) = Complex<T>(T(0));
    int m1 = v1.lowest_degree(e), m2 = v2.lowest_degree(e);
    if (m1 < 0) r.multiplicity = m2;
    else if (m2 < 0) r.multiplicity = m1;
    else r.multiplicity = std::min(m1, m2);
    return r;
}

template <class U>
ContactOrder contact_order(const HermitianPolynomial<U>& rho, const Disc& d, int cap, double eps = 1e-9) {
    return contact_order(rho, d.w1, d.w2, cap, eps);
}

struct DiscLeviResult {
    double value = 0.0;           // Richardson-extrapolated Laplacian / r^2
    std::array<double, 3> stencil{};  // plain 5-point values at h, h/2, h/4 (divided by r^2)
    double observed_order = 0.0;  // log2 of successive difference ratio; +inf when at round-off
    double disc_residual = 0.0;
    int iterations = 0;
};

struct DiscLeviOptions {
    double h = 1.0 / 64.0;
    double radius = 0.25;
    DiscSpec base{};
};

/// Laplacian at 0 of rho o u for the J-disc with u(0) = p, u_x(0) = r v,
/// by the 5-point stencil with Richardson extrapolation, divided by r^2.
template <class T>
DiscLeviResult levi_via_disc(const ScalarField& rho, const AlmostComplexStructure<T>& J, const Vec4& p, const Vec4& v,
                             const DiscLeviOptions& opt = {}) {
    DiscSpec spec = opt.base;
    spec.center = p;
    spec.jet = {p, v};
    spec.radius_scale = opt.radius;
    Disc d = solve(J, spec);
    auto f = [&](double x, double y) { return rho(d.eval_real({x, y})).value; };
    auto stencil = [&](double h) {
        return (f(h, 0) + f(-h, 0) + f(0, h) + f(0, -h) - 4.0 * f(0, 0)) / (h * h);
    };
    const double r2 = opt.radius * opt.radius;
    DiscLeviResult res;
    res.stencil = {stencil(opt.h) / r2, stencil(opt.h / 2) / r2, stencil(opt.h / 4) / r2};
    res.value = (4.0 * res.stencil[1] - res.stencil[0]) / 3.0;
    double d1 = std::abs(res.stencil[0] - res.stencil[1]), d2 = std::abs(res.stencil[1] - res.stencil[2]);
    double floor = 1e-9 * (1.0 + std::abs(res.value));
    res.observed_order = (d1 <= floor || d2 <= floor) ? std::numeric_limits<double>::infinity() : std::log2(d1 / d2);
    res.disc_residual = d.residual;
    res.iterations = d.iterations;
    return res;
}

}  // namespace acxlab
