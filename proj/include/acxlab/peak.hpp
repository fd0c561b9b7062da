#pragma once

#include "acxlab/errors.hpp"
#include "acxlab/hermitian.hpp"
#include "acxlab/jet.hpp"
#include "acxlab/levi.hpp"
#include "acxlab/structure.hpp"
#include "acxlab/type.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace acxlab {

/// Angular field r^n G(theta) of a pure-z1 slice of degree n.
template <class T>
AngularField slice_angular(const HomogeneousSlice<T>& h) {
    const int n = h.degree;
    std::vector<std::complex<double>> modes(std::size_t(n + 1), 0.0);
    for (const auto& [e, c] : h.poly.raw().terms()) {
        int k = e[0] - e[1];
        if (k >= 0) modes[std::size_t(k)] = std::complex<double>(to_double(c.re), to_double(c.im));
    }
    return AngularField(n, std::move(modes));
}

/// 2 pi periodic g(theta) = a0 + sum_k a_k cos k theta + b_k sin k theta.
struct FSFunction {
    int degree = 2;  // exponent n of r^n g(theta), n = 2m
    double delta = 0.5;
    double a0 = -1.5;
    std::vector<double> a;
    std::vector<double> b;

    double value(double t) const {
        double s = a0;
        for (std::size_t k = 1; k <= a.size(); ++k) s += a[k - 1] * std::cos(k * t) + b[k - 1] * std::sin(k * t);
        return s;
    }
    double d1(double t) const {
        double s = 0.0;
        for (std::size_t k = 1; k <= a.size(); ++k) s += double(k) * (-a[k - 1] * std::sin(k * t) + b[k - 1] * std::cos(k * t));
        return s;
    }
    double d2(double t) const {
        double s = 0.0;
        for (std::size_t k = 1; k <= a.size(); ++k) s -= double(k * k) * (a[k - 1] * std::cos(k * t) + b[k - 1] * std::sin(k * t));
        return s;
    }
    AngularField field() const { return AngularField::from_fourier(degree, a0, a, b); }
};

/// Margins of the four conditions on the theta grid, each divided by its right-hand side
/// (condition holds with a 10% margin when the entry is >= 0).
struct FSCheck {
    double range = 0.0;     // -1.9 <= g <= -1.1
    double norm = 0.0;      // C2 grid norm <= 0.9 / delta
    double max_lap = 0.0;   // max(Delta H, Delta(|H*| g r^n)) >= 1.1 delta |H*| r^(n-2)
    double sum_lap = 0.0;   // Delta(H + delta |H*| g r^n) >= 1.1 delta^2 |H*| r^(n-2)
    double c2_norm = 0.0;
    bool ok() const { return range >= 0.0 && norm >= 0.0 && max_lap >= 0.0 && sum_lap >= 0.0; }
    double worst() const { return std::min(std::min(range, norm), std::min(max_lap, sum_lap)); }
};

constexpr double kFSMargin = 0.1;

namespace detail {

struct FSGrid {
    std::vector<double> theta;
    std::vector<double> lap_h;  // normalized Laplacian of H on the grid
};

inline FSGrid fs_grid(const AngularField& h, int points) {
    FSGrid g;
    for (int i = 0; i < points; ++i) {
        double t = 2.0 * std::numbers::pi * i / points;
        g.theta.push_back(t);
        g.lap_h.push_back(h.normalized_laplacian(t));
    }
    return g;
}

inline FSCheck fs_check_on(const FSGrid& grid, double hstar, const FSFunction& f) {
    FSCheck c;
    const double n2 = double(f.degree) * f.degree;
    double gmin = 1e300, gmax = -1e300, cmax = 0.0, m3 = 1e300, m4 = 1e300;
    for (std::size_t i = 0; i < grid.theta.size(); ++i) {
        double t = grid.theta[i];
        double g = f.value(t), g1 = f.d1(t), g2 = f.d2(t);
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
        cmax = std::max({cmax, std::abs(g), std::abs(g1), std::abs(g2)});
        double lap_g = hstar * (n2 * g + g2);
        double rhs3 = (1.0 + kFSMargin) * f.delta * hstar;
        double rhs4 = (1.0 + kFSMargin) * f.delta * f.delta * hstar;
        m3 = std::min(m3, (std::max(grid.lap_h[i], lap_g) - rhs3) / rhs3);
        m4 = std::min(m4, (grid.lap_h[i] + f.delta * lap_g - rhs4) / rhs4);
    }
    c.range = std::min(-(1.0 + kFSMargin) - gmax, gmin + (2.0 - kFSMargin));
    c.c2_norm = cmax;
    c.norm = ((1.0 - kFSMargin) / f.delta - cmax) * f.delta;
    c.max_lap = m3;
    c.sum_lap = m4;
    return c;
}

}  // namespace detail

template <class T>
FSCheck check_fs_function(const HomogeneousSlice<T>& h, const FSFunction& f, int grid = 4096) {
    double hstar = slice_norm(nonharmonic_part(h));
    return detail::fs_check_on(detail::fs_grid(slice_angular(h), grid), hstar, f);
}

struct FSSearchOptions {
    int delta_halvings = 20;
    int ansatz_steps = 200;
    int search_grid = 512;
    int verify_grid = 4096;
};

/// delta halves from 0.5; for each delta a coordinate search on the Fourier
/// coefficients (degree <= 2n) maximizes the worst normalized margin.
template <class T>
FSFunction find_fs_function(const HomogeneousSlice<T>& h, const FSSearchOptions& opt = {}) {
    if (nonharmonic_part(h).poly.is_zero()) throw Error(ErrorKind::TaskError, "slice has no nonharmonic part");
    AngularField hf = slice_angular(h);
    for (int i = 0; i < 720; ++i) {
        if (hf.normalized_laplacian(2.0 * std::numbers::pi * i / 720) < -1e-12) {
            throw Error(ErrorKind::TaskError, "slice is not subharmonic on the circle grid");
        }
    }
    const double hstar = slice_norm(nonharmonic_part(h));
    const detail::FSGrid coarse = detail::fs_grid(hf, opt.search_grid);
    const detail::FSGrid fine = detail::fs_grid(hf, opt.verify_grid);
    const int modes = 2 * h.degree;
    double delta = 0.5;
    for (int halving = 0; halving <= opt.delta_halvings; ++halving, delta *= 0.5) {
        FSFunction f;
        f.degree = h.degree;
        f.delta = delta;
        f.a.assign(std::size_t(modes), 0.0);
        f.b.assign(std::size_t(modes), 0.0);
        if (detail::fs_check_on(fine, hstar, f).ok()) return f;
        double best = detail::fs_check_on(coarse, hstar, f).worst();
        double step = 0.1;
        for (int it = 0; it < opt.ansatz_steps && step > 1e-6; ++it) {
            bool improved = false;
            for (int c = 0; c <= 2 * modes; ++c) {
                double* coef = c == 0 ? &f.a0 : (c <= modes ? &f.a[std::size_t(c - 1)] : &f.b[std::size_t(c - modes - 1)]);
                for (double s : {step, -step}) {
                    *coef += s;
                    double w = detail::fs_check_on(coarse, hstar, f).worst();
                    if (w > best) {
                        best = w;
                        improved = true;
                        break;
                    }
                    *coef -= s;
                }
            }
            if (best >= 0.0 && detail::fs_check_on(fine, hstar, f).ok()) return f;
            if (!improved) step *= 0.5;
        }
    }
    throw Error(ErrorKind::SearchExhausted, "no FS function within the delta / ansatz budget");
}

/// phi = Re z2 + 2L (Re z2)^2 - L (Im z2)^2 + P + Htilde + C |z1|^2 |z2|^2,
/// P = H_2m + delta |H*| g(theta) |z1|^2m.
struct PeakFunction {
    int m = 1;
    Rational L{1};
    Rational C{1};
    double radius = 0.5;
    FSFunction fs;
    double hstar_norm = 1.0;
    HomogeneousSlice<Rational> h2m;
    std::vector<Complex<Rational>> rho_k;

    /// Polynomial part: everything except the angular term of P.
    RationalPoly polynomial_part() const {
        using P = RationalPoly;
        P x1 = P::variable(0), y1 = P::variable(1), x2 = P::variable(2), y2 = P::variable(3);
        P r = x2 + x2 * x2 * Rational(2 * L) - y2 * y2 * L + (x1 * x1 + y1 * y1) * (x2 * x2 + y2 * y2) * C;
        RationalHermitian ht = h2m.poly;
        for (std::size_t k = 1; k <= rho_k.size(); ++k) {
            ht = ht + RationalHermitian::real_part({int(k), 0, 1, 0}, rho_k[k - 1]);
        }
        return r + ht.to_real();
    }

    /// delta |H*| g(theta) |z1|^2m.
    AngularField angular_part() const {
        FSFunction scaled = fs;
        double s = fs.delta * hstar_norm;
        scaled.a0 *= s;
        for (auto& x : scaled.a) x *= s;
        for (auto& x : scaled.b) x *= s;
        return scaled.field();
    }

    ScalarField field() const {
        auto poly = std::make_shared<PolyField>(polynomial_part());
        auto ang = std::make_shared<AngularField>(angular_part());
        return [poly, ang](const Vec4& x) { return (*poly)(x) + (*ang)(x); };
    }

    double value(const Vec4& x) const { return field()(x).value; }
};

/// Points of the closed domain {rho <= 0} with eps <= |z| <= r: a deterministic axis
/// spine, then random points half on the boundary (root in x2 by bisection), half inside.
inline std::vector<Vec4> sample_closure(const PolyField& rho, double r, int count, std::uint64_t seed, double eps = 1e-3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.0, 1.0);
    std::vector<Vec4> pts;
    auto boundary_x2 = [&](double x1, double y1, double y2, double& x2) {
        auto f = [&](double t) { return rho.value({x1, y1, t, y2}); };
        double lo = -r, hi = r;
        if (f(lo) > 0.0 || f(hi) < 0.0) return false;
        for (int i = 0; i < 80; ++i) {
            double mid = 0.5 * (lo + hi);
            (f(mid) > 0.0 ? hi : lo) = mid;
        }
        x2 = lo;
        return true;
    };
    auto keep = [&](const Vec4& p) {
        double n = norm4(p);
        if (n >= eps && n <= r && rho.value(p) <= 0.0) pts.push_back(p);
    };
    // Deterministic spine: the inner normal and boundary points over the coordinate axes.
    for (int i = 0; i <= 16; ++i) {
        double t = r * std::pow(eps / r, i / 16.0);
        keep({0.0, 0.0, -t, 0.0});
        for (Vec4 d : {Vec4{t, 0, 0, 0}, Vec4{0, t, 0, 0}, Vec4{0, 0, 0, t}, Vec4{0, 0, 0, -t}}) {
            double x2;
            if (boundary_x2(d[0], d[1], d[3], x2)) keep({d[0], d[1], x2, d[3]});
        }
    }
    int attempts = 0;
    while (int(pts.size()) < count && attempts < 50 * count) {
        ++attempts;
        // Log-uniform radius so that small scales are represented.
        double scale = r * std::pow(eps / r, w(rng));
        double x1 = scale * u(rng), y1 = scale * u(rng), y2 = scale * u(rng);
        double x2;
        if (!boundary_x2(x1, y1, y2, x2)) continue;
        if (pts.size() % 2 == 1) x2 = x2 - w(rng) * (x2 + r);
        keep({x1, y1, x2, y2});
    }
    return pts;
}

/// Uniform points of the ball |z| <= r around c.
inline std::vector<Vec4> sample_ball(const Vec4& c, double r, int count, std::uint64_t seed, double inner = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::vector<Vec4> pts;
    while (int(pts.size()) < count) {
        Vec4 d{n(rng), n(rng), n(rng), n(rng)};
        double len = norm4(d);
        if (len < 1e-12) continue;
        double rad = r * std::pow(w(rng), 0.25);
        if (rad < inner) continue;
        pts.push_back(add4(c, scale4(d, rad / len)));
    }
    return pts;
}

struct PeakVerification {
    double phi_at_origin = 0.0;
    double sampled_max = 0.0;  // max of phi over the closure sample
    std::size_t closure_points = 0;
    PshReport psh;
    FSCheck fs;
    bool ok(double psh_floor = -1e-6) const {
        return phi_at_origin == 0.0 && sampled_max < 0.0 && psh.min_value >= psh_floor && fs.ok();
    }
};

struct PeakOptions {
    int psh_points = 10000;
    int psh_directions = 64;
    int closure_points = 20000;
    int search_psh_points = 1500;
    int search_psh_directions = 16;
    int search_closure_points = 3000;
    int radius_halvings = 10;
    std::uint64_t seed = 1;
    double psh_floor = -1e-6;
    FSSearchOptions fs{};
};

template <class T>
PeakVerification verify_peak(const PeakFunction& pf, const RationalHermitian& rho, const AlmostComplexStructure<T>& J,
                             int psh_points, int directions, int closure_points, std::uint64_t seed) {
    PeakVerification v;
    ScalarField phi = pf.field();
    v.phi_at_origin = phi({0.0, 0.0, 0.0, 0.0}).value;
    PolyField rf = PolyField::from_hermitian(rho);
    auto pts = sample_closure(rf, pf.radius, closure_points, seed);
    v.closure_points = pts.size();
    v.sampled_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) v.sampled_max = std::max(v.sampled_max, phi(p).value);
    if (pts.empty()) v.sampled_max = 0.0;
    SampleGrid g;
    g.points = sample_ball({}, pf.radius, psh_points, seed + 1);
    PshOptions po;
    po.directions = directions;
    po.seed = seed + 2;
    po.witness_tol = 1e-6;
    v.psh = psh_check(phi, J, g, po);
    v.fs = check_fs_function(pf.h2m, pf.fs);
    return v;
}

/// J seen in the sheared coordinates of the normal form.
template <class T>
AlmostComplexStructure<T> normal_form_structure(const NormalForm& nf, const AlmostComplexStructure<T>& J) {
    bool trivial = true;
    for (const auto& c : nf.shear) trivial = trivial && is_zero(c);
    if (trivial) return J;
    std::vector<Complex<T>> neg;
    for (const auto& c : nf.shear) neg.push_back(convert<Complex<T>>(Complex<Rational>(-c.re, -c.im)));
    return pushforward(J, Diffeomorphism<T>::shear(neg));
}

struct PeakBuild {
    PeakFunction peak;
    PeakVerification verification;
    int candidates_tried = 0;
};

/// Nested search: FS function, then L and C on {1, 10, ..., 1e6}, then r halving from 0.5.
template <class T>
PeakBuild build_peak(const NormalForm& nf, const AlmostComplexStructure<T>& J, const PeakOptions& opt = {}) {
    PeakBuild out;
    PeakFunction& pf = out.peak;
    pf.m = nf.m;
    pf.h2m = nf.h2m;
    pf.rho_k = nf.rho_k;
    pf.hstar_norm = slice_norm(nonharmonic_part(nf.h2m));
    pf.fs = find_fs_function(nf.h2m, opt.fs);
    AlmostComplexStructure<T> Jn = normal_form_structure(nf, J);
    const RationalHermitian& rho = nf.normalized;
    for (int li = 0; li <= 6; ++li) {
        for (int ci = 0; ci <= 6; ++ci) {
            pf.L = Rational(int_power(Rational(10), li));
            pf.C = Rational(int_power(Rational(10), ci));
            double r = 0.5;
            for (int h = 0; h <= opt.radius_halvings; ++h, r *= 0.5) {
                pf.radius = r;
                ++out.candidates_tried;
                auto quick = verify_peak(pf, rho, Jn, opt.search_psh_points, opt.search_psh_directions,
                                         opt.search_closure_points, opt.seed + 100);
                if (!quick.ok(opt.psh_floor)) continue;
                out.verification =
                    verify_peak(pf, rho, Jn, opt.psh_points, opt.psh_directions, opt.closure_points, opt.seed);
                if (out.verification.ok(opt.psh_floor)) return out;
            }
        }
    }
    throw Error(ErrorKind::ConstructionFailed, "no (L, C, r) in budget passes the sampled checks");
}

/// theta_r(s) = s for s <= r/3, 1 for s >= 2r/3, quintic smoothstep blend between.
struct Cutoff {
    double r = 0.5;
    double value(double s) const { return eval(s)[0]; }
    /// {theta, theta', theta''}
    std::array<double, 3> eval(double s) const {
        const double w = r / 3.0;
        double t = (s - w) / w;
        if (t <= 0.0) return {s, 1.0, 0.0};
        if (t >= 1.0) return {1.0, 0.0, 0.0};
        double S = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        double S1 = 30.0 * t * t * (1.0 - t) * (1.0 - t) / w;
        double S2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (w * w);
        return {s + (1.0 - s) * S, 1.0 - S + (1.0 - s) * S1, -2.0 * S1 + (1.0 - s) * S2};
    }
};

/// log(theta_r(|z-p|^2)) + theta_r(A |z-p|) + B |z-p|^2.
struct LocalizationGadget {
    Vec4 center{};
    double r = 0.5;
    double A = 1.0;
    double B = 1.0;
    PshReport psh;

    Jet2 operator()(const Vec4& x) const {
        Cutoff th{r};
        Jet2 s = squared_distance_jet(x, center);
        auto a = th.eval(s.value);
        Jet2 log_part = s.chain(std::log(a[0]), a[1] / a[0], a[2] / a[0] - (a[1] * a[1]) / (a[0] * a[0]));
        double d = std::sqrt(s.value);
        Jet2 dist = s.chain(d, 0.5 / d, -0.25 / (d * s.value));
        auto b = th.eval(A * d);
        Jet2 cut = dist.chain(b[0], A * b[1], A * A * b[2]);
        return log_part + cut + s * B;
    }

    ScalarField field() const {
        LocalizationGadget self = *this;
        return [self](const Vec4& x) { return self(x); };
    }

    /// Chart sample: ball of radius sqrt(r) around the center minus a small ball.
    SampleGrid chart_sample(int count, std::uint64_t seed) const {
        SampleGrid g;
        g.points = sample_ball(center, std::sqrt(r), count, seed, 1e-3 * std::sqrt(r));
        return g;
    }
};

struct LocalizationOptions {
    int points = 2000;
    int directions = 32;
    std::uint64_t seed = 1;
    int a_steps = 8;
    int b_steps = 7;
    double psh_floor = -1e-6;
};

template <class T>
LocalizationGadget build_localization(const AlmostComplexStructure<T>& J, const Vec4& p, double r,
                                      const LocalizationOptions& opt = {}) {
    LocalizationGadget g;
    g.center = p;
    g.r = r;
    SampleGrid sample = g.chart_sample(opt.points, opt.seed);
    PshOptions po;
    po.directions = opt.directions;
    po.seed = opt.seed + 1;
    po.psh_tol = -opt.psh_floor;
    // Below r = 1/2 the needed B grows faster than 1/r (between 1/r and 1/r^2), so the
    // search range gains one decade per decade of r.
    const int b_steps = opt.b_steps + std::max(0, int(std::ceil(std::log10(0.5 / r))));
    for (int bi = 0; bi < b_steps; ++bi) {
        for (int ai = 0; ai < opt.a_steps; ++ai) {
            g.A = std::ldexp(1.0, ai);
            // B = 10^bi at r = 1/2.
            g.B = std::pow(10.0, bi) * 0.5 / r;
            g.psh = psh_check(g.field(), J, sample, po);
            if (g.psh.min_value >= opt.psh_floor) return g;
        }
    }
    throw Error(ErrorKind::SearchExhausted, "no (A, B) in budget makes the localization function psh on the sample");
}

/// |z1 - q1|^2m + |z2 - q2|^2 + |z1 - q1|^2 |z2 - q2|^2.
inline RationalHermitian psi_weight(const std::array<Complex<Rational>, 2>& q, int m) {
    using H = RationalHermitian;
    H base = H::modulus_power(m, 0, Rational(1)) + H::modulus_power(0, 1, Rational(1)) +
             H::modulus_power(1, 1, Rational(1));
    Complex<Rational> n1(-q[0].re, -q[0].im), n2(-q[1].re, -q[1].im);
    return base.recenter(n1, n2);
}

}  // namespace acxlab
