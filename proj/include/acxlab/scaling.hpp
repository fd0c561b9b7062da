#pragma once

#include "acxlab/errors.hpp"
#include "acxlab/hermitian.hpp"
#include "acxlab/kobayashi.hpp"
#include "acxlab/structure.hpp"
#include "acxlab/type.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace acxlab {

using ComplexPair = std::array<Complex<Rational>, 2>;

struct SliceScale {
    int degree = 0;
    double norm = 0.0;       // sup of the nonharmonic slice on the unit circle
    double tau = 0.0;        // (delta / norm)^(1/degree)
    bool exact = false;      // tau is an exact rational
};

struct ScalingState {
    int nu = 0;
    ComplexPair p{};
    ComplexPair p_star{};
    Rational delta{0};
    Rational rho_at_p_star{0};
    Diffeomorphism<Rational> Phi_up;      // translation then linear straightening
    Diffeomorphism<Rational> phi_shear;   // z2 -> z2 + sum shear[k] z1^k
    std::vector<Complex<Rational>> shear;
    int type = 0;                          // 2l at p_star (cap 2m)
    std::vector<SliceScale> slices;
    double tau = 0.0;
    Rational tau_used{0};                  // exact value used by the dilation
    bool tau_exact = false;
    Diffeomorphism<Rational> Lambda;
    RationalHermitian rho_normalized;      // after Phi_up and phi_shear
    RationalStructure J_normalized;
    RationalHermitian rho_tilde;
    RationalStructure J_tilde;
    double gap = 0.0;                      // C0 norm of J_tilde - J_st on the unit polydisc
    double gap_c1 = 0.0;                   // same for the first derivatives
    ComplexPair image_p_star{};            // p_star under the normalization (before Lambda)
    ComplexPair image_p{};                 // p under the normalization: (0, -delta)
};

namespace detail {

/// Exact k-th root of a nonnegative rational, when it is one.
inline std::optional<Rational> exact_root(const Rational& x, int k) {
    if (x < 0) return std::nullopt;
    mpz_class n = x.get_num(), d = x.get_den(), rn, rd;
    if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), k) || !mpz_root(rd.get_mpz_t(), d.get_mpz_t(), k)) return std::nullopt;
    Rational r(rn, rd);
    r.canonicalize();
    return r;
}

inline Vec4 to_vec(const ComplexPair& z) {
    return {to_double(z[0].re), to_double(z[0].im), to_double(z[1].re), to_double(z[1].im)};
}

inline ComplexPair from_exact(const std::array<Rational, 4>& x) {
    return {Complex<Rational>(x[0], x[1]), Complex<Rational>(x[2], x[3])};
}

inline std::array<Rational, 4> to_exact(const ComplexPair& z) { return {z[0].re, z[0].im, z[1].re, z[1].im}; }

/// Unit polydisc sample: radii {0, 1/2, 1} x 8 angles in each factor.
inline std::vector<Vec4> polydisc_sample() {
    std::vector<std::complex<double>> f{{0.0, 0.0}};
    for (double r : {0.5, 1.0})
        for (int a = 0; a < 8; ++a) f.push_back(std::polar(r, a * std::acos(-1.0) / 4.0));
    std::vector<Vec4> pts;
    for (auto a : f)
        for (auto b : f) pts.push_back({a.real(), a.imag(), b.real(), b.imag()});
    return pts;
}

}  // namespace detail

/// Sup norm of J - J_st and of its first derivatives on the unit polydisc.
inline std::pair<double, double> structure_gap(const RealStructure& J) {
    if (J.is_standard()) return {0.0, 0.0};
    Mat4 st = standard_matrix<double>();
    double g0 = 0.0, g1 = 0.0;
    for (const auto& x : detail::polydisc_sample()) {
        Mat4 j = J.eval(x);
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) g0 = std::max(g0, std::abs(j[i][k] - st[i][k]));
        for (int v = 0; v < 4; ++v) {
            Mat4 d = J.derivative(v, x);
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < 4; ++k) g1 = std::max(g1, std::abs(d[i][k]));
        }
    }
    return {g0, g1};
}

/// One scaling step at the boundary point p_star with p = p_star - (0, delta):
/// translation, straightening w2 = z2 + (b/a) z1, harmonic-term shear, tau, dilation.
inline ScalingState scale_step_at(const RationalHermitian& rho, const RationalStructure& J, const ComplexPair& p_star,
                                  const Rational& delta, int m, int nu = 0) {
    using CQ = Complex<Rational>;
    using Raw = RationalHermitian::Raw;
    if (!(delta > 0)) throw Error(ErrorKind::TaskError, "delta must be positive");
    ScalingState s;
    s.nu = nu;
    s.delta = delta;
    s.p_star = p_star;
    s.p = {p_star[0], CQ(p_star[1].re - delta, p_star[1].im)};

    // Phi^nu: translation, then the complex-linear straightening.
    RationalHermitian r1 = rho.recenter(p_star[0], p_star[1]);
    s.rho_at_p_star = r1.coeff({0, 0, 0, 0}).re;
    if (s.rho_at_p_star != 0) throw Error(ErrorKind::BoundaryProjectionFailed, "p_star is not on the boundary");
    CQ a = r1.coeff({0, 0, 1, 0}), b = r1.coeff({1, 0, 0, 0});
    if (a.im != 0 || !(a.re > 0)) {
        throw Error(ErrorKind::BoundaryProjectionFailed, "inner normal at p_star is not along -x2");
    }
    CQ ba = b / a;
    Raw w1 = Raw::variable(0), w2 = Raw::variable(2);
    RationalHermitian r2 = r1.substitute(w1, w2 - w1 * ba);
    r2 = r2.scaled(Rational(1), Rational(1), Rational(1 / (2 * a.re)));
    s.Phi_up = compose(Diffeomorphism<Rational>::shear({CQ(Rational(0)), ba}),
                       Diffeomorphism<Rational>::translation(
                           {-p_star[0].re, -p_star[0].im, -p_star[1].re, -p_star[1].im}));
    RationalStructure J1 = pushforward(J, s.Phi_up);

    // Type at p_star, capped at 2m.
    auto reg = regular_type(BoundaryPointData{r2, RationalStructure::standard()}, 2 * m);
    if (reg.exceeds_cap()) throw Error(ErrorKind::TypeExceedsCap, "type at p_star exceeds 2m");
    s.type = reg.value();

    // phi_nu: remove harmonic z1^k terms, k = 2 .. 2m-1, in increasing degree.
    s.shear.assign(2 * m, CQ(Rational(0)));
    for (int k = 2; k < 2 * m; ++k) {
        CQ c = r2.coeff({k, 0, 0, 0});
        if (is_zero(c)) continue;
        CQ ck(2 * c.re, 2 * c.im);
        s.shear[k] = ck;
        Raw pw = Raw(CQ(Rational(1)));
        for (int i = 0; i < k; ++i) pw = pw * w1;
        r2 = r2.substitute(w1, w2 - pw * ck);
    }
    s.phi_shear = Diffeomorphism<Rational>::shear(s.shear);
    s.rho_normalized = r2;
    bool trivial = true;
    for (const auto& c : s.shear) trivial = trivial && is_zero(c);
    s.J_normalized = trivial ? J1 : pushforward(J1, s.phi_shear);

    // tau = min_k (delta / |P_k*|)^(1/k) over the nonharmonic slices up to 2m.
    s.tau = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= 2 * m; ++k) {
        auto nh = nonharmonic_part(pure_z1_slice(r2, k));
        if (nh.poly.is_zero()) continue;
        SliceScale sc;
        sc.degree = k;
        sc.norm = slice_norm(nh);
        Rational ratio = delta / Rational(sc.norm);
        auto root = detail::exact_root(ratio, k);
        sc.exact = root.has_value();
        sc.tau = root ? to_double(*root) : std::pow(to_double(ratio), 1.0 / k);
        s.slices.push_back(sc);
        if (sc.tau < s.tau) {
            s.tau = sc.tau;
            s.tau_exact = sc.exact;
            s.tau_used = root ? *root : Rational(sc.tau);
        }
    }
    if (s.slices.empty()) throw Error(ErrorKind::TypeExceedsCap, "no nonharmonic slice up to degree 2m");

    // Lambda_nu: (z1, z2) -> (z1 / tau, z2 / delta).
    s.Lambda = Diffeomorphism<Rational>::dilation(Rational(1 / s.tau_used), Rational(1 / delta));
    s.rho_tilde = r2.scaled(s.tau_used, delta, Rational(1 / delta));
    s.J_tilde = s.J_normalized.is_standard() ? s.J_normalized : pushforward(s.J_normalized, s.Lambda);
    auto [g0, g1] = structure_gap(s.J_tilde.cast<double>());
    s.gap = g0;
    s.gap_c1 = g1;

    auto full = compose(s.phi_shear, s.Phi_up);
    s.image_p_star = detail::from_exact(full.apply_exact(detail::to_exact(p_star)));
    s.image_p = detail::from_exact(full.apply_exact(detail::to_exact(s.p)));
    return s;
}

/// scale_step from an interior point: p_star = p + (0, delta) with delta the first
/// root of rho(p1, p2 + s) in s > 0 (exact when rho is affine in x2 along the line).
inline ScalingState scale_step(const RationalHermitian& rho, const RationalStructure& J, const ComplexPair& p, int m,
                               int nu = 0) {
    using CQ = Complex<Rational>;
    Rational rp = rho.eval(p[0], p[1]);
    if (!(rp < 0)) throw Error(ErrorKind::InfeasibleQuery, "p must be interior");
    auto at = [&](const Rational& t) { return rho.eval(p[0], CQ(p[1].re + t, p[1].im)); };
    // Affine test: f(t) - f(0) - t (f(1) - f(0)) vanishes at two more points.
    Rational f0 = rp, f1 = at(Rational(1));
    bool affine = at(Rational(2)) == 2 * f1 - f0 && at(Rational(1, 3)) == f0 + (f1 - f0) / 3;
    Rational delta;
    if (affine && f1 != f0) {
        delta = -f0 / (f1 - f0);
    } else {
        double lo = 0.0, hi = 1.0;
        auto fd = [&](double t) { return to_double(at(Rational(t))); };
        int grow = 0;
        while (fd(hi) < 0.0 && grow++ < 60) hi *= 2.0;
        if (fd(hi) < 0.0) throw Error(ErrorKind::BoundaryProjectionFailed, "no boundary point above p");
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (fd(mid) < 0.0 ? lo : hi) = mid;
        }
        delta = Rational(hi);
        if (at(delta) != 0) {
            throw Error(ErrorKind::BoundaryProjectionFailed, "boundary root above p is not exactly representable");
        }
    }
    if (!(delta > 0)) throw Error(ErrorKind::BoundaryProjectionFailed, "no boundary point above p");
    ComplexPair ps{p[0], CQ(p[1].re + delta, p[1].im)};
    return scale_step_at(rho, J, ps, delta, m, nu);
}

enum class LimitVerdict { converges_to_standard, limit_nonstandard, undetermined };

inline const char* limit_verdict_name(LimitVerdict v) {
    switch (v) {
        case LimitVerdict::converges_to_standard: return "structure-converges-to-standard";
        case LimitVerdict::limit_nonstandard: return "structure-limit-nonstandard";
        case LimitVerdict::undetermined: return "undetermined";
    }
    return "undetermined";
}

struct LimitCoefficient {
    Exp4 exponent{};
    double value = 0.0;
    double rate = std::numeric_limits<double>::quiet_NaN();  // |c_N - c_N-1| / |c_N-1 - c_N-2|
};

struct StructureCoefficient {
    int row = 0;
    int col = 0;
    Exp4 exponent{};
    double value = 0.0;
};

struct LimitReport {
    std::vector<double> gaps;
    std::vector<LimitCoefficient> rho_limit;        // coefficients of rho_tilde_N with |c| > tol
    RealHermitian limit_polynomial;                 // rho_tilde_N minus Re z2, small terms dropped
    bool limit_subharmonic = true;                  // Laplacian of P(z1, 0) on circle samples
    std::vector<StructureCoefficient> structure_limit;  // nonzero entries of J_tilde_N - J_st
    LimitVerdict verdict = LimitVerdict::undetermined;
};

struct ScalingSequenceSpec {
    RationalHermitian rho;
    RationalStructure J = RationalStructure::standard();
    int m = 2;
    std::vector<Rational> deltas;
    /// Boundary point for step nu (default: the origin).
    std::function<ComplexPair(int, const Rational&)> boundary_point;

    static std::vector<Rational> halving_schedule(int steps) {
        std::vector<Rational> d;
        for (int nu = 1; nu <= steps; ++nu) d.push_back(Rational(1, 1) / Rational(mpz_class(1) << nu));
        return d;
    }
};

struct ScalingRun {
    std::vector<ScalingState> states;
    LimitReport limit;
};

inline LimitReport limit_report(const std::vector<ScalingState>& st, double coeff_tol = 1e-6) {
    LimitReport rep;
    for (const auto& s : st) rep.gaps.push_back(s.gap);
    if (st.empty()) return rep;
    const auto& last = st.back().rho_tilde;
    auto value = [](const RationalHermitian& h, const Exp4& e) {
        return to_double(h.coeff(e).re);
    };
    RealHermitian::Raw P;
    for (const auto& [e, c] : last.raw().terms()) {
        LimitCoefficient lc;
        lc.exponent = e;
        lc.value = to_double(c.re);
        double im = to_double(c.im);
        if (std::max(std::abs(lc.value), std::abs(im)) <= coeff_tol) continue;
        if (st.size() >= 3) {
            double a = value(st[st.size() - 2].rho_tilde, e), b = value(st[st.size() - 3].rho_tilde, e);
            double den = std::abs(a - b);
            lc.rate = den > 0.0 ? std::abs(lc.value - a) / den : (lc.value == a ? 0.0 : lc.rate);
        }
        rep.rho_limit.push_back(lc);
        bool normal = (e == Exp4{0, 0, 1, 0} || e == Exp4{0, 0, 0, 1});
        if (!normal) P.add_term(e, Complex<double>(lc.value, im));
    }
    rep.limit_polynomial = RealHermitian(P, last.degree_cap());
    RealHermitian lap = rep.limit_polynomial.laplacian_z1();
    for (int a = 0; a < 64; ++a) {
        std::complex<double> z = std::polar(1.0, a * std::acos(-1.0) / 32.0);
        if (lap.eval(CPoint{z, 0.0}) < -1e-9) rep.limit_subharmonic = false;
    }
    auto dev = st.back().J_tilde.cast<double>().deviation();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (const auto& [e, c] : dev[i][j].terms()) {
                if (std::abs(c) > 1e-9) rep.structure_limit.push_back({i, j, e, c});
            }

    const auto& g = rep.gaps;
    const std::size_t n = g.size();
    bool decreasing = true;
    for (std::size_t i = (n > 5 ? n - 5 : 1); i < n; ++i) decreasing = decreasing && g[i] <= g[i - 1] * (1.0 + 1e-12);
    if (g.back() <= 1e-3 && decreasing) {
        rep.verdict = LimitVerdict::converges_to_standard;
    } else if (n >= 2 && g.back() > 1e-3 && std::abs(g[n - 1] - g[n - 2]) <= 1e-2 * g[n - 1]) {
        rep.verdict = LimitVerdict::limit_nonstandard;
    }
    return rep;
}

inline ScalingRun run_scaling_sequence(const ScalingSequenceSpec& spec) {
    using CQ = Complex<Rational>;
    ScalingRun run;
    for (std::size_t i = 0; i < spec.deltas.size(); ++i) {
        int nu = int(i) + 1;
        const Rational& d = spec.deltas[i];
        ComplexPair ps = spec.boundary_point ? spec.boundary_point(nu, d) : ComplexPair{CQ(Rational(0)), CQ(Rational(0))};
        run.states.push_back(scale_step_at(spec.rho, spec.J, ps, d, spec.m, nu));
    }
    run.limit = limit_report(run.states);
    return run;
}

/// (1/C) delta^(1/2) <= tau <= C delta^(1/2m): C fitted on nu <= fit_upto, checked on the rest.
struct TauBoundsReport {
    double C = 1.0;
    int fit_upto = 10;
    std::vector<double> lower_ratio;  // delta^(1/2) / tau
    std::vector<double> upper_ratio;  // tau / delta^(1/2m)
    bool holds = true;
};

inline TauBoundsReport tau_bounds_check(const std::vector<ScalingState>& st, int m, int fit_upto = 10) {
    TauBoundsReport rep;
    rep.fit_upto = fit_upto;
    for (const auto& s : st) {
        double d = to_double(s.delta);
        rep.lower_ratio.push_back(std::sqrt(d) / s.tau);
        rep.upper_ratio.push_back(s.tau / std::pow(d, 1.0 / (2 * m)));
    }
    for (std::size_t i = 0; i < st.size(); ++i) {
        if (st[i].nu > fit_upto) continue;
        rep.C = std::max({rep.C, rep.lower_ratio[i], rep.upper_ratio[i]});
    }
    const double slack = 1.0 + 1e-12;
    for (std::size_t i = 0; i < st.size(); ++i) {
        if (st[i].nu <= fit_upto) continue;
        rep.holds = rep.holds && rep.lower_ratio[i] <= rep.C * slack && rep.upper_ratio[i] <= rep.C * slack;
    }
    return rep;
}

/// Appendix scenario: rho = Re z2 + |z1|^6 + Re(i z1^2 z2), a1 = eps x2 (J = J_st on {x2 = 0}),
/// boundary points p*_nu = (0, i kappa delta_nu^(1/6)).
inline ScalingSequenceSpec appendix_scenario(int steps, const Rational& eps = Rational(1, 2),
                                             const Rational& kappa = Rational(1)) {
    using CQ = Complex<Rational>;
    using H = RationalHermitian;
    using P = RationalPoly;
    ScalingSequenceSpec spec;
    spec.rho = H::re_z2() + H::modulus_power(3, 0, Rational(1)) + H::real_part({2, 0, 1, 0}, CQ(Rational(0), Rational(1)));
    spec.J = RationalStructure::diagonal_from_ac(P::variable(2) * eps, P(Rational(1)), P(Rational(0)), P(Rational(1)));
    spec.m = 3;
    spec.deltas = ScalingSequenceSpec::halving_schedule(steps);
    spec.boundary_point = [kappa](int, const Rational& d) {
        Rational s(std::pow(to_double(d), 1.0 / 6.0));
        Rational y = kappa * s;
        return ComplexPair{CQ(Rational(0)), CQ(Rational(0), y)};
    };
    return spec;
}

using DiscMap = std::function<CPoint(std::complex<double>)>;

struct BoxFrontPoint {
    double C = 1.0;
    double r0 = 0.0;  // min over the batch of the largest r with u(r disc) in Q(0, C delta)
};

struct BoxLocalizationReport {
    std::vector<BoxFrontPoint> front;
    std::vector<std::vector<double>> per_disc;  // [disc][C index]
    double best_C = std::numeric_limits<double>::infinity();  // smallest C with r0 >= r_target
};

/// tau(p_star, delta') from the state's slice norms.
inline double tau_at(const ScalingState& s, double delta) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& sc : s.slices) t = std::min(t, std::pow(delta / sc.norm, 1.0 / sc.degree));
    return t;
}

/// Q(0, C delta) = {|z1| <= tau(C delta), |z2| <= C delta} in the normalized chart.
inline BoxLocalizationReport box_localization_check(const ScalingState& s, const std::vector<DiscMap>& discs,
                                                    double r_target = 0.1) {
    BoxLocalizationReport rep;
    const double d = to_double(s.delta);
    const std::vector<double> Cs{1.0, 2.0, 4.0, 8.0};
    for (double C : Cs) rep.front.push_back({C, std::numeric_limits<double>::infinity()});
    for (const auto& u : discs) {
        std::vector<double> row;
        for (std::size_t ci = 0; ci < Cs.size(); ++ci) {
            double t1 = tau_at(s, Cs[ci] * d), t2 = Cs[ci] * d;
            auto inside = [&](double r) {
                for (double frac : {1.0, 0.75, 0.5, 0.25})
                    for (int a = 0; a < 64; ++a) {
                        CPoint z = u(std::polar(r * frac, a * std::acos(-1.0) / 32.0));
                        if (std::abs(z[0]) > t1 * (1.0 + 1e-12) || std::abs(z[1]) > t2 * (1.0 + 1e-12)) return false;
                    }
                return true;
            };
            double best = 0.0;
            if (inside(1.0)) {
                best = 1.0;
            } else {
                double lo = 0.0, hi = 1.0;
                for (int i = 0; i < 40; ++i) {
                    double mid = 0.5 * (lo + hi);
                    (inside(mid) ? lo : hi) = mid;
                }
                best = lo;
            }
            row.push_back(best);
            rep.front[ci].r0 = std::min(rep.front[ci].r0, best);
        }
        rep.per_disc.push_back(row);
    }
    for (const auto& f : rep.front) {
        if (f.r0 >= r_target) {
            rep.best_C = f.C;
            break;
        }
    }
    return rep;
}

/// Near-extremal discs through (0, -delta) in the state's normalized domain along
/// random directions, from the metric estimator's witnesses.
inline std::vector<DiscMap> disc_batch(const ScalingState& s, int count, std::uint64_t seed,
                                       const MetricOptions& opt = {}) {
    MetricDomain D(s.rho_normalized, s.J_normalized.cast<double>());
    Vec4 p{0.0, 0.0, -to_double(s.delta), 0.0};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<DiscMap> out;
    while (int(out.size()) < count) {
        Vec4 v{n(rng), n(rng), n(rng), n(rng)};
        double len = norm4(v);
        if (len < 1e-12) continue;
        auto e = estimate_metric(D, p, scale4(v, 1.0 / len), opt);
        if (!e.disc_witness) continue;
        DiscWitness w = *e.disc_witness;
        if (w.solved) {
            Disc disc = *w.solved;
            out.push_back([disc](std::complex<double> z) { return disc.eval(z); });
        } else {
            CPoint c = to_complex_point(p);
            auto coeffs = w.coefficients;
            out.push_back([c, coeffs](std::complex<double> z) {
                CPoint u = c;
                std::complex<double> pw = 1.0;
                for (const auto& a : coeffs) {
                    pw *= z;
                    u[0] += a[0] * pw;
                    u[1] += a[1] * pw;
                }
                return u;
            });
        }
    }
    return out;
}

}  // namespace acxlab
