#pragma once

#include "acxlab/disc.hpp"
#include "acxlab/errors.hpp"
#include "acxlab/hermitian.hpp"
#include "acxlab/series.hpp"
#include "acxlab/structure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace acxlab {

/// Defining function and structure at the origin, with {z2 = 0} the complex tangent.
struct BoundaryPointData {
    RationalHermitian rho;
    RationalStructure J = RationalStructure::standard();
};

inline Complex<Rational> normal_coefficient(const RationalHermitian& rho) { return rho.coeff({0, 0, 1, 0}); }

inline void check_boundary_point(const BoundaryPointData& bp) {
    if (!is_zero(bp.rho.coeff({0, 0, 0, 0}))) throw Error(ErrorKind::TaskError, "rho(0) != 0");
    if (is_zero(normal_coefficient(bp.rho))) throw Error(ErrorKind::TaskError, "d rho / d z2 (0) = 0");
    if (!is_zero(bp.rho.coeff({1, 0, 0, 0}))) throw Error(ErrorKind::TaskError, "complex tangent at 0 is not {z2 = 0}");
}

struct TypeResult {
    int order = -1;          // contact order reached; -1 when it exceeds the cap
    int multiplicity = 1;    // multiplicity of the first disc component
    bool exceeds_cap = false;
    bool lower_bound = false;  // true when a budget stopped the search
    BiSeries<Rational> w1;   // realizing disc
    BiSeries<Rational> w2;

    std::string label(int cap) const { return exceeds_cap ? "> " + std::to_string(cap) : std::to_string(order); }
};

/// J_st disc (zeta^mu, w2) with w2 holomorphic chosen so that the harmonic
/// lowest-order terms of rho o u cancel one degree at a time.
inline TypeResult cancellation_disc(const RationalHermitian& rho, int mu, int degree_cap, int budget = 64) {
    using CQ = Complex<Rational>;
    using B = BiSeries<Rational>;
    const int N = degree_cap;
    const CQ g = normal_coefficient(rho);
    TypeResult r;
    r.multiplicity = mu;
    r.w1 = B(N);
    if (mu <= N) r.w1.at(mu, 0) = CQ(Rational(1));
    r.w2 = B(N);
    for (int step = 0; step <= budget; ++step) {
        B c = compose_hermitian(rho, r.w1, r.w2);
        int k = c.lowest_degree(-1.0);
        if (k < 0) {
            r.exceeds_cap = true;
            return r;
        }
        bool nonharmonic = false;
        for (int a = 1; a < k; ++a) nonharmonic = nonharmonic || !is_zero(c.at(a, k - a));
        if (nonharmonic || k == 0) {
            r.order = k;
            return r;
        }
        // c_k zeta^k + conj(c_k) zetabar^k is killed by adding d zeta^k to w2 with g d = -c_k.
        CQ d = -c.at(k, 0) / g;
        r.w2.at(k, 0) += d;
    }
    r.lower_bound = true;
    B c = compose_hermitian(rho, r.w1, r.w2);
    r.order = c.lowest_degree(-1.0);
    return r;
}

struct RegularTypeReport {
    TypeResult disc;
    std::optional<int> cross_check_order;  // contact order of the solver disc for non-standard J
    std::vector<std::string> findings;

    bool exceeds_cap() const { return disc.exceeds_cap; }
    int value() const { return disc.order; }
};

inline RegularTypeReport regular_type(const BoundaryPointData& bp, int degree_cap, int budget = 64) {
    if (degree_cap < 2) throw Error(ErrorKind::TaskError, "degree_cap must be at least 2");
    check_boundary_point(bp);
    RegularTypeReport rep;
    rep.disc = cancellation_disc(bp.rho, 1, degree_cap, budget);
    if (rep.disc.lower_bound) {
        rep.findings.push_back("cancellation budget exhausted; value is a lower bound");
    }
    if (!bp.J.is_standard() && !rep.disc.exceeds_cap) {
        // Cross-check: the J-disc with the same x-jet, shrunk to stay in the smallness regime.
        const double r = 0.25;
        DiscSpec spec;
        spec.series_order = std::max(24, degree_cap + 2);
        spec.radius_scale = r;
        double fact = 1.0;
        for (int k = 0; k <= degree_cap; ++k) {
            if (k > 0) fact *= k;
            Complex<Rational> a = rep.disc.w1.get(k, 0), b = rep.disc.w2.get(k, 0);
            spec.jet.push_back({to_double(a.re) * fact, to_double(a.im) * fact, to_double(b.re) * fact, to_double(b.im) * fact});
        }
        while (spec.jet.size() > 2 && norm4(spec.jet.back()) == 0.0) spec.jet.pop_back();
        spec.center = spec.jet[0];
        try {
            Disc d = solve(bp.J.cast<double>(), spec);
            double eps = 1e-9 * std::pow(r, degree_cap);
            auto c = contact_order(bp.rho.cast<double>(), d, degree_cap, eps);
            rep.cross_check_order = c.order;
            if (c.order != rep.disc.order) {
                rep.findings.push_back("solver disc contact order " + std::to_string(c.order) +
                                       " differs from the standard-structure value");
            }
        } catch (const Error& e) {
            rep.findings.push_back(std::string("cross-check skipped: ") + e.what());
        }
    }
    return rep;
}

struct DAngeloReport {
    Rational value;            // max contact / multiplicity found
    int best_multiplicity = 1;
    bool exceeds_cap = false;
    bool agrees_with_regular = true;
    int regular = -1;
    std::vector<std::string> findings;
};

inline DAngeloReport dangelo_type(const BoundaryPointData& bp, int degree_cap, int multiplicity_cap, int budget = 64) {
    if (degree_cap < 2 || multiplicity_cap < 1) throw Error(ErrorKind::TaskError, "caps must be positive");
    RegularTypeReport reg = regular_type(bp, degree_cap, budget);
    DAngeloReport rep;
    rep.findings = reg.findings;
    rep.regular = reg.value();
    rep.exceeds_cap = reg.exceeds_cap();
    rep.value = reg.exceeds_cap() ? Rational(0) : Rational(reg.value());
    for (int mu = 2; mu <= multiplicity_cap && !rep.exceeds_cap; ++mu) {
        TypeResult t = cancellation_disc(bp.rho, mu, degree_cap * mu, budget);
        if (t.exceeds_cap) {
            rep.exceeds_cap = true;
            break;
        }
        Rational ratio(t.order, mu);
        ratio.canonicalize();
        if (ratio > rep.value) {
            rep.value = ratio;
            rep.best_multiplicity = mu;
        }
    }
    if (rep.exceeds_cap) {
        rep.agrees_with_regular = reg.exceeds_cap();
    } else {
        rep.agrees_with_regular = !reg.exceeds_cap() && rep.value == Rational(reg.value());
    }
    if (!rep.agrees_with_regular) rep.findings.push_back("D'Angelo type differs from regular type");
    return rep;
}

struct NormalForm {
    int m = 0;
    HomogeneousSlice<Rational> h2m;
    std::vector<Complex<Rational>> rho_k;       // index k - 1 for k = 1..m-1
    std::vector<Complex<Rational>> shear;       // z2 -> z2 + sum shear[k] z1^k applied first
    RationalHermitian normalized;               // rho after the shear
    int pure_remainder_degree = 0;              // pure z1 terms of degree >= this are remainder
    int mixed_remainder_z1_degree = 0;          // z2 z1^k terms with k >= this are remainder
    int normal_remainder_degree = 2;            // z2 degree of the remainder class
    bool subharmonic_on_sample = true;
    std::vector<std::string> findings;
};

/// Laplacian in z1 of a pure-z1 slice at z1 = e^{i theta}.
inline double slice_laplacian_on_circle(const HomogeneousSlice<Rational>& h, double theta) {
    HomogeneousSlice<Rational> l{h.degree - 2, h.poly.laplacian_z1()};
    return slice_on_circle(l, theta);
}

inline NormalForm extract_normal_form(const BoundaryPointData& bp, int degree_cap = 24) {
    using CQ = Complex<Rational>;
    using Raw = RationalHermitian::Raw;
    RegularTypeReport reg = regular_type(bp, degree_cap);
    if (reg.exceeds_cap()) throw Error(ErrorKind::TypeExceedsCap, "regular type exceeds the cap");
    const int type = reg.value();
    if (type % 2 != 0) throw Error(ErrorKind::NotPseudoconvexWitness, "odd type " + std::to_string(type));
    NormalForm nf;
    nf.m = type / 2;
    nf.findings = reg.findings;

    // Remove harmonic pure-z1 terms of degree < 2m by the holomorphic shear read off the disc.
    nf.shear.assign(std::size_t(2 * nf.m), CQ(Rational(0)));
    Raw s2 = Raw::variable(2);
    for (int k = 2; k < 2 * nf.m; ++k) {
        CQ d = reg.disc.w2.get(k, 0);
        nf.shear[std::size_t(k)] = d;
        if (!is_zero(d)) s2 += Raw::monomial({k, 0, 0, 0}, d);
    }
    nf.normalized = bp.rho.substitute(Raw::variable(0), s2);

    for (int k = 1; k < nf.m; ++k) {
        CQ bad = nf.normalized.coeff({k, 0, 0, 1});
        if (!is_zero(bad)) {
            throw Error(ErrorKind::NotPseudoconvexWitness,
                        "term z1^" + std::to_string(k) + " conj(z2) with coefficient " + scalar_to_string(bad.re) + " + " +
                            scalar_to_string(bad.im) + "i");
        }
        nf.rho_k.push_back(nf.normalized.coeff({k, 0, 1, 0}) * CQ(Rational(2)));
    }
    nf.h2m = pure_z1_slice(nf.normalized, 2 * nf.m);
    nf.pure_remainder_degree = 2 * nf.m + 1;
    nf.mixed_remainder_z1_degree = nf.m;
    nf.normal_remainder_degree = 2;
    if (nonharmonic_part(nf.h2m).poly.is_zero()) throw Error(ErrorKind::TaskError, "H_2m is harmonic");
    for (int i = 0; i < 720; ++i) {
        if (slice_laplacian_on_circle(nf.h2m, 2.0 * std::numbers::pi * i / 720) < -1e-12) {
            nf.subharmonic_on_sample = false;
            nf.findings.push_back("H_2m is not subharmonic on the circle sample");
            break;
        }
    }
    return nf;
}

}  // namespace acxlab
