#pragma once

#include "acxlab/disc.hpp"
#include "acxlab/errors.hpp"
#include "acxlab/hermitian.hpp"
#include "acxlab/numerics.hpp"
#include "acxlab/peak.hpp"
#include "acxlab/structure.hpp"
#include "acxlab/type.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace acxlab {

/// {rho < 0} intersected with {extra_i < 0}, with an almost complex structure.
class MetricDomain {
public:
    MetricDomain() = default;
    MetricDomain(RationalHermitian rho, RealStructure J = RealStructure::standard(),
                 std::vector<RationalHermitian> extra = {})
        : rho_(std::move(rho)), J_(std::move(J)), extra_(std::move(extra)) {
        fields_ = std::make_shared<std::vector<PolyField>>();
        fields_->push_back(PolyField::from_hermitian(rho_));
        for (const auto& e : extra_) fields_->push_back(PolyField::from_hermitian(e));
    }

    /// max of the defining functions: negative exactly inside.
    double value(const Vec4& x) const {
        double v = -std::numeric_limits<double>::infinity();
        for (const auto& f : *fields_) v = std::max(v, f.value(x));
        return v;
    }
    bool contains(const Vec4& x) const { return value(x) < 0.0; }

    const RationalHermitian& rho() const { return rho_; }
    const RealStructure& J() const { return J_; }
    const std::vector<RationalHermitian>& extra() const { return extra_; }

    /// Same structure, one more defining function.
    MetricDomain intersect(const RationalHermitian& h) const {
        auto e = extra_;
        e.push_back(h);
        return MetricDomain(rho_, J_, e);
    }

private:
    RationalHermitian rho_;
    RealStructure J_ = RealStructure::standard();
    std::vector<RationalHermitian> extra_;
    std::shared_ptr<std::vector<PolyField>> fields_;
};

/// Euclidean distance from an interior point to the boundary: ray scans over the
/// axes and a sphere sample, bisection on the first sign change, then a local
/// Nelder-Mead refinement of the best direction. +inf if no ray leaves the domain.
inline double boundary_distance(const MetricDomain& D, const Vec4& p, int directions = 256, std::uint64_t seed = 7,
                                double max_reach = 1e4) {
    if (!D.contains(p)) throw Error(ErrorKind::InfeasibleQuery, "point is not inside the domain");
    auto hit = [&](Vec4 d) {
        double len = norm4(d);
        if (len < 1e-300) return std::numeric_limits<double>::infinity();
        d = scale4(d, 1.0 / len);
        const double step = std::pow(2.0, 0.25);
        double prev = 0.0;
        for (double s = 1e-10 * (1.0 + norm4(p)); s <= max_reach; s *= step) {
            if (D.value(add4(p, scale4(d, s))) >= 0.0) {
                double lo = prev, hi = s;
                for (int i = 0; i < 100 && hi - lo > 1e-15 * hi; ++i) {
                    double mid = 0.5 * (lo + hi);
                    (D.value(add4(p, scale4(d, mid))) >= 0.0 ? hi : lo) = mid;
                }
                return hi;
            }
            prev = s;
        }
        return std::numeric_limits<double>::infinity();
    };
    std::vector<Vec4> dirs;
    for (int i = 0; i < 4; ++i)
        for (double s : {1.0, -1.0}) {
            Vec4 e{};
            e[i] = s;
            dirs.push_back(e);
        }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < directions; ++i) dirs.push_back({n(rng), n(rng), n(rng), n(rng)});
    double best = std::numeric_limits<double>::infinity();
    Vec4 bestd{};
    for (const auto& d : dirs) {
        double h = hit(d);
        if (h < best) {
            best = h;
            bestd = d;
        }
    }
    if (!std::isfinite(best)) return best;
    bestd = scale4(bestd, 1.0 / norm4(bestd));
    auto f = [&](const std::vector<double>& x) { return hit({x[0], x[1], x[2], x[3]}); };
    auto r = nelder_mead(f, {bestd[0], bestd[1], bestd[2], bestd[3]}, 0.05, 400);
    return std::min(best, r.value);
}

struct DiscWitness {
    double radius = 0.0;                 // r in d0u(d/dx) = r v
    std::vector<CPoint> coefficients;    // u(zeta) = p + sum_k coefficients[k-1] zeta^k (polynomial discs)
    std::optional<Disc> solved;          // series disc from the solver (non-standard J)
    double residual = 0.0;               // max |u_y - J u_x| on the grid
    double max_rho = 0.0;                // max of the defining function on the sampled image
    std::size_t samples = 0;             // size of the feasibility sample
};

struct MetricEstimate {
    double lower = 0.0;
    std::string lower_method = "trivial-zero";
    double log_lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    std::string upper_method = "dist-bound";
    std::optional<DiscWitness> disc_witness;
    double boundary_distance = 0.0;
    int feasibility_checks = 0;
};

/// Lower-bound data around a boundary point in normal form:
/// phi_tilde = max(N phi + |z|^2 - beta^2, -2 beta^2), valid for |q| <= alpha^2.
struct PeakLowerBound {
    PeakFunction peak;
    Diffeomorphism<double> to_normal;    // original coordinates -> normal-form coordinates
    RealStructure J;                     // structure in normal-form coordinates
    double beta = 0.0;
    double alpha_outer = 0.0;            // annulus alpha' <= |z| <= beta' used for N
    double beta_inner = 0.0;
    double outer_max = 0.0;              // max phi on the closure annulus (< 0)
    double N = 0.0;
    double alpha = 0.0;
    LocalizationOptions localization{};

    double phi_tilde(const Vec4& x) const {
        double v = N * peak.value(x) + dot4(x, x) - beta * beta;
        return std::max(v, -2.0 * beta * beta);
    }
};

inline PeakLowerBound prepare_peak_lower_bound(const BoundaryPointData& bp, const RealStructure& J,
                                               const PeakOptions& opt = {}, int samples = 4000) {
    NormalForm nf = extract_normal_form(bp);
    PeakBuild b = build_peak(nf, J, opt);
    PeakLowerBound lb;
    lb.peak = b.peak;
    std::vector<Complex<double>> neg;
    for (const auto& c : nf.shear) neg.push_back(Complex<double>(-to_double(c.re), -to_double(c.im)));
    lb.to_normal = Diffeomorphism<double>::shear(neg);
    lb.J = normal_form_structure(nf, J);
    lb.beta = b.peak.radius;
    lb.beta_inner = 0.8 * lb.beta;
    lb.alpha_outer = 0.4 * lb.beta;
    PolyField rf = PolyField::from_hermitian(nf.normalized);
    ScalarField phi = b.peak.field();
    auto annulus = sample_closure(rf, lb.beta_inner, samples, opt.seed + 11, lb.alpha_outer);
    lb.outer_max = -std::numeric_limits<double>::infinity();
    for (const auto& x : annulus) lb.outer_max = std::max(lb.outer_max, phi(x).value);
    if (annulus.empty() || !(lb.outer_max < 0.0)) {
        throw Error(ErrorKind::ConstructionFailed, "peak function is not negative on the outer annulus");
    }
    lb.N = 2.0 * lb.beta * lb.beta / -lb.outer_max;
    double alpha = std::min(0.18, 0.5 * lb.alpha_outer);
    for (int i = 0; i < 60; ++i, alpha *= 0.5) {
        auto inner = sample_closure(rf, alpha, samples / 4, opt.seed + 12, 1e-3 * alpha);
        double lo = 0.0;
        for (const auto& x : inner) lo = std::min(lo, phi(x).value);
        if (lo >= -lb.beta * lb.beta / lb.N) {
            lb.alpha = alpha;
            return lb;
        }
    }
    throw Error(ErrorKind::ConstructionFailed, "no alpha makes phi >= -beta^2/N on the inner ball");
}

struct MetricOptions {
    int disc_degree = 5;             // polynomial discs for J = J_st
    int boundary_samples = 96;       // sample of |zeta| = 1
    int interior_samples = 32;       // per interior circle
    int optimizer_evals = 1200;
    double optimizer_step = 0.25;
    int optimizer_restarts = 6;
    double relative_tol = 1e-3;      // bisection stop on r_hi / r_lo - 1
    double margin = 1e-6;            // relative to |rho(p)|
    int max_doublings = 24;
    double dist_constant = 1.0;      // C in K <= C |v| / dist(p)
    DiscSpec solver{};               // base settings for non-standard J
    std::shared_ptr<const PeakLowerBound> peak_lower;
};

namespace detail {

inline std::vector<std::complex<double>> feasibility_sample(const MetricOptions& o) {
    std::vector<std::complex<double>> z;
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int i = 0; i < o.boundary_samples; ++i) z.push_back(std::polar(1.0, two_pi * i / o.boundary_samples));
    for (double rad : {0.5, 0.85})
        for (int i = 0; i < o.interior_samples; ++i)
            z.push_back(std::polar(rad, two_pi * (i + 0.5) / o.interior_samples));
    return z;
}

/// u(zeta) = p + r (v zeta + sum_{k>=2} c_k zeta^k); x packs Re/Im of c_k for both coordinates.
inline CPoint poly_disc_point(const CPoint& p, const CPoint& v, double r, const std::vector<double>& x,
                              std::complex<double> z) {
    CPoint u{v[0] * z, v[1] * z};
    std::complex<double> pw = z;
    for (std::size_t k = 0; 4 * k < x.size(); ++k) {
        pw *= z;
        u[0] += std::complex<double>(x[4 * k], x[4 * k + 1]) * pw;
        u[1] += std::complex<double>(x[4 * k + 2], x[4 * k + 3]) * pw;
    }
    return {p[0] + r * u[0], p[1] + r * u[1]};
}

}  // namespace detail

/// Upper bound 1/r_max over discs through p with d0u(d/dx) = r v whose sampled image
/// stays in {rho < -margin |rho(p)|}; lower bound from the peak construction when given.
inline MetricEstimate estimate_metric(const MetricDomain& D, const Vec4& p, const Vec4& v, const MetricOptions& opt = {}) {
    MetricEstimate est;
    double rp = D.value(p);
    if (!(rp < 0.0)) throw Error(ErrorKind::InfeasibleQuery, "query point is not inside the domain");
    const double vn = norm4(v);
    if (vn == 0.0) {
        est.upper = 0.0;
        est.upper_method = "disc-found";
        return est;
    }
    est.boundary_distance = boundary_distance(D, p);
    const double cut = -opt.margin * std::abs(rp);
    const RealStructure& J = D.J();
    auto zs = detail::feasibility_sample(opt);
    const CPoint pc = to_complex_point(p), vc = to_complex_point(v);
    std::vector<double> warm(4 * std::max(0, opt.disc_degree - 1), 0.0);

    std::optional<DiscWitness> best;
    auto feasible = [&](double r) -> bool {
        ++est.feasibility_checks;
        DiscWitness w;
        w.radius = r;
        w.samples = zs.size();
        if (J.is_standard()) {
            auto obj = [&](const std::vector<double>& x) {
                double m = -std::numeric_limits<double>::infinity();
                for (auto z : zs) m = std::max(m, D.value(to_real_point(detail::poly_disc_point(pc, vc, r, x, z))));
                return m;
            };
            MinimizeResult res;
            res.x = warm;
            res.value = obj(warm);
            // The max-over-samples objective is not smooth, so the simplex collapses early;
            // restart from the best point with a shrinking step while it keeps improving.
            double step = opt.optimizer_step;
            for (int k = 0; k < opt.optimizer_restarts && !(res.value < cut) && !warm.empty(); ++k, step *= 0.5) {
                auto next = nelder_mead(obj, res.x, step, opt.optimizer_evals, cut * (1.0 + 1e-9));
                bool gain = next.value < res.value - 1e-3 * std::abs(rp);
                if (next.value < res.value) res = next;
                if (!gain) break;
            }
            if (!(res.value < cut)) return false;
            warm = res.x;
            w.max_rho = res.value;
            w.coefficients.push_back({r * vc[0], r * vc[1]});
            for (std::size_t k = 0; 4 * k < res.x.size(); ++k) {
                w.coefficients.push_back({r * std::complex<double>(res.x[4 * k], res.x[4 * k + 1]),
                                          r * std::complex<double>(res.x[4 * k + 2], res.x[4 * k + 3])});
            }
        } else {
            DiscSpec s = opt.solver;
            s.center = p;
            s.jet = {p, scale4(v, r)};
            s.radius_scale = 1.0;
            Disc d;
            try {
                d = solve(J, s);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::SolverDiverged || e.kind() == ErrorKind::PreconditionSmallness) return false;
                throw;
            }
            double m = -std::numeric_limits<double>::infinity();
            for (auto z : zs) m = std::max(m, D.value(d.eval_real(z)));
            for (auto z : disc_grid(s.monitor_grid_n)) m = std::max(m, D.value(d.eval_real(z)));
            if (!(m < cut)) return false;
            w.max_rho = m;
            w.residual = d.residual;
            w.samples += disc_grid(s.monitor_grid_n).size();
            w.solved = std::move(d);
        }
        best = std::move(w);
        return true;
    };

    // A linear disc inside the largest ball is a starting point for J_st.
    double r_lo = std::isfinite(est.boundary_distance) ? 0.999 * est.boundary_distance / vn : 1.0 / vn;
    bool ok = false;
    for (int i = 0; i < 40 && !ok; ++i) {
        ok = feasible(r_lo);
        if (!ok) r_lo *= 0.5;
    }
    if (ok) {
        double r_hi = 2.0 * r_lo;
        bool bounded = false;
        for (int i = 0; i < opt.max_doublings; ++i) {
            if (!feasible(r_hi)) {
                bounded = true;
                break;
            }
            r_lo = r_hi;
            r_hi *= 2.0;
        }
        if (bounded) {
            while (r_hi / r_lo - 1.0 > opt.relative_tol) {
                double mid = 0.5 * (r_lo + r_hi);
                (feasible(mid) ? r_lo : r_hi) = mid;
            }
            // The last feasible call may not be r_lo's witness; re-run to attach it.
            if (!best || best->radius != r_lo) feasible(r_lo);
        }
        est.upper = 1.0 / r_lo;
        est.upper_method = "disc-found";
        est.disc_witness = best;
    } else if (std::isfinite(est.boundary_distance)) {
        est.upper = opt.dist_constant * vn / est.boundary_distance;
        est.upper_method = "dist-bound";
    }

    if (opt.peak_lower) {
        const PeakLowerBound& lb = *opt.peak_lower;
        Vec4 q = lb.to_normal.apply(p);
        Vec4 w = matvec(lb.to_normal.jacobian_at(p), v);
        if (norm4(q) <= lb.alpha * lb.alpha) {
            try {
                LocalizationGadget g = build_localization(lb.J, q, lb.alpha * lb.alpha, lb.localization);
                est.log_lower = 0.5 * (-1.0 + g.B * lb.phi_tilde(q)) + std::log(norm4(w));
                est.lower = std::exp(est.log_lower);
                est.lower_method = "peak-bound";
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::SearchExhausted) throw;
            }
        }
    }
    if (!(est.lower <= est.upper)) {
        throw Error(ErrorKind::TaskError, "lower bound exceeds upper bound");
    }
    return est;
}

/// Upper bound for the integrated pseudodistance along a refined straight path.
struct DistanceReport {
    double value = 0.0;
    std::vector<double> rounds;  // path length bound per refinement round
};

/// Cheaper disc search for path integrals: one optimizer pass per feasibility check.
inline MetricOptions path_metric_options() {
    MetricOptions o;
    o.optimizer_restarts = 1;
    o.optimizer_evals = 800;
    return o;
}

inline DistanceReport integrated_distance(const MetricDomain& D, const Vec4& p, const Vec4& q, int rounds = 3,
                                          int initial_segments = 4,
                                          const MetricOptions& opt = path_metric_options()) {
    DistanceReport rep;
    if (!D.contains(p) || !D.contains(q)) throw Error(ErrorKind::InfeasibleQuery, "endpoints must be interior");
    if (norm4(sub4(q, p)) == 0.0) {
        rep.rounds.assign(rounds + 1, 0.0);
        return rep;
    }
    std::vector<Vec4> nodes;
    for (int i = 0; i <= initial_segments; ++i) nodes.push_back(add4(p, scale4(sub4(q, p), double(i) / initial_segments)));
    double best = std::numeric_limits<double>::infinity();
    for (int round = 0; round <= rounds; ++round) {
        double len = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            Vec4 mid = scale4(add4(nodes[i], nodes[i + 1]), 0.5);
            len += estimate_metric(D, mid, sub4(nodes[i + 1], nodes[i]), opt).upper;
        }
        best = std::min(best, len);
        rep.rounds.push_back(best);
        if (round == rounds) break;
        std::vector<Vec4> refined;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            refined.push_back(nodes[i]);
            refined.push_back(scale4(add4(nodes[i], nodes[i + 1]), 0.5));
        }
        refined.push_back(nodes.back());
        nodes = std::move(refined);
    }
    rep.value = best;
    return rep;
}

enum class ApproachFamily { normal, tangential, cone };

inline const char* approach_family_name(ApproachFamily f) {
    switch (f) {
        case ApproachFamily::normal: return "normal";
        case ApproachFamily::tangential: return "tangential";
        case ApproachFamily::cone: return "cone";
    }
    return "normal";
}

/// Approach to the boundary point 0 of {Re z2 + ... < 0} along -Re z2.
struct ApproachExperiment {
    ApproachFamily family = ApproachFamily::normal;
    double aperture = 0.5;         // cone: -Re z2 > aperture |z|
    std::vector<double> t;         // decreasing positive reals
    int fit_tail = 6;

    static std::vector<double> default_t() {
        std::vector<double> t;
        for (int j = 4; j <= 14; ++j) t.push_back(std::ldexp(1.0, -j));
        return t;
    }

    /// Cone points (c t, -t) with c half of the largest admissible slope.
    Vec4 point(double tj) const {
        if (family != ApproachFamily::cone) return {0.0, 0.0, -tj, 0.0};
        double c = 0.5 * std::sqrt(1.0 / (aperture * aperture) - 1.0);
        return {c * tj, 0.0, -tj, 0.0};
    }
};

struct ApproachRow {
    double t = 0.0;
    Vec4 p{};
    double rho = 0.0;
    double distance = 0.0;
    double upper_tangential = 0.0;  // v = e1
    double upper_normal = 0.0;      // v = e2
    double hopf_ratio = 0.0;        // |rho| / dist
};

struct FitReport {
    ApproachFamily family = ApproachFamily::normal;
    std::vector<ApproachRow> rows;
    LinearFit tangential;           // log upper vs log t on the tail
    LinearFit normal;
    double hopf_constant = 0.0;     // mean |rho| / dist over the tail
    double hopf_drift = 0.0;        // max relative deviation over the tail
};

inline FitReport approach_experiment(const MetricDomain& D, const ApproachExperiment& e, const MetricOptions& opt = {}) {
    FitReport rep;
    rep.family = e.family;
    if (e.family == ApproachFamily::cone && !(e.aperture > 0.0 && e.aperture < 1.0)) {
        throw Error(ErrorKind::InfeasibleQuery, "cone aperture must be in (0, 1)");
    }
    for (double tj : e.t) {
        ApproachRow row;
        row.t = tj;
        row.p = e.point(tj);
        row.rho = D.value(row.p);
        row.upper_tangential = estimate_metric(D, row.p, {1.0, 0.0, 0.0, 0.0}, opt).upper;
        auto en = estimate_metric(D, row.p, {0.0, 0.0, 1.0, 0.0}, opt);
        row.upper_normal = en.upper;
        row.distance = en.boundary_distance;
        row.hopf_ratio = std::abs(row.rho) / row.distance;
        rep.rows.push_back(row);
    }
    std::size_t n = rep.rows.size(), k = std::min<std::size_t>(n, std::size_t(std::max(2, e.fit_tail)));
    std::vector<double> lt, ltan, lnor;
    double sum = 0.0;
    for (std::size_t i = n - k; i < n; ++i) {
        lt.push_back(std::log(rep.rows[i].t));
        ltan.push_back(std::log(rep.rows[i].upper_tangential));
        lnor.push_back(std::log(rep.rows[i].upper_normal));
        sum += rep.rows[i].hopf_ratio;
    }
    if (k >= 2) {
        rep.tangential = fit_line(lt, ltan);
        rep.normal = fit_line(lt, lnor);
    }
    rep.hopf_constant = k ? sum / double(k) : 0.0;
    for (std::size_t i = n - k; i < n; ++i) {
        rep.hopf_drift = std::max(rep.hopf_drift, std::abs(rep.rows[i].hopf_ratio / rep.hopf_constant - 1.0));
    }
    return rep;
}

struct MetricQuery {
    Vec4 p{};
    Vec4 v{};
};

struct DecreasingRow {
    MetricQuery query;
    Vec4 image_point{};
    Vec4 image_vector{};
    MetricEstimate source;
    MetricEstimate target;
    double holomorphy_defect = 0.0;
    bool holds = false;  // upper(source) >= lower(target) - tol
};

struct DecreasingReport {
    std::vector<DecreasingRow> rows;
    bool all_hold = true;
};

/// f: source -> target must satisfy Df J_source = J_target(f) Df on the queries.
inline DecreasingReport decreasing_property_check(const Diffeomorphism<double>& f, const MetricDomain& source,
                                                  const MetricDomain& target, const std::vector<MetricQuery>& queries,
                                                  const MetricOptions& opt = {}, double tol = 1e-9) {
    DecreasingReport rep;
    for (const auto& q : queries) {
        DecreasingRow row;
        row.query = q;
        Mat4 df = f.jacobian_at(q.p);
        row.image_point = f.apply(q.p);
        row.image_vector = matvec(df, q.v);
        Mat4 a = matmul(df, source.J().eval(q.p)), b = matmul(target.J().eval(row.image_point), df);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) row.holomorphy_defect = std::max(row.holomorphy_defect, std::abs(a[i][j] - b[i][j]));
        if (row.holomorphy_defect > 1e-8) {
            throw Error(ErrorKind::NotHolomorphicWitness,
                        "holomorphy defect " + std::to_string(row.holomorphy_defect) + " at a query point");
        }
        row.source = estimate_metric(source, q.p, q.v, opt);
        row.target = estimate_metric(target, row.image_point, row.image_vector, opt);
        row.holds = row.source.upper >= row.target.lower - tol;
        rep.all_hold = rep.all_hold && row.holds;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace acxlab
