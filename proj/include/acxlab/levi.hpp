#pragma once

#include "acxlab/hermitian.hpp"
#include "acxlab/jet.hpp"
#include "acxlab/structure.hpp"

#include <random>
#include <string>

namespace acxlab {

/// Orientation of d^c_J. disc_oracle matches Delta(rho o u)(0) for J-discs;
/// lemma_literal is its negative.
enum class LeviSign { disc_oracle, lemma_literal };

inline double sign_factor(LeviSign s) { return s == LeviSign::disc_oracle ? 1.0 : -1.0; }

/// 4 sum_{j,k} d^2 rho / dz_j dconj(z_k) (p) v_j conj(v_k), exact over the coefficient field.
template <class T>
T levi_standard(const HermitianPolynomial<T>& rho, const std::array<Complex<T>, 2>& p,
                const std::array<Complex<T>, 2>& v) {
    using C = Complex<T>;
    std::array<C, 4> at{p[0], conj(p[0]), p[1], conj(p[1])};
    C acc(T(0));
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            C d = rho.raw().derivative(2 * j).derivative(2 * k + 1).eval(at);
            acc += d * v[j] * conj(v[k]);
        }
    return T(acc.re * T(4));
}

inline double levi_standard(const RealHermitian& rho, const CPoint& p, const CPoint& v) {
    std::array<Complex<double>, 2> pc{Complex<double>(p[0].real(), p[0].imag()), Complex<double>(p[1].real(), p[1].imag())};
    std::array<Complex<double>, 2> vc{Complex<double>(v[0].real(), v[0].imag()), Complex<double>(v[1].real(), v[1].imag())};
    return levi_standard(rho, pc, vc);
}

/// Levi form from a jet of rho and the structure at the point:
/// v'Hv + (Jv)'H(Jv) + grad' (DJ[Jv] v - DJ[v] Jv).
inline double levi_from_jet(const Jet2& f, const Mat4& j, const std::array<Mat4, 4>& dj, const Vec4& v) {
    Vec4 jv = matvec(j, v);
    double q = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) q += f.hess[a][b] * (v[a] * v[b] + jv[a] * jv[b]);
    Mat4 djjv{}, djv{};
    for (int k = 0; k < 4; ++k) {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                djjv[a][b] += jv[k] * dj[k][a][b];
                djv[a][b] += v[k] * dj[k][a][b];
            }
    }
    Vec4 w1 = matvec(djjv, v), w2 = matvec(djv, jv);
    for (int a = 0; a < 4; ++a) q += f.grad[a] * (w1[a] - w2[a]);
    return q;
}

template <class T>
std::array<Mat4, 4> structure_derivatives(const AlmostComplexStructure<T>& J, const Vec4& p) {
    return {J.derivative(0, p), J.derivative(1, p), J.derivative(2, p), J.derivative(3, p)};
}

/// Floating Levi form of an arbitrary jet field.
template <class T>
double levi_general(const ScalarField& rho, const AlmostComplexStructure<T>& J, const Vec4& p, const Vec4& v,
                    LeviSign sign = LeviSign::disc_oracle) {
    Mat4 j = J.eval(p);
    Mat4 sq = matmul(j, j);
    for (int i = 0; i < 4; ++i) sq[i][i] += 1.0;
    if (max_abs_entry(sq) > 1e-8) throw Error(ErrorKind::StructureInvalidAtPoint, "J^2 != -Id at the query point");
    return sign_factor(sign) * levi_from_jet(rho(p), j, structure_derivatives(J, p), v);
}

/// Exact Levi form of a polynomial rho at a rational point and direction.
template <class T>
T levi_general_exact(const HermitianPolynomial<T>& rho, const AlmostComplexStructure<T>& J, const std::array<T, 4>& p,
                     const std::array<T, 4>& v, LeviSign sign = LeviSign::disc_oracle) {
    Poly4<T> f = rho.to_real();
    Mat4T<T> j = J.eval_exact(p);
    {
        Mat4T<T> sq = matmul(j, j);
        for (int i = 0; i < 4; ++i) sq[i][i] += T(1);
        for (const auto& row : sq)
            for (const auto& x : row)
                if (magnitude(x) > 1e-12) throw Error(ErrorKind::StructureInvalidAtPoint, "J^2 != -Id at the query point");
    }
    std::array<T, 4> grad;
    Mat4T<T> hess;
    for (int a = 0; a < 4; ++a) {
        Poly4<T> da = f.derivative(a);
        grad[a] = da.eval(p);
        for (int b = 0; b < 4; ++b) hess[a][b] = da.derivative(b).eval(p);
    }
    std::array<T, 4> jv = matvec(j, v);
    T q(0);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) q += hess[a][b] * (v[a] * v[b] + jv[a] * jv[b]);
    if (!J.is_standard()) {
        Mat4T<T> djjv, djv;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                djjv[a][b] = T(0);
                djv[a][b] = T(0);
            }
        for (int k = 0; k < 4; ++k) {
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    T d = J.entry(a, b).derivative(k).eval(p);
                    djjv[a][b] += jv[k] * d;
                    djv[a][b] += v[k] * d;
                }
        }
        std::array<T, 4> w1 = matvec(djjv, v), w2 = matvec(djv, jv);
        for (int a = 0; a < 4; ++a) q += grad[a] * (w1[a] - w2[a]);
    }
    if (sign == LeviSign::lemma_literal) q = -q;
    return q;
}

enum class PshVerdict { psh_on_sample, not_psh, inconclusive };

inline const char* psh_verdict_name(PshVerdict v) {
    switch (v) {
        case PshVerdict::psh_on_sample: return "psh-on-sample";
        case PshVerdict::not_psh: return "not-psh";
        case PshVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct PshReport {
    double min_value = 0.0;
    Vec4 witness_point{};
    Vec4 witness_direction{};
    PshVerdict verdict = PshVerdict::inconclusive;
    std::size_t points = 0;
    std::size_t directions = 0;
};

struct PshOptions {
    int directions = 64;
    std::uint64_t seed = 1;
    double psh_tol = 1e-9;      // min >= -psh_tol: psh on sample
    double witness_tol = 1e-6;  // min < -witness_tol: not psh
    LeviSign sign = LeviSign::disc_oracle;
};

/// Unit directions: the 4 axes followed by uniform samples on S^3.
inline std::vector<Vec4> sample_directions(int count, std::uint64_t seed) {
    std::vector<Vec4> dirs;
    for (int i = 0; i < 4; ++i) {
        Vec4 e{};
        e[i] = 1.0;
        dirs.push_back(e);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    while (int(dirs.size()) < count + 4) {
        Vec4 v{n(rng), n(rng), n(rng), n(rng)};
        double len = norm4(v);
        if (len < 1e-12) continue;
        dirs.push_back(scale4(v, 1.0 / len));
    }
    return dirs;
}

/// Minimum Levi value over points x directions.
template <class T>
PshReport psh_check(const ScalarField& rho, const AlmostComplexStructure<T>& J, const SampleGrid& region,
                    const PshOptions& opt = {}) {
    PshReport rep;
    rep.points = region.points.size();
    std::vector<Vec4> dirs = sample_directions(opt.directions, opt.seed);
    rep.directions = dirs.size();
    rep.min_value = std::numeric_limits<double>::infinity();
    const double s = sign_factor(opt.sign);
    for (const auto& p : region.points) {
        Jet2 f = rho(p);
        Mat4 j = J.eval(p);
        auto dj = structure_derivatives(J, p);
        for (const auto& v : dirs) {
            double l = s * levi_from_jet(f, j, dj, v);
            if (l < rep.min_value) {
                rep.min_value = l;
                rep.witness_point = p;
                rep.witness_direction = v;
            }
        }
    }
    if (region.points.empty()) {
        rep.min_value = 0.0;
        rep.verdict = PshVerdict::inconclusive;
    } else if (rep.min_value >= -opt.psh_tol) {
        rep.verdict = PshVerdict::psh_on_sample;
    } else if (rep.min_value < -opt.witness_tol) {
        rep.verdict = PshVerdict::not_psh;
    } else {
        rep.verdict = PshVerdict::inconclusive;
    }
    return rep;
}

template <class T, class U>
PshReport psh_check(const HermitianPolynomial<T>& rho, const AlmostComplexStructure<U>& J, const SampleGrid& region,
                    const PshOptions& opt = {}) {
    return psh_check(PolyField::from_hermitian(rho).field(), J, region, opt);
}

}  // namespace acxlab
