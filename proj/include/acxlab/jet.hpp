#pragma once

#include "acxlab/hermitian.hpp"
#include "acxlab/linalg.hpp"

#include <complex>
#include <functional>
#include <memory>

namespace acxlab {

/// Value, gradient and Hessian of a real function on R^4 at one point.
struct Jet2 {
    double value = 0.0;
    Vec4 grad{};
    Mat4 hess{};

    Jet2& operator+=(const Jet2& o) {
        value += o.value;
        for (int i = 0; i < 4; ++i) {
            grad[i] += o.grad[i];
            for (int j = 0; j < 4; ++j) hess[i][j] += o.hess[i][j];
        }
        return *this;
    }

    Jet2& operator*=(double s) {
        value *= s;
        for (int i = 0; i < 4; ++i) {
            grad[i] *= s;
            for (int j = 0; j < 4; ++j) hess[i][j] *= s;
        }
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
    friend Jet2 operator*(double s, Jet2 a) { return a *= s; }

    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        Jet2 r;
        r.value = a.value * b.value;
        for (int i = 0; i < 4; ++i) {
            r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
            for (int j = 0; j < 4; ++j) {
                r.hess[i][j] = a.hess[i][j] * b.value + a.value * b.hess[i][j] + a.grad[i] * b.grad[j] +
                               a.grad[j] * b.grad[i];
            }
        }
        return r;
    }

    /// f(this) for a scalar f with derivatives f1 = f', f2 = f''.
    Jet2 chain(double f0, double f1, double f2) const {
        Jet2 r;
        r.value = f0;
        for (int i = 0; i < 4; ++i) {
            r.grad[i] = f1 * grad[i];
            for (int j = 0; j < 4; ++j) r.hess[i][j] = f1 * hess[i][j] + f2 * grad[i] * grad[j];
        }
        return r;
    }

    static Jet2 constant(double c) {
        Jet2 r;
        r.value = c;
        return r;
    }
};

/// Scalar field with second-order jets.
using ScalarField = std::function<Jet2(const Vec4&)>;

/// Compiled value, gradient and Hessian of a real polynomial.
class PolyField {
public:
    PolyField() = default;
    template <class T>
    explicit PolyField(const Poly4<T>& p) {
        Poly4<double> d = p.template cast<double>();
        value_ = CompiledPoly(d);
        for (int i = 0; i < 4; ++i) {
            Poly4<double> di = d.derivative(i);
            grad_[i] = CompiledPoly(di);
            for (int j = 0; j < 4; ++j) hess_[i][j] = CompiledPoly(di.derivative(j));
        }
    }

    template <class T>
    static PolyField from_hermitian(const HermitianPolynomial<T>& h) {
        return PolyField(h.to_real());
    }

    double value(const Vec4& x) const { return value_(x); }

    Jet2 operator()(const Vec4& x) const {
        Jet2 r;
        r.value = value_(x);
        for (int i = 0; i < 4; ++i) {
            r.grad[i] = grad_[i](x);
            for (int j = i; j < 4; ++j) {
                r.hess[i][j] = hess_[i][j](x);
                r.hess[j][i] = r.hess[i][j];
            }
        }
        return r;
    }

    ScalarField field() const {
        auto self = std::make_shared<PolyField>(*this);
        return [self](const Vec4& x) { return (*self)(x); };
    }

private:
    CompiledPoly value_;
    std::array<CompiledPoly, 4> grad_;
    std::array<std::array<CompiledPoly, 4>, 4> hess_;
};

/// r^n G(theta) in the (x1, y1) plane, with G(theta) = sum_k c_k e^{ik theta}
/// (c_{-k} = conj c_k). Written as sum c_k z^a conj(z)^b with a = (n+k)/2,
/// b = (n-k)/2, which allows half-integer exponents for odd k.
class AngularField {
public:
    AngularField(int n, std::vector<std::complex<double>> modes) : n_(n), modes_(std::move(modes)) {}

    /// G from real Fourier data: a0 + sum_k (a_k cos k theta + b_k sin k theta).
    static AngularField from_fourier(int n, double a0, const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<std::complex<double>> modes(a.size() + 1);
        modes[0] = a0;
        for (std::size_t k = 1; k <= a.size(); ++k) modes[k] = std::complex<double>(a[k - 1], -b[k - 1]) * 0.5;
        return AngularField(n, std::move(modes));
    }

    int degree() const { return n_; }

    double angular(double theta) const {
        double s = modes_[0].real();
        for (std::size_t k = 1; k < modes_.size(); ++k) s += 2.0 * (modes_[k] * std::polar(1.0, double(k) * theta)).real();
        return s;
    }

    Jet2 operator()(const Vec4& x) const {
        const double r = std::hypot(x[0], x[1]);
        const double th = r > 0.0 ? std::atan2(x[1], x[0]) : 0.0;
        std::complex<double> fz(0.0), fzz(0.0);
        double fzzb = 0.0, val = 0.0;
        const double rn = std::pow(r, n_);
        const double rn1 = n_ >= 1 ? std::pow(r, n_ - 1) : 0.0;
        const double rn2 = n_ >= 2 ? std::pow(r, n_ - 2) : 0.0;
        for (int k = -int(modes_.size()) + 1; k < int(modes_.size()); ++k) {
            std::complex<double> c = k >= 0 ? modes_[k] : std::conj(modes_[-k]);
            const double a = 0.5 * (n_ + k), b = 0.5 * (n_ - k);
            val += (c * rn * std::polar(1.0, k * th)).real();
            fz += a * c * rn1 * std::polar(1.0, (k - 1) * th);
            fzz += a * (a - 1.0) * c * rn2 * std::polar(1.0, (k - 2) * th);
            fzzb += (a * b * c * rn2 * std::polar(1.0, k * th)).real();
        }
        Jet2 j;
        j.value = val;
        j.grad[0] = 2.0 * fz.real();
        j.grad[1] = -2.0 * fz.imag();
        j.hess[0][0] = 2.0 * fzz.real() + 2.0 * fzzb;
        j.hess[1][1] = -2.0 * fzz.real() + 2.0 * fzzb;
        j.hess[0][1] = j.hess[1][0] = -2.0 * fzz.imag();
        return j;
    }

    /// Laplacian in z1 divided by r^(n-2): n^2 G + G''.
    double normalized_laplacian(double theta) const {
        double s = double(n_) * n_ * modes_[0].real();
        for (std::size_t k = 1; k < modes_.size(); ++k) {
            s += 2.0 * (double(n_) * n_ - double(k) * k) * (modes_[k] * std::polar(1.0, double(k) * theta)).real();
        }
        return s;
    }

    const std::vector<std::complex<double>>& modes() const { return modes_; }

private:
    int n_;
    std::vector<std::complex<double>> modes_;
};

/// Jet of |x - c|^2.
inline Jet2 squared_distance_jet(const Vec4& x, const Vec4& c) {
    Jet2 j;
    for (int i = 0; i < 4; ++i) {
        double d = x[i] - c[i];
        j.value += d * d;
        j.grad[i] = 2.0 * d;
        j.hess[i][i] = 2.0;
    }
    return j;
}

}  // namespace acxlab
