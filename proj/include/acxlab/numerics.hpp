#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace acxlab {

struct MinimizeResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
};

/// Nelder-Mead (GSL nmsimplex2). Stops at max_evals, when the simplex size drops
/// below size_tol, or as soon as a value <= stop_below is seen.
inline MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                  double step, int max_evals, double stop_below = -std::numeric_limits<double>::infinity(),
                                  double size_tol = 1e-10) {
    MinimizeResult best;
    best.x = x0;
    const std::size_t n = x0.size();
    struct Ctx {
        const std::function<double(const std::vector<double>&)>* f;
        MinimizeResult* best;
        std::vector<double> buf;
    } ctx{&f, &best, std::vector<double>(n)};
    auto wrap = [](const gsl_vector* v, void* p) -> double {
        auto* c = static_cast<Ctx*>(p);
        for (std::size_t i = 0; i < c->buf.size(); ++i) c->buf[i] = gsl_vector_get(v, i);
        double y = (*c->f)(c->buf);
        ++c->best->evaluations;
        if (y < c->best->value) {
            c->best->value = y;
            c->best->x = c->buf;
        }
        return std::isfinite(y) ? y : 1e300;
    };
    if (n == 0) {
        best.value = f(x0);
        best.evaluations = 1;
        return best;
    }
    gsl_multimin_function fn{wrap, n, &ctx};
    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* ss = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, x0[i]);
    gsl_vector_set_all(ss, step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &fn, x, ss);
    while (best.evaluations < max_evals && best.value > stop_below) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS) break;
    }
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(ss);
    gsl_vector_free(x);
    return best;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square
};

/// Least-squares line y = intercept + slope x.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit r;
    double c00, c01, c11, sumsq;
    gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &r.intercept, &r.slope, &c00, &c01, &c11, &sumsq);
    r.residual = x.empty() ? 0.0 : std::sqrt(sumsq / double(x.size()));
    return r;
}

}  // namespace acxlab
