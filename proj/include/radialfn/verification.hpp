#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "closed_forms.hpp"
#include "gauss_jacobi.hpp"
#include "parallel.hpp"
#include "radial_recursion.hpp"
#include "types.hpp"

namespace radialfn {

struct ResidualReport {
    double residual = 0.0;          // relative
    double h = 0.0;                 // step used for the reported residual
    double richardson_order = 0.0;  // from h, h/2, h/4; NaN when the residual vanishes on the whole ladder
    bool passed = false;
    std::string context;
    double beta = 0.0;
    int n = 0;
    double tolerance = 0.0;  // threshold applied to residual
};

enum class EvaluatorKind { recursion, closed_form };

using Evaluator = std::function<RadialValue(const Spectrum&, const Spectrum&)>;
using ScalarField = std::function<complex(const Spectrum&)>;

inline Evaluator make_evaluator(DysonIndex beta, EvaluatorKind kind, QuadratureConfig cfg = {}) {
    if (kind == EvaluatorKind::closed_form)
        return [beta](const Spectrum& x, const Spectrum& k) { return closed_form(beta, x, k); };
    return [beta, cfg](const Spectrum& x, const Spectrum& k) { return phi_radial(beta, x, k, cfg); };
}

inline double default_step(const Spectrum& x) { return 1e-3 * std::min(x.min_gap(), 1.0); }

namespace detail {

inline Spectrum displaced(const Spectrum& x, int n, double delta) {
    std::vector<double> v = x.vec();
    v[n] += delta;
    return Spectrum(std::move(v));
}

struct Stencil {
    complex f0;
    std::vector<complex> d1, d2;
};

// Central first and second differences in every coordinate; 2N + 1 evaluations.
inline Stencil central_stencil(const ScalarField& f, const Spectrum& x, double h) {
    const int n = x.n();
    std::vector<complex> vals(2 * n + 1);
    parallel_for(vals.size(), [&](std::size_t i) {
        if (i == 0) {
            vals[0] = f(x);
            return;
        }
        const int c = static_cast<int>((i - 1) / 2);
        vals[i] = f(displaced(x, c, (i % 2 == 1) ? h : -h));
    });
    Stencil s;
    s.f0 = vals[0];
    s.d1.resize(n);
    s.d2.resize(n);
    for (int c = 0; c < n; ++c) {
        const complex fp = vals[2 * c + 1], fm = vals[2 * c + 2];
        s.d1[c] = (fp - fm) / (2.0 * h);
        s.d2[c] = (fp - 2.0 * s.f0 + fm) / (h * h);
    }
    return s;
}

inline void require_step(const Spectrum& x, double h) {
    if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    if (x.n() >= 2 && !(h < x.min_gap() / 10.0))
        throw DomainError("finite-difference stencil would approach an eigenvalue collision (h >= min_gap/10)");
}

inline double richardson(const std::array<double, 3>& r) {
    const double num = std::abs(r[0] - r[1]), den = std::abs(r[1] - r[2]);
    if (num == 0.0 && den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::log2(num / den);
}

}  // namespace detail

/// Central-difference radial Laplacean
///   sum_n d^2 f/dx_n^2 + sum_{n<m} beta/(x_n - x_m) (df/dx_n - df/dx_m).
inline complex radial_laplacean(DysonIndex beta, const ScalarField& f, const Spectrum& x, double h) {
    detail::require_step(x, h);
    const auto s = detail::central_stencil(f, x, h);
    complex lap = 0.0;
    for (int n = 0; n < x.n(); ++n) lap += s.d2[n];
    for (int n = 0; n < x.n(); ++n)
        for (int m = n + 1; m < x.n(); ++m) lap += beta.value() / (x[n] - x[m]) * (s.d1[n] - s.d1[m]);
    return lap;
}

/// Relative residual of the eigenvalue equation Delta_x Phi = -(sum k^2) Phi.
///
/// With the recursion the node count is frozen at the value reached at the
/// base point, so every stencil point uses the same (smooth in x) rule.
inline ResidualReport pde_residual(DysonIndex beta, const Spectrum& x, const Spectrum& k, EvaluatorKind kind,
                                   double h = 0.0, QuadratureConfig cfg = {}) {
    require_same_size(x, k);
    if (h == 0.0) h = default_step(x);
    detail::require_step(x, h);
    const double k2 = k.sum_squares();
    if (!(k2 > 0.0)) throw InvalidArgument("pde_residual requires a nonzero k");

    Evaluator ev;
    double quad_rel = 0.0;
    if (kind == EvaluatorKind::recursion) {
        const RadialValue base = phi_radial(beta, x, k, cfg);
        quad_rel = base.abs_err_est / std::abs(base.value);
        QuadratureConfig frozen = cfg;
        frozen.refine = false;
        frozen.auto_nodes = false;
        frozen.nodes_per_variable = std::max(base.nodes_used / 2, 4);
        frozen.threads = 1;
        ev = make_evaluator(beta, kind, frozen);
    } else {
        ev = make_evaluator(beta, kind);
    }
    const ScalarField f = [&](const Spectrum& y) { return ev(y, k).value; };

    std::array<double, 3> res{};
    for (int i = 0; i < 3; ++i) {
        const double hi = h / std::pow(2.0, i);
        const auto s = detail::central_stencil(f, x, hi);
        complex lap = 0.0;
        for (int n = 0; n < x.n(); ++n) lap += s.d2[n];
        for (int n = 0; n < x.n(); ++n)
            for (int m = n + 1; m < x.n(); ++m) lap += beta.value() / (x[n] - x[m]) * (s.d1[n] - s.d1[m]);
        res[i] = std::abs(lap + k2 * s.f0) / (k2 * std::abs(s.f0));
    }

    ResidualReport r;
    r.context = kind == EvaluatorKind::recursion ? "pde/recursion" : "pde/closed_form";
    r.beta = beta.value();
    r.n = x.n();
    r.h = h;
    r.residual = res[0];
    r.richardson_order = detail::richardson(res);
    r.tolerance = kind == EvaluatorKind::recursion ? std::max(1e-3, 10.0 * quad_rel) : std::max(1e-6, h * h);
    r.passed = r.residual <= r.tolerance;
    return r;
}

/// Residual of the Hankel-operator equation L W = 0 with
///   L = sum d^2/dx_n^2 + 2i sum k_omega(n) d/dx_n - beta(beta/2 - 1) sum_{n<m} 1/(x_n - x_m)^2,
/// normalized by the sum of the magnitudes of the three terms.
inline ResidualReport hankel_residual(DysonIndex beta, const Spectrum& x, const Spectrum& k, const Permutation& omega,
                                      double h = 1e-3, double tolerance = -1.0) {
    require_same_size(x, k);
    detail::require_step(x, h);
    const int n = x.n();
    if (omega.image.size() != static_cast<std::size_t>(n)) throw InvalidArgument("omega has the wrong size");
    const ScalarField w = [&](const Spectrum& y) { return hankel_w(beta, y.values(), k.values(), omega); };

    double coupling = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) coupling += 1.0 / ((x[a] - x[b]) * (x[a] - x[b]));
    coupling *= beta.value() * (0.5 * beta.value() - 1.0);

    std::array<double, 3> res{};
    for (int i = 0; i < 3; ++i) {
        const auto s = detail::central_stencil(w, x, h / std::pow(2.0, i));
        complex t1 = 0.0, t2 = 0.0;
        for (int a = 0; a < n; ++a) {
            t1 += s.d2[a];
            t2 += complex(0.0, 2.0 * k[omega.image[a]]) * s.d1[a];
        }
        const complex t3 = -coupling * s.f0;
        const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
        res[i] = scale == 0.0 ? 0.0 : std::abs(t1 + t2 + t3) / scale;
    }

    ResidualReport r;
    r.context = "hankel";
    r.beta = beta.value();
    r.n = n;
    r.h = h;
    r.residual = res[0];
    r.richardson_order = detail::richardson(res);
    r.tolerance = tolerance >= 0.0 ? tolerance : (n <= 3 ? 1e-6 : 1e-5);
    r.passed = r.residual <= r.tolerance;
    return r;
}

/// |Phi(x, k) - Phi(k, x)| / max |Phi|, each ordering evaluated independently.
inline ResidualReport check_symmetry(DysonIndex beta, const Spectrum& x, const Spectrum& k, const Evaluator& ev) {
    const RadialValue a = ev(x, k);
    const RadialValue b = ev(k, x);
    const double scale = std::max(std::abs(a.value), std::abs(b.value));
    ResidualReport r;
    r.context = "symmetry";
    r.beta = beta.value();
    r.n = x.n();
    r.residual = scale == 0.0 ? 0.0 : std::abs(a.value - b.value) / scale;
    r.richardson_order = std::numeric_limits<double>::quiet_NaN();
    r.tolerance = scale == 0.0 ? 0.0 : (a.abs_err_est + b.abs_err_est) / scale + 1e-12;
    r.passed = r.residual <= r.tolerance;
    return r;
}

/// |Phi(x + c, k) - exp(i c sum k) Phi(x, k)| / |Phi(x, k)|.
inline ResidualReport check_translation(DysonIndex beta, const Spectrum& x, const Spectrum& k, double c,
                                        const Evaluator& ev) {
    const RadialValue a = ev(x, k);
    const RadialValue b = ev(x.shifted(c), k);
    const complex expected = std::exp(complex(0.0, c * k.sum())) * a.value;
    const double scale = std::abs(a.value);
    ResidualReport r;
    r.context = "translation";
    r.beta = beta.value();
    r.n = x.n();
    r.residual = std::abs(b.value - expected) / scale;
    r.richardson_order = std::numeric_limits<double>::quiet_NaN();
    r.tolerance = (a.abs_err_est + b.abs_err_est) / scale + 1e-12;
    r.passed = r.residual <= r.tolerance;
    return r;
}

/// Integral of gt_measure_density over the interlacing box by a product
/// Gauss-Jacobi rule of the given order (the density divided by the weight).
inline double measure_integral(DysonIndex beta, const Spectrum& x, int nodes = 24) {
    const int n = x.n();
    if (n < 2) throw InvalidArgument("measure_integral requires N >= 2");
    const double a = beta.jacobi_exponent();
    const auto& rule = cached_gauss_jacobi(nodes, a, a);
    const int dims = n - 1;
    std::vector<double> partial(nodes);
    parallel_for(static_cast<std::size_t>(nodes), [&](std::size_t i0) {
        std::vector<int> idx(dims, 0);
        idx[0] = static_cast<int>(i0);
        std::vector<double> xp(dims);
        double acc = 0.0;
        while (true) {
            double w = 1.0;
            for (int j = 0; j < dims; ++j) {
                const double half = 0.5 * (x[j + 1] - x[j]);
                const double t = rule.nodes[idx[j]];
                xp[j] = x[j] + half * (1.0 + t);
                w *= rule.weights[idx[j]] * half / std::pow(1.0 - t * t, a);
            }
            acc += w * gt_measure_density(beta, x, xp);
            int j = dims - 1;
            while (j >= 1 && ++idx[j] == nodes) idx[j--] = 0;
            if (j < 1) break;
        }
        partial[i0] = acc;
    });
    return pairwise_sum(partial);
}

inline ResidualReport check_measure(DysonIndex beta, const Spectrum& x, double tolerance = 1e-8) {
    ResidualReport r;
    r.context = "measure";
    r.beta = beta.value();
    r.n = x.n();
    r.residual = std::abs(measure_integral(beta, x) - 1.0);
    r.richardson_order = std::numeric_limits<double>::quiet_NaN();
    r.tolerance = tolerance;
    r.passed = r.residual <= tolerance;
    return r;
}

/// Recursion against the closed form for (beta, N) where one exists.
inline ResidualReport check_crosscheck(DysonIndex beta, const Spectrum& x, const Spectrum& k, QuadratureConfig cfg = {}) {
    const RadialValue a = phi_radial(beta, x, k, cfg);
    const RadialValue b = closed_form(beta, x, k);
    const double scale = std::abs(b.value);
    ResidualReport r;
    r.context = "crosscheck";
    r.beta = beta.value();
    r.n = x.n();
    r.residual = std::abs(a.value - b.value) / scale;
    r.richardson_order = std::numeric_limits<double>::quiet_NaN();
    r.tolerance = std::max(1e-6, (a.abs_err_est + b.abs_err_est) / scale);
    r.passed = r.residual <= r.tolerance;
    return r;
}

}  // namespace radialfn
