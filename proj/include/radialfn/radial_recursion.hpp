#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "closed_forms.hpp"
#include "constants.hpp"
#include "gauss_jacobi.hpp"
#include "parallel.hpp"
#include "types.hpp"
#include "vector_bessel.hpp"

namespace radialfn {

/// Where the recursion stops integrating and switches to a closed form.
enum class Leaf {
    quadrature,  // integrate all the way down to N = 1
    bessel,      // N = 2 via chi^(beta+1)
    symplectic,  // as bessel, plus the N = 3 symplectic sum when beta = 4
};

struct QuadratureConfig {
    int nodes_per_variable = 12;  // base Gauss-Jacobi order per integration variable
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;       // floor for values near zero
    int max_depth = 3;            // node doublings allowed beyond the first estimate
    bool refine = true;           // false: one M / 2M pass, no accuracy exception
    bool auto_nodes = true;       // raise the base order with the phase range
    Leaf leaf = Leaf::bessel;
    double degeneracy_floor = 1e-8;  // relative to the spectral diameter
    unsigned threads = 0;            // 0: worker_count()

    static double jacobi_exponent(DysonIndex beta) { return beta.jacobi_exponent(); }
};

/// Radial Gelfand-Tzetlin pattern: level 0 is x, level n has N - n entries and
/// interlaces level n - 1.
struct GTCone {
    std::vector<std::vector<double>> levels;

    const std::vector<double>& base() const { return levels.front(); }

    bool interlaces() const {
        for (std::size_t n = 1; n < levels.size(); ++n) {
            const auto& up = levels[n - 1];
            const auto& lo = levels[n];
            if (lo.size() + 1 != up.size()) return false;
            for (std::size_t m = 0; m < lo.size(); ++m)
                if (!(up[m] <= lo[m] && lo[m] <= up[m + 1])) return false;
        }
        return true;
    }
};

namespace detail {

constexpr double kPositivityFloor = 1e-300;

/// Rule on [0, 1] for integrals of f(u) (u (1 - u))^a du.
struct UnitRule {
    std::vector<double> u, w;
    std::size_t size() const { return u.size(); }
};

inline UnitRule plain_unit_rule(int m, double a) {
    const auto& gj = cached_gauss_jacobi(m, a, a);
    UnitRule r;
    r.u.resize(m);
    r.w.resize(m);
    const double scale = std::pow(2.0, -(2.0 * a + 1.0));
    for (int i = 0; i < m; ++i) {
        r.u[i] = 0.5 * (1.0 + gj.nodes[i]);
        r.w[i] = gj.weights[i] * scale;
    }
    return r;
}

inline const UnitRule& cached_plain_unit_rule(int m, double a) {
    using Key = std::pair<int, double>;
    thread_local std::map<Key, std::unique_ptr<UnitRule>> cache;
    auto& slot = cache[Key{m, a}];
    if (!slot) slot = std::make_unique<UnitRule>(plain_unit_rule(m, a));
    return *slot;
}

// Smooth factors are non-analytic at points outside [0, 1] when a is not a
// non-negative integer; grading is needed only then.
inline bool needs_grading(double a) { return a < 0.0 || a != std::floor(a); }

constexpr double kGradingRatio = 0.5;

/// Composite rule on [0, 1] graded geometrically toward an endpoint whenever an
/// outside singularity sits closer than kGradingRatio (relative distance rho).
/// Every piece then sees its nearest singularity at least one piece length away.
inline UnitRule graded_unit_rule(int m, double a, double rho_left, double rho_right) {
    const bool gl = rho_left < kGradingRatio, gr = rho_right < kGradingRatio;
    if (!gl && !gr) return plain_unit_rule(m, a);

    std::vector<double> cuts{0.0};
    if (gl) {
        std::vector<double> left;
        for (double p = 0.5; ; p *= 0.5) {
            left.push_back(p);
            if (p <= rho_left || p < 1e-15) break;
        }
        cuts.insert(cuts.end(), left.rbegin(), left.rend());
    }
    if (gr) {
        for (double p = 0.5; ; p *= 0.5) {
            if (!(gl && p == 0.5)) cuts.push_back(1.0 - p);
            if (p <= rho_right || p < 1e-15) break;
        }
    }
    cuts.push_back(1.0);

    const int mp = std::max(4, (m + 1) / 2);
    UnitRule r;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double c = cuts[p], d = cuts[p + 1], h = 0.5 * (d - c);
        const bool at0 = c == 0.0, at1 = d == 1.0;
        const auto& q = cached_gauss_jacobi(mp, at1 ? a : 0.0, at0 ? a : 0.0);
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double t = q.nodes[i];
            const double u = c + h * (1.0 + t);
            double w = q.weights[i] * h;
            if (at0) w *= std::pow(h, a); else w *= std::pow(u, a);
            if (at1) w *= std::pow(h, a); else w *= std::pow(1.0 - u, a);
            r.u.push_back(u);
            r.w.push_back(w);
        }
    }
    return r;
}

/// Per-level quadrature geometry for a fixed upper spectrum x (ascending).
///
/// With x'_j = x_j + L_j u_j the interlacing density factors as
///   prod_j (u_j (1 - u_j))^a du_j * prefactor * |Delta(x')| * prod_nonadjacent |x_m - x'_j|^a
/// with prefactor = C_N / prod_{j >= i+2} |x_j - x_i|^{beta-1}. Only non-adjacent
/// gaps appear, so tiny adjacent gaps (inner levels near a corner of the box)
/// cancel analytically.
struct LevelGeometry {
    int n = 0;
    double a = 0.0;
    double prefactor = 1.0;
    std::vector<double> lo, len;

    LevelGeometry(std::span<const double> x, DysonIndex beta) : n(static_cast<int>(x.size())) {
        a = beta.jacobi_exponent();
        double denom = 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 2; j < n; ++j) denom *= x[j] - x[i];
        prefactor = measure_norm(beta, n) / std::pow(denom, beta.value() - 1.0);
        lo.resize(n - 1);
        len.resize(n - 1);
        for (int j = 0; j + 1 < n; ++j) {
            lo[j] = x[j];
            len[j] = x[j + 1] - x[j];
        }
    }

    double point(int j, double u) const { return lo[j] + len[j] * u; }

    // Relative distances to the nearest outside singular points of variable j.
    double rho_left(int j) const { return j >= 1 ? len[j - 1] / len[j] : kInf; }
    double rho_right(int j) const { return j + 2 < n ? len[j + 1] / len[j] : kInf; }

    // Density at x' divided by the unit-rule weights.
    double smooth_factor(std::span<const double> x, std::span<const double> xp) const {
        double f = prefactor;
        for (std::size_t i = 0; i < xp.size(); ++i)
            for (std::size_t j = i + 1; j < xp.size(); ++j) f *= xp[j] - xp[i];
        if (a != 0.0) {
            double cross = 1.0;
            for (int j = 0; j + 1 < n; ++j)
                for (int m = 0; m < n; ++m) {
                    if (m == j || m == j + 1) continue;
                    cross *= std::max(std::abs(x[m] - xp[j]), kPositivityFloor);
                }
            f *= std::pow(cross, a);
        }
        return f;
    }

    static constexpr double kInf = std::numeric_limits<double>::infinity();
};

/// Nested quadrature for the recursion at a fixed node order.
class RecursionEngine {
public:
    RecursionEngine(DysonIndex beta, int nodes, Leaf leaf)
        : beta_(beta), nodes_(nodes), leaf_(leaf), graded_(needs_grading(beta.jacobi_exponent())) {}

    complex eval(std::span<const double> x, std::span<const double> k, unsigned threads = 1) const {
        const int n = static_cast<int>(x.size());
        if (n == 1) return std::exp(complex(0.0, x[0] * k[0]));
        if (n == 2 && leaf_ != Leaf::quadrature) {
            const double s = 0.5 * (x[0] + x[1]) * (k[0] + k[1]);
            const double z = 0.5 * (x[0] - x[1]) * (k[0] - k[1]);
            return std::exp(complex(0.0, s)) * chi(beta_.value() + 1.0, z);
        }
        if (n == 3 && leaf_ == Leaf::symplectic && beta_.value() == 4.0) {
            Spectrum xs(std::vector<double>(x.begin(), x.end()));
            Spectrum ks(std::vector<double>(k.begin(), k.end()));
            if (!xs.is_degenerate() && !ks.is_degenerate()) return phi3_usp(xs, ks).value;
        }
        return integrate_level(x, k, threads);
    }

private:
    complex integrate_level(std::span<const double> x, std::span<const double> k, unsigned threads) const {
        const int n = static_cast<int>(x.size());
        const int dims = n - 1;
        const LevelGeometry geo(x, beta_);
        const double a = geo.a;

        std::vector<UnitRule> owned(dims);
        std::vector<const UnitRule*> rules(dims);
        for (int j = 0; j < dims; ++j) {
            if (graded_ && std::min(geo.rho_left(j), geo.rho_right(j)) < kGradingRatio) {
                owned[j] = graded_unit_rule(nodes_, a, geo.rho_left(j), geo.rho_right(j));
                rules[j] = &owned[j];
            } else {
                rules[j] = &cached_plain_unit_rule(nodes_, a);
            }
        }

        const double kn = k[n - 1];
        const auto kt = k.first(n - 1);
        double sum_x = 0.0;
        for (double v : x) sum_x += v;

        // Partial sums per first-variable node; combined in fixed order.
        std::vector<complex> partial(rules[0]->size());
        auto body = [&](std::size_t i0) {
            std::vector<double> xp(dims);
            std::vector<std::size_t> idx(dims, 0);
            idx[0] = i0;
            complex acc = 0.0;
            while (true) {
                double wprod = 1.0, sum_xp = 0.0;
                for (int j = 0; j < dims; ++j) {
                    xp[j] = geo.point(j, rules[j]->u[idx[j]]);
                    wprod *= rules[j]->w[idx[j]];
                    sum_xp += xp[j];
                }
                const double dens = wprod * geo.smooth_factor(x, xp);
                const complex inner = eval(xp, kt, 1);
                acc += dens * std::exp(complex(0.0, (sum_x - sum_xp) * kn)) * inner;
                int j = dims - 1;
                while (j >= 1 && ++idx[j] == rules[j]->size()) idx[j--] = 0;
                if (j < 1) break;
            }
            partial[i0] = acc;
        };
        parallel_for(partial.size(), body, threads);
        return pairwise_sum(partial);
    }

    DysonIndex beta_;
    int nodes_;
    Leaf leaf_;
    bool graded_;
};

inline void check_oscillation(const Spectrum& x, const Spectrum& k, RadialValue& r) {
    if (x.max_abs() * k.max_abs() > 40.0)
        r.warnings.emplace_back(
            "oscillation guard: max|x|*max|k| > 40; node counts must grow linearly with the phase range");
}

inline int base_nodes(const QuadratureConfig& cfg, const Spectrum& x, const Spectrum& k) {
    int m = std::max(cfg.nodes_per_variable, 4);
    if (cfg.auto_nodes) m = std::max(m, static_cast<int>(std::ceil(0.5 * x.diameter() * k.diameter())) + 8);
    return m;
}

inline void validate_inputs(const Spectrum& x, const Spectrum& k, const QuadratureConfig& cfg) {
    require_same_size(x, k);
    if (cfg.nodes_per_variable < 4) throw InvalidArgument("nodes_per_variable must be >= 4");
    if (!(cfg.rel_tol > 0.0)) throw InvalidArgument("rel_tol must be > 0");
    if (x.n() >= 2 && x.is_degenerate(cfg.degeneracy_floor))
        throw DegeneracyError("x spectrum is degenerate (min gap below the degeneracy floor)");
}

// Shared M / 2M doubling driver.
template <class Eval>
RadialValue refine_by_doubling(int m0, const QuadratureConfig& cfg, Method method, Eval&& eval_at) {
    constexpr double kRoundingFloor = 128 * 2.220446049250313e-16;
    int m = m0;
    complex coarse = eval_at(m);
    complex fine = eval_at(2 * m);
    double err = std::abs(fine - coarse) + kRoundingFloor * std::max(1.0, std::abs(fine));
    auto within = [&] { return err <= std::max(cfg.rel_tol * std::abs(fine), cfg.abs_tol); };
    for (int depth = 0; cfg.refine && !within() && depth < cfg.max_depth; ++depth) {
        m *= 2;
        coarse = fine;
        fine = eval_at(2 * m);
        err = std::abs(fine - coarse) + kRoundingFloor * std::max(1.0, std::abs(fine));
    }
    RadialValue r;
    r.value = fine;
    r.abs_err_est = err;
    r.method = method;
    r.nodes_used = 2 * m;
    if (cfg.refine && !within()) {
        std::ostringstream os;
        os << "accuracy not reached: error estimate " << err << " after " << cfg.max_depth << " doublings";
        throw AccuracyNotReached(os.str(), r);
    }
    return r;
}

}  // namespace detail

/// Density of the interlacing measure with respect to d[x'], normalized to
/// integrate to one over the box x_n <= x'_n <= x_{n+1}:
///   Gamma(N beta/2)/Gamma(beta/2)^N |Delta(x')| / |Delta(x)|^{beta-1} prod_{n,m} |x_n - x'_m|^{(beta-2)/2}.
/// This equals g_norm(beta, N) / 2^{N-1} times the remaining factors.
inline double gt_measure_density(DysonIndex beta, const Spectrum& x, std::span<const double> xp,
                                 double degeneracy_floor = 1e-8) {
    const int n = x.n();
    if (n < 2) throw InvalidArgument("gt_measure_density requires N >= 2");
    if (static_cast<int>(xp.size()) != n - 1) throw InvalidArgument("x' must have N - 1 entries");
    if (x.is_degenerate(degeneracy_floor)) throw DegeneracyError("x spectrum is degenerate");
    for (int j = 0; j + 1 < n; ++j)
        if (!(x[j] <= xp[j] && xp[j] <= x[j + 1])) throw DomainError("x' does not interlace x");
    const double a = beta.jacobi_exponent();
    double prod = 1.0;
    for (int m = 0; m < n; ++m)
        for (int j = 0; j + 1 < n; ++j) prod *= std::abs(x[m] - xp[j]);
    return measure_norm(beta, n) * std::abs(vandermonde(xp)) / std::pow(std::abs(vandermonde(x.values())), beta - 1.0) *
           std::pow(prod, a);
}

/// Phi_N^(beta)(x, k) by the radial Gelfand-Tzetlin recursion: integrate
/// exp(i (sum x - sum x') k_N) Phi_{N-1}(x', k~) against the interlacing
/// measure, level by level, with Gauss-Jacobi rules absorbing the endpoint
/// factors. The error estimate compares node orders M and 2M.
inline RadialValue phi_radial(DysonIndex beta, const Spectrum& x, const Spectrum& k, const QuadratureConfig& cfg = {}) {
    detail::validate_inputs(x, k, cfg);
    const unsigned threads = cfg.threads == 0 ? worker_count() : cfg.threads;
    RadialValue r;
    if (x.n() == 1) {
        r.value = std::exp(complex(0.0, x[0] * k[0]));
        r.abs_err_est = 4.0 * 2.220446049250313e-16;
        r.method = Method::recursion;
    } else if (x.n() == 2 && cfg.leaf != Leaf::quadrature) {
        r = phi2_closed(beta, x, k);
        r.method = Method::recursion;
    } else {
        r = detail::refine_by_doubling(detail::base_nodes(cfg, x, k), cfg, Method::recursion, [&](int m) {
            return detail::RecursionEngine(beta, m, cfg.leaf).eval(x.values(), k.values(), threads);
        });
    }
    detail::check_oscillation(x, k, r);
    return r;
}

namespace detail {

// Flattened quadrature over the whole cone: all N(N-1)/2 coordinates in one
// product rule, phases summed level by level down to exp(i x^(N-1)_1 k_1).
inline complex unrolled_eval(DysonIndex beta, std::span<const double> x, std::span<const double> k, int m,
                             unsigned threads) {
    const int n = static_cast<int>(x.size());
    const auto& rule = cached_plain_unit_rule(m, beta.jacobi_exponent());
    const int dims = n * (n - 1) / 2;

    std::vector<complex> partial(m);
    auto body = [&](std::size_t i0) {
        std::vector<int> idx(dims, 0);
        idx[0] = static_cast<int>(i0);
        GTCone cone;
        cone.levels.resize(n);
        cone.levels[0].assign(x.begin(), x.end());
        for (int lvl = 1; lvl < n; ++lvl) cone.levels[lvl].resize(n - lvl);
        complex acc = 0.0;
        while (true) {
            double weight = 1.0, phase = 0.0;
            int pos = 0;
            for (int lvl = 1; lvl < n; ++lvl) {
                const auto& up = cone.levels[lvl - 1];
                auto& cur = cone.levels[lvl];
                LevelGeometry geo(up, beta);
                double s_up = 0.0, s_cur = 0.0;
                for (int j = 0; j < n - lvl; ++j) {
                    cur[j] = geo.point(j, rule.u[idx[pos]]);
                    weight *= rule.w[idx[pos]];
                    ++pos;
                    s_cur += cur[j];
                }
                for (double v : up) s_up += v;
                weight *= geo.smooth_factor(up, cur);
                phase += (s_up - s_cur) * k[n - lvl];
            }
            phase += cone.levels[n - 1][0] * k[0];
            acc += weight * std::exp(complex(0.0, phase));
            int j = dims - 1;
            while (j >= 1 && ++idx[j] == m) idx[j--] = 0;
            if (j < 1) break;
        }
        partial[i0] = acc;
    };
    parallel_for(static_cast<std::size_t>(m), body, threads);
    return pairwise_sum(partial);
}

}  // namespace detail

/// Same function as phi_radial, evaluated as one flattened N(N-1)/2-dimensional
/// quadrature over the Gelfand-Tzetlin cone. Cost grows as M^{N(N-1)/2}.
inline RadialValue phi_radial_unrolled(DysonIndex beta, const Spectrum& x, const Spectrum& k,
                                       const QuadratureConfig& cfg = {}) {
    detail::validate_inputs(x, k, cfg);
    const unsigned threads = cfg.threads == 0 ? worker_count() : cfg.threads;
    RadialValue r;
    if (x.n() == 1) {
        r.value = std::exp(complex(0.0, x[0] * k[0]));
        r.method = Method::recursion;
    } else {
        r = detail::refine_by_doubling(detail::base_nodes(cfg, x, k), cfg, Method::recursion, [&](int m) {
            return detail::unrolled_eval(beta, x.values(), k.values(), m, threads);
        });
    }
    detail::check_oscillation(x, k, r);
    return r;
}

}  // namespace radialfn
