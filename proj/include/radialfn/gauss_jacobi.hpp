#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "constants.hpp"

namespace radialfn {

/// Nodes and weights on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

namespace detail {

// P_n^{(a,b)}(x) and P_{n-1}^{(a,b)}(x) by the three-term recurrence.
inline std::pair<double, double> jacobi_p(int n, double a, double b, double x) {
    double p0 = 1.0;
    if (n == 0) return {p0, 0.0};
    double p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for (int k = 2; k <= n; ++k) {
        const double s = 2.0 * k + a + b;
        const double c1 = 2.0 * k * (k + a + b) * (s - 2.0);
        const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        const double p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

inline double jacobi_dp(int n, double a, double b, double x, double pn, double pnm1) {
    const double s = 2.0 * n + a + b;
    return (n * ((a - b) - s * x) * pn + 2.0 * (n + a) * (n + b) * pnm1) / (s * (1.0 - x * x));
}

}  // namespace detail

/// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1, 1].
///
/// Nodes come from the Golub-Welsch eigenproblem and are polished by Newton
/// steps on P_n; weights use the closed form in terms of P_n'. For
/// alpha == beta the rule is symmetrized exactly.
inline QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw InvalidArgument("gauss_jacobi: n must be >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0)) throw InvalidArgument("gauss_jacobi: exponents must exceed -1");

    const double a = alpha, b = beta;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            diag(k) = (b - a) / (a + b + 2.0);
        } else {
            const double s = 2.0 * k + a + b;
            diag(k) = (b * b - a * a) / (s * (s + 2.0));
        }
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        double b2;
        if (k == 1)
            b2 = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
        else
            b2 = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
        sub(k - 1) = std::sqrt(b2);
    }

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    if (n == 1) {
        rule.nodes[0] = diag(0);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
        for (int i = 0; i < n; ++i) rule.nodes[i] = es.eigenvalues()(i);
    }

    const double log_c = (a + b + 1.0) * std::log(2.0) + std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                         std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0);
    for (int i = 0; i < n; ++i) {
        double x = rule.nodes[i];
        for (int it = 0; it < 8; ++it) {
            auto [pn, pnm1] = detail::jacobi_p(n, a, b, x);
            const double dp = detail::jacobi_dp(n, a, b, x, pn, pnm1);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        auto [pn, pnm1] = detail::jacobi_p(n, a, b, x);
        const double dp = detail::jacobi_dp(n, a, b, x, pn, pnm1);
        rule.nodes[i] = x;
        rule.weights[i] = std::exp(log_c) / ((1.0 - x * x) * dp * dp);
    }

    if (alpha == beta) {
        for (int i = 0, j = n - 1; i < j; ++i, --j) {
            const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
            const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
            rule.nodes[i] = -x;
            rule.nodes[j] = x;
            rule.weights[i] = rule.weights[j] = w;
        }
        if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

/// Thread-safe memoized access; returned references stay valid for the process lifetime.
inline const QuadratureRule& cached_gauss_jacobi(int n, double alpha, double beta) {
    using Key = std::tuple<int, double, double>;
    const Key key{n, alpha, beta};
    thread_local std::map<Key, const QuadratureRule*> local;
    if (auto hit = local.find(key); hit != local.end()) return *hit->second;

    static std::mutex mtx;
    static std::map<Key, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<QuadratureRule>(gauss_jacobi(n, alpha, beta))).first;
    local.emplace(key, it->second.get());
    return *it->second;
}

}  // namespace radialfn
