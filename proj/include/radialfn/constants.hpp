#pragma once

#include <cmath>
#include <numbers>

#include "types.hpp"

namespace radialfn {

/// log|Gamma(x)| together with the sign of Gamma(x).
struct SignedLogGamma {
    double log_abs;
    int sign;
};

inline SignedLogGamma log_gamma_signed(double x) {
    if (x <= 0.0 && x == std::floor(x)) throw DomainError("Gamma function pole at non-positive integer");
    SignedLogGamma r{std::lgamma(x), 1};
    if (x < 0.0 && static_cast<long long>(std::floor(x)) % 2 != 0) r.sign = -1;
    return r;
}

inline double log_gamma(double x) {
    auto r = log_gamma_signed(x);
    if (r.sign < 0) throw DomainError("log_gamma of negative Gamma value");
    return r.log_abs;
}

/// Normalization constant G_N of the interlacing measure as tabulated:
/// 2^{N-1} Gamma(N beta/2) / Gamma(beta/2)^N.
///
/// Note the hyperspherical convention behind this constant: the density in
/// the interlacing coordinates integrates to one only after dividing by
/// 2^{N-1}; see measure_norm().
inline double g_norm(DysonIndex beta, int n) {
    if (n < 2) throw InvalidArgument("g_norm requires n >= 2");
    const double b = beta.value();
    return std::exp((n - 1) * std::numbers::ln2 + log_gamma(n * b / 2) - n * log_gamma(b / 2));
}

/// Constant that makes the interlacing density a probability density:
/// Gamma(N beta/2) / Gamma(beta/2)^N.
inline double measure_norm(DysonIndex beta, int n) {
    if (n < 2) throw InvalidArgument("measure_norm requires n >= 2");
    const double b = beta.value();
    return std::exp(log_gamma(n * b / 2) - n * log_gamma(b / 2));
}

/// Eigenvalue-angle volume constant C_N:
/// pi^{beta N(N-1)/4} / N! * Gamma(beta/2)^N / prod_{m=1}^N Gamma(beta m/2).
inline double c_norm(DysonIndex beta, int n) {
    if (n < 1) throw InvalidArgument("c_norm requires n >= 1");
    const double b = beta.value();
    double lg = b * n * (n - 1) / 4.0 * std::log(std::numbers::pi) - std::lgamma(n + 1.0) +
                n * log_gamma(b / 2);
    for (int m = 1; m <= n; ++m) lg -= log_gamma(b * m / 2);
    return std::exp(lg);
}

struct SelbergParams {
    int n = 1;
    double gamma = 1.0;
    double a1 = 1.0, a2 = 1.0;
    double b1 = 1.0, b2 = 1.0;

    bool converges() const {
        if (n < 1 || !(a1 > 0.0) || !(a2 > 0.0)) return false;
        for (int j = 0; j < n; ++j)
            if (!(b1 + b2 - (n + j - 1) * gamma - 1.0 > 0.0)) return false;
        return true;
    }
};

/// Closed form of the Selberg-type integral
///   J_N = int d[t] |Delta_N(t)|^{2 gamma} prod_n (a1 + i t_n)^{-b1} (a2 - i t_n)^{-b2}.
inline double selberg_jn(const SelbergParams& p) {
    if (!p.converges()) throw DomainError("Selberg integral parameters violate the convergence condition");
    const int n = p.n;
    const double g = p.gamma;
    const double expo = (p.b1 + p.b2) * n - g * n * (n - 1) - n;
    double lg = n * std::log(2.0 * std::numbers::pi) - expo * std::log(p.a1 + p.a2);
    int sign = 1;
    for (int j = 0; j < n; ++j) {
        auto add = [&](double x, int s) {
            auto r = log_gamma_signed(x);
            lg += s * r.log_abs;
            sign *= r.sign;
        };
        add(1.0 + (j + 1) * g, +1);
        add(p.b1 + p.b2 - (n + j - 1) * g - 1.0, +1);
        add(1.0 + g, -1);
        add(p.b1 - j * g, -1);
        add(p.b2 - j * g, -1);
    }
    return sign * std::exp(lg);
}

}  // namespace radialfn
