#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gauss_jacobi.hpp"
#include "types.hpp"

namespace radialfn {

/// Spatial-dimension parameter d > 1 (need not be an integer).
class Dimension {
public:
    Dimension(double d) : d_(d) {  // NOLINT: implicit from double
        if (!std::isfinite(d) || !(d > 1.0)) throw InvalidArgument("dimension must be finite and > 1");
    }
    double value() const { return d_; }
    operator double() const { return d_; }

    bool is_odd_integer() const {
        return d_ == std::floor(d_) && std::fmod(d_, 2.0) == 1.0;
    }

private:
    double d_;
};

namespace detail {

// Gamma(d/2) sum_k (-z^2/4)^k / (k! Gamma(k + d/2)), i.e. the power series of chi.
inline double chi_series(double d, double z) {
    const double q = -0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (k * (k - 1 + 0.5 * d));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// (2l+1)!! j_l(z) / z^l.
inline double chi_odd_closed(int l, double z) {
    double dfact = 1.0;
    for (int m = 3; m <= 2 * l + 1; m += 2) dfact *= m;
    return dfact * std::sph_bessel(static_cast<unsigned>(l), z) / std::pow(z, l);
}

constexpr double kChiLargeArgument = 200.0;

inline double chi_large(double d, double z) {
    const double nu = 0.5 * (d - 2.0);
    double j;
    if (nu >= 0.0) {
        j = std::cyl_bessel_j(nu, z);
    } else {
        const double mu = -nu;
        j = std::cos(mu * std::numbers::pi) * std::cyl_bessel_j(mu, z) -
            std::sin(mu * std::numbers::pi) * std::cyl_neumann(mu, z);
    }
    return std::exp(nu * std::log(2.0 / z) + std::lgamma(nu + 1.0)) * j;
}

inline int chi_node_count(double z) {
    const int raw = static_cast<int>(std::ceil(0.7 * z + 16.0));
    return 8 * ((raw + 7) / 8);
}

}  // namespace detail

/// Zonal function chi^(d)(z): the normalized angular average of a plane wave
/// in d dimensions, 2^{(d-2)/2} Gamma(d/2) J_{(d-2)/2}(z) / z^{(d-2)/2}.
inline double chi(Dimension dim, double z) {
    if (!std::isfinite(z)) throw InvalidArgument("chi: argument must be finite");
    const double d = dim.value();
    z = std::abs(z);

    if (z < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / (2.0 * d) + z2 * z2 / (8.0 * d * (d + 2.0));
    }

    if (dim.is_odd_integer()) {
        const int l = static_cast<int>((d - 3.0) / 2.0);
        if (l == 0) return std::sin(z) / z;
        if (z < l + 1.0) return detail::chi_series(d, z);
        if (z > detail::kChiLargeArgument) return detail::chi_large(d, z);
        return detail::chi_odd_closed(l, z);
    }

    if (z > detail::kChiLargeArgument) return detail::chi_large(d, z);

    // int_{-1}^{1} exp(i z xi) (1 - xi^2)^{(d-3)/2} d xi with the weight absorbed.
    const double a = 0.5 * (d - 3.0);
    const auto& rule = cached_gauss_jacobi(detail::chi_node_count(z), a, a);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        num += rule.weights[i] * std::cos(z * rule.nodes[i]);
        den += rule.weights[i];
    }
    return num / den;
}

struct HankelCoefficients {
    double d = 3.0;
    std::vector<complex> a;  // a_0 .. a_{count-1}; a_0 = 1
    bool terminated = false;
    double mu_c = 0.0;       // (d-3)/2
};

/// Coefficients of the asymptotic series w(z) = sum_mu a_mu / (+-z)^mu.
/// The +- sign of the series variable is applied at evaluation time.
inline HankelCoefficients hankel_coefficients(Dimension dim, int count) {
    if (count < 1) throw InvalidArgument("hankel_coefficients: count must be >= 1");
    const double d = dim.value();
    HankelCoefficients h;
    h.d = d;
    h.mu_c = 0.5 * (d - 3.0);
    h.a.reserve(count);
    h.a.emplace_back(1.0, 0.0);
    const double c = 0.5 * (d - 1.0) * (0.5 * (d - 1.0) - 1.0);
    for (int mu = 0; mu + 1 < count; ++mu) {
        const double factor = mu * (mu + 1.0) - c;
        if (factor == 0.0) h.terminated = true;
        if (h.terminated) {
            h.a.emplace_back(0.0, 0.0);
            continue;
        }
        h.a.push_back(h.a.back() * factor / complex(0.0, 2.0 * (mu + 1.0)));
    }
    return h;
}

/// Evaluates w_+(z) = sum a_mu / z^mu with the stored (truncated) coefficients.
inline complex hankel_series(const HankelCoefficients& h, double z, int sign = +1) {
    complex sum = 0.0;
    const double zs = sign * z;
    double p = 1.0;
    for (const auto& am : h.a) {
        sum += am / p;
        p *= zs;
    }
    return sum;
}

}  // namespace radialfn
