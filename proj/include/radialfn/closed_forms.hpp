#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "types.hpp"
#include "vector_bessel.hpp"

namespace radialfn {

// ---------------------------------------------------------------------------
// Permutations and composite variables

struct Permutation {
    std::vector<int> image;  // 0-based: n -> image[n]
    int parity = 1;

    static Permutation identity(int n) {
        Permutation p;
        p.image.resize(n);
        std::iota(p.image.begin(), p.image.end(), 0);
        return p;
    }

    static int compute_parity(const std::vector<int>& img) {
        int inversions = 0;
        for (std::size_t i = 0; i < img.size(); ++i)
            for (std::size_t j = i + 1; j < img.size(); ++j)
                if (img[i] > img[j]) ++inversions;
        return inversions % 2 == 0 ? 1 : -1;
    }

    static Permutation from_image(std::vector<int> img) {
        std::vector<int> sorted(img);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != static_cast<int>(i)) throw InvalidArgument("permutation image is not a bijection");
        Permutation p;
        p.parity = compute_parity(img);
        p.image = std::move(img);
        return p;
    }

    int operator()(int n) const { return image[n]; }
    int size() const { return static_cast<int>(image.size()); }
};

/// All permutations of {0..n-1} in lexicographic order.
inline std::vector<Permutation> all_permutations(int n) {
    std::vector<Permutation> out;
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 0);
    do {
        out.push_back(Permutation::from_image(img));
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

/// Values indexed by pairs (i < j) in lexicographic order: (0,1), (0,2), ..., (n-2,n-1).
struct CompositeVariables {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<complex> z;

    static std::vector<std::pair<int, int>> pair_list(int n) {
        std::vector<std::pair<int, int>> p;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) p.emplace_back(i, j);
        return p;
    }

    static CompositeVariables from_values(int n, std::vector<complex> values) {
        CompositeVariables c;
        c.n = n;
        c.pairs = pair_list(n);
        if (values.size() != c.pairs.size()) throw InvalidArgument("composite variables: wrong number of values");
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw InvalidArgument("composite variables must be finite");
        c.z = std::move(values);
        return c;
    }

    /// z_ij = (x_i - x_j)(k_omega(i) - k_omega(j)).
    static CompositeVariables from_spectra(std::span<const double> x, std::span<const double> k,
                                           const Permutation& omega) {
        const int n = static_cast<int>(x.size());
        std::vector<complex> v;
        for (auto [i, j] : pair_list(n)) v.emplace_back((x[i] - x[j]) * (k[omega(i)] - k[omega(j)]), 0.0);
        return from_values(n, std::move(v));
    }

    std::size_t size() const { return z.size(); }

    int index(int i, int j) const {
        if (i > j) std::swap(i, j);
        // position of (i, j) in the lexicographic list
        return i * n - i * (i + 1) / 2 + (j - i - 1);
    }

    CompositeVariables inverted() const {
        CompositeVariables c = *this;
        for (auto& v : c.z) v = 1.0 / v;
        return c;
    }

    CompositeVariables scaled(complex s) const {
        CompositeVariables c = *this;
        for (auto& v : c.z) v *= s;
        return c;
    }
};

namespace detail {

// e_0..e_m of the values not flagged in `omit`.
inline std::vector<complex> elementary_all(const std::vector<complex>& v, const std::vector<bool>& omit) {
    std::vector<complex> e(v.size() + 1, complex(0.0));
    e[0] = 1.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!omit.empty() && omit[i]) continue;
        ++used;
        for (std::size_t nu = used; nu >= 1; --nu) e[nu] += e[nu - 1] * v[i];
    }
    return e;
}

}  // namespace detail

/// Elementary symmetric function e_nu of the stored values (pass the inverted
/// set to get e_nu(z^{-1})).
inline complex elem_sym(int nu, const CompositeVariables& values) {
    const int m = static_cast<int>(values.size());
    if (nu < 0 || nu > m) throw InvalidArgument("elem_sym: order out of range");
    return detail::elementary_all(values.z, {})[nu];
}

/// e_nu with the listed pair indices left out.
inline complex elem_sym_omitting(int nu, const CompositeVariables& values, const std::vector<int>& omitted) {
    std::vector<bool> omit(values.size(), false);
    for (int o : omitted) omit[o] = true;
    if (nu < 0 || nu > static_cast<int>(values.size())) return 0.0;
    return detail::elementary_all(values.z, omit)[nu];
}

/// Triangle-corrected symmetric function
///   f_nu = sum_{k<l<m} w_kl w_km w_lm e_{nu-3}(w without kl, km, lm),
/// where w are the stored values (normally z^{-1}).
inline complex corr_f(int nu, const CompositeVariables& w) {
    if (nu < 3) throw InvalidArgument("corr_f: order must be >= 3");
    const int n = w.n;
    complex sum = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) {
                const int ab = w.index(a, b), ac = w.index(a, c), bc = w.index(b, c);
                sum += w.z[ab] * w.z[ac] * w.z[bc] * elem_sym_omitting(nu - 3, w, {ab, ac, bc});
            }
    return sum;
}

/// Second correction f'_5: sum over 4-subsets of the product of all six
/// stored values times the sum of their reciprocals.
inline complex corr_f5_prime(const CompositeVariables& w) {
    const int n = w.n;
    complex sum = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                for (int d = c + 1; d < n; ++d) {
                    const int idx[6] = {w.index(a, b), w.index(a, c), w.index(a, d),
                                        w.index(b, c), w.index(b, d), w.index(c, d)};
                    complex prod = 1.0, recip = 0.0;
                    for (int i : idx) {
                        prod *= w.z[i];
                        recip += 1.0 / w.z[i];
                    }
                    sum += prod * recip;
                }
    return sum;
}

// ---------------------------------------------------------------------------
// Symplectic (beta = 4) polynomial parts, in the real-exponential convention.
//
// The weights 4 and 8 of the omitted-product terms are those for which
// W = P(z) / prod z solves the Hankel equation; written with (1 - z/2)
// factors they read 1/2 and 1/4.

namespace detail {

inline int pair_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

template <class C>
C usp_poly3_values(const std::vector<C>& z) {
    C prod(1);
    for (const auto& v : z) prod *= C(2) - v;
    return C(4) + prod;
}

template <class C>
C usp_poly4_values(const std::vector<C>& z) {
    C full(1);
    for (const auto& v : z) full *= C(2) - v;

    C triangles(0);
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            for (int c = b + 1; c < 4; ++c) {
                const int t[3] = {pair_index(4, a, b), pair_index(4, a, c), pair_index(4, b, c)};
                C prod(1);
                for (int p = 0; p < 6; ++p)
                    if (p != t[0] && p != t[1] && p != t[2]) prod *= C(2) - z[p];
                triangles += prod;
            }

    // Each pair (j,k) leaves its complementary pair (l,m) as the single surviving factor.
    C splits(0);
    for (const auto& v : z) splits += C(2) - v;

    return full + C(4) * triangles + C(8) * splits;
}

}  // namespace detail

inline complex usp_poly3(const CompositeVariables& z) {
    if (z.n != 3) throw InvalidArgument("usp_poly3 requires N = 3");
    return detail::usp_poly3_values(z.z);
}

inline complex usp_poly4(const CompositeVariables& z) {
    if (z.n != 4) throw InvalidArgument("usp_poly4 requires N = 4");
    return detail::usp_poly4_values(z.z);
}

/// Hankel correction W_3 = -(4 + prod(2 - z)) / prod z, normalized so W_3 -> 1.
inline complex hankel_w3_compact(const CompositeVariables& z) {
    complex top = 1.0;
    for (const auto& v : z.z) top *= v;
    return -usp_poly3(z) / top;
}

/// Hankel correction W_4 in compact product form.
inline complex hankel_w4_compact(const CompositeVariables& z) {
    complex top = 1.0;
    for (const auto& v : z.z) top *= v;
    return usp_poly4(z) / top;
}

/// Hankel correction W_4 assembled from symmetric functions of w = z^{-1}:
///   sum_{nu=0}^6 (-2)^nu e_nu + sum_{nu=3}^6 (-2)^nu/2 f_nu - 8 e_5 + 96 e_6.
inline complex hankel_w4_assembled(const CompositeVariables& w) {
    if (w.n != 4) throw InvalidArgument("hankel_w4_assembled requires N = 4");
    const auto e = detail::elementary_all(w.z, {});
    complex sum = 0.0;
    double p = 1.0;
    for (int nu = 0; nu <= 6; ++nu, p *= -2.0) {
        sum += p * e[nu];
        if (nu >= 3) sum += 0.5 * p * corr_f(nu, w);
    }
    return sum - 8.0 * e[5] + 96.0 * e[6];
}

// ---------------------------------------------------------------------------
// Closed-form radial functions

namespace detail {

inline void require_nondegenerate(const Spectrum& s, const char* what) {
    if (s.is_degenerate()) throw DegeneracyError(std::string(what) + ": spectrum is (near-)degenerate");
}

inline complex phase_sum(std::span<const double> x, std::span<const double> k, const Permutation& w) {
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += x[n] * k[w(static_cast<int>(n))];
    return s;
}

inline Eigen::MatrixXcd exp_kernel(const Spectrum& x, const Spectrum& k) {
    const int n = x.n();
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = std::exp(complex(0.0, x[r] * k[c]));
    return m;
}

inline complex determinant(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0) return 1.0;
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

inline complex ipow(int p) {
    static const complex powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return powers[((p % 4) + 4) % 4];
}

constexpr double kEps = 2.220446049250313e-16;

}  // namespace detail

/// N = 2 radial function for any beta > 0:
/// exp(i (x1+x2)(k1+k2)/2) chi^(beta+1)((x1-x2)(k1-k2)/2).
inline RadialValue phi2_closed(DysonIndex beta, const Spectrum& x, const Spectrum& k) {
    require_same_size(x, k);
    if (x.n() != 2) throw InvalidArgument("phi2_closed requires N = 2");
    const double s = 0.5 * (x[0] + x[1]) * (k[0] + k[1]);
    const double a = 0.5 * (x[0] - x[1]) * (k[0] - k[1]);
    RadialValue r;
    r.value = std::exp(complex(0.0, s)) * chi(beta.value() + 1.0, a);
    r.abs_err_est = 64.0 * detail::kEps * (1.0 + std::abs(s) * detail::kEps);
    r.method = Method::closed_form;
    return r;
}

/// Constant of the beta = 2 determinant formula, prod_{p<N} p! * (-i)^{N(N-1)/2}.
inline complex unitary_det_constant(int n) {
    double f = 1.0, fact = 1.0;
    for (int p = 1; p < n; ++p) {
        fact *= p;
        f *= fact;
    }
    return f * detail::ipow(-(n * (n - 1) / 2));
}

/// beta = 2: c_N det[exp(i x_n k_m)] / (Delta(x) Delta(k)).
inline RadialValue phi_unitary_det(const Spectrum& x, const Spectrum& k) {
    require_same_size(x, k);
    RadialValue r;
    r.method = Method::closed_form;
    if (x.n() == 1) {
        r.value = std::exp(complex(0.0, x[0] * k[0]));
        r.abs_err_est = 4.0 * detail::kEps;
        return r;
    }
    detail::require_nondegenerate(x, "phi_unitary_det(x)");
    detail::require_nondegenerate(k, "phi_unitary_det(k)");
    const complex c = unitary_det_constant(x.n());
    const double dd = vandermonde(x.values()) * vandermonde(k.values());
    r.value = c * detail::determinant(detail::exp_kernel(x, k)) / dd;
    double nfact = std::tgamma(x.n() + 1.0);
    r.abs_err_est = 64.0 * detail::kEps * nfact * std::abs(c) / std::abs(dd);
    return r;
}

/// Calibrated overall constants of the symplectic closed forms, fixed so that
/// the sums reproduce the unit-normalized radial function. In magnitude they are
/// (N(N+1)/2)!: 3! for N = 2, 6! for N = 3, 10! for N = 4, with sign (-1)^N.
inline constexpr double kUspConstant2 = 6.0;
inline constexpr double kUspConstant3 = -720.0;
inline constexpr double kUspConstant4 = 3628800.0;

namespace detail {

// Shared engine for the symplectic sums, accumulated in long double. poly(z) is
// the polynomial part in the real-exponential convention; `rotated` returns
// Phi(-ix, k) literally.
template <class Poly>
RadialValue usp_sum(const Spectrum& x, const Spectrum& k, bool rotated, double constant, Poly&& poly) {
    using Real = long double;
    using C = std::complex<Real>;
    require_same_size(x, k);
    require_nondegenerate(x, "symplectic closed form(x)");
    require_nondegenerate(k, "symplectic closed form(k)");
    const int n = x.n();
    const int m = n * (n - 1) / 2;
    auto vdm = [n](auto&& v) {
        Real p = 1;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) p *= Real(v(i)) - Real(v(j));
        return p * p * p;
    };
    const Real dx3 = vdm([&](int i) { return x[i]; });
    const C unit = rotated ? C(1) : C(0, 1);
    const complex rot = rotated ? complex(1.0) : ipow(3 * m);
    C sum(0);
    Real mag = 0;
    std::vector<C> z(m);
    for (const auto& w : all_permutations(n)) {
        const Real dk3 = vdm([&](int i) { return k[w(i)]; });
        Real phase = 0;
        for (int i = 0, p = 0; i < n; ++i) {
            phase += Real(x[i]) * Real(k[w(i)]);
            for (int j = i + 1; j < n; ++j, ++p)
                z[p] = unit * ((Real(x[i]) - Real(x[j])) * (Real(k[w(i)]) - Real(k[w(j)])));
        }
        // x -> i x: z -> i z, Delta(x)^3 -> i^{3m} Delta(x)^3, exp(Tr x k) -> exp(i Tr x k)
        const C term = poly(z) / (C(rot.real(), rot.imag()) * dx3 * dk3) * std::exp(unit * phase);
        sum += term;
        mag += std::abs(term);
    }
    RadialValue r;
    r.method = Method::closed_form;
    r.value = constant * complex(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
    r.abs_err_est = 64.0 * static_cast<double>(std::numeric_limits<Real>::epsilon() * mag) * std::abs(constant);
    return r;
}

}  // namespace detail

/// N = 2, beta = 4 in the symplectic sum form (the base of the beta = 4 pattern).
inline RadialValue phi2_usp(const Spectrum& x, const Spectrum& k, bool rotated = false) {
    if (x.n() != 2) throw InvalidArgument("phi2_usp requires N = 2");
    return detail::usp_sum(x, k, rotated, kUspConstant2, [](const auto& z) { return z[0] - 2.0L; });
}

/// N = 3, beta = 4: constant * sum_w (4 + prod(2 - z_w)) exp(Tr x w(k)) / (Delta(x)^3 Delta(w(k))^3).
inline RadialValue phi3_usp(const Spectrum& x, const Spectrum& k, bool rotated = false) {
    if (x.n() != 3) throw InvalidArgument("phi3_usp requires N = 3");
    return detail::usp_sum(x, k, rotated, kUspConstant3, [](const auto& z) { return detail::usp_poly3_values(z); });
}

/// N = 4, beta = 4: product term plus triangle-omitted and pair-split terms.
inline RadialValue phi4_usp(const Spectrum& x, const Spectrum& k, bool rotated = false) {
    if (x.n() != 4) throw InvalidArgument("phi4_usp requires N = 4");
    return detail::usp_sum(x, k, rotated, kUspConstant4, [](const auto& z) { return detail::usp_poly4_values(z); });
}

/// Unnormalized leading large-separation term det[exp(i x_n k_m)] / |Delta(x) Delta(k)|^{beta/2}.
inline RadialValue phi_asymptotic(DysonIndex beta, const Spectrum& x, const Spectrum& k) {
    require_same_size(x, k);
    RadialValue r;
    r.method = Method::asymptotic;
    if (x.n() == 1) {
        r.value = std::exp(complex(0.0, x[0] * k[0]));
        return r;
    }
    detail::require_nondegenerate(x, "phi_asymptotic(x)");
    detail::require_nondegenerate(k, "phi_asymptotic(k)");
    const double dd = std::abs(vandermonde(x.values()) * vandermonde(k.values()));
    r.value = detail::determinant(detail::exp_kernel(x, k)) / std::pow(dd, 0.5 * beta.value());
    r.abs_err_est = 64.0 * detail::kEps * std::tgamma(x.n() + 1.0) / std::pow(dd, 0.5 * beta.value());
    return r;
}

/// True when closed_form() below has a formula for (beta, N).
inline bool has_closed_form(DysonIndex beta, int n) {
    if (n <= 2) return true;
    if (beta.value() == 2.0) return true;
    return beta.value() == 4.0 && (n == 3 || n == 4);
}

/// Dispatch to the closed form for (beta, N).
inline RadialValue closed_form(DysonIndex beta, const Spectrum& x, const Spectrum& k) {
    require_same_size(x, k);
    const int n = x.n();
    if (n == 1) {
        RadialValue r;
        r.method = Method::closed_form;
        r.value = std::exp(complex(0.0, x[0] * k[0]));
        r.abs_err_est = 4.0 * detail::kEps;
        return r;
    }
    if (n == 2) return phi2_closed(beta, x, k);
    if (beta.value() == 2.0) return phi_unitary_det(x, k);
    if (beta.value() == 4.0 && n == 3) return phi3_usp(x, k);
    if (beta.value() == 4.0 && n == 4) return phi4_usp(x, k);
    throw InvalidArgument("no closed form for this (beta, N)");
}

/// Hankel correction W_{N,omega}(x, k) in the imaginary-exponent convention,
/// where Phi_omega = exp(i sum x_n k_omega(n)) / |Delta Delta|^{beta/2} * W.
/// Known explicitly for beta = 2 (W = 1) and beta = 4, N = 2, 3, 4.
inline complex hankel_w(DysonIndex beta, std::span<const double> x, std::span<const double> k,
                        const Permutation& omega) {
    if (beta.value() == 2.0) return 1.0;
    if (beta.value() != 4.0) throw InvalidArgument("hankel_w: no explicit W for this beta");
    const int n = static_cast<int>(x.size());
    auto z = CompositeVariables::from_spectra(x, k, omega).scaled(complex(0.0, 1.0));
    switch (n) {
    case 2: return (z.z[0] - 2.0) / z.z[0];
    case 3: return hankel_w3_compact(z);
    case 4: return hankel_w4_assembled(z.inverted());
    default: throw InvalidArgument("hankel_w: beta = 4 requires N in {2, 3, 4}");
    }
}

}  // namespace radialfn
