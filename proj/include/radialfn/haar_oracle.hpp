#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "constants.hpp"
#include "parallel.hpp"
#include "types.hpp"

namespace radialfn {

using BetaClass = DysonIndex::Class;

/// Haar-distributed group element. Orthogonal matrices are stored with zero
/// imaginary part; symplectic ones as 2N x 2N complex matrices made of
/// quaternion blocks [[a, b], [-conj(b), conj(a)]].
struct GroupMatrix {
    BetaClass beta_class = BetaClass::unitary;
    int n = 0;
    Eigen::MatrixXcd entries;

    double unitarity_defect() const {
        const auto id = Eigen::MatrixXcd::Identity(entries.rows(), entries.cols());
        return (entries.adjoint() * entries - id).cwiseAbs().maxCoeff();
    }

    /// Largest deviation from the quaternion block structure.
    double quaternion_defect() const {
        if (beta_class != BetaClass::symplectic) return 0.0;
        double d = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto b = entries.block<2, 2>(2 * i, 2 * j);
                d = std::max(d, std::abs(b(1, 1) - std::conj(b(0, 0))));
                d = std::max(d, std::abs(b(1, 0) + std::conj(b(0, 1))));
            }
        return d;
    }
};

struct MCEstimate {
    complex mean{0.0, 0.0};
    double std_err = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};

/// SplitMix64 generator; one instance per sample, seeded from (seed, index).
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t state) : s_(state) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() {
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static SplitMix64 for_sample(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 mix(seed ^ (index * 0xD1B54A32D192ED03ull));
        return SplitMix64(mix() ^ index);
    }

private:
    std::uint64_t s_;
};

namespace detail {

// Gram-Schmidt on columns with quaternion partners: column 2j+1 is the image of
// column 2j under the antiunitary map (v0, v1) -> (-conj(v1), conj(v0)) per block.
inline void symplectic_orthonormalize(Eigen::MatrixXcd& m) {
    const int dim = static_cast<int>(m.rows());
    for (int c = 0; c < dim; c += 2) {
        Eigen::VectorXcd v = m.col(c);
        for (int pass = 0; pass < 2; ++pass)
            for (int p = 0; p < c; ++p) v -= m.col(p).dot(v) * m.col(p);
        v /= v.norm();
        Eigen::VectorXcd w(dim);
        for (int b = 0; b < dim; b += 2) {
            w(b) = -std::conj(v(b + 1));
            w(b + 1) = std::conj(v(b));
        }
        m.col(c) = v;
        m.col(c + 1) = w;
    }
}

}  // namespace detail

/// Haar sample from SO(N), U(N) or USp(2N) via Gaussian matrices and QR with
/// the triangular factor's diagonal made real positive.
template <class URBG>
GroupMatrix sample_haar(BetaClass cls, int n, URBG& stream) {
    if (n < 1) throw InvalidArgument("sample_haar: n must be >= 1");
    std::normal_distribution<double> gauss(0.0, 1.0);
    GroupMatrix g;
    g.beta_class = cls;
    g.n = n;

    switch (cls) {
    case BetaClass::orthogonal: {
        Eigen::MatrixXd a(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) a(i, j) = gauss(stream);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j)
            if (r(j, j) < 0.0) q.col(j) *= -1.0;
        if (q.determinant() < 0.0) q.col(0) *= -1.0;
        g.entries = q.cast<complex>();
        break;
    }
    case BetaClass::unitary: {
        Eigen::MatrixXcd a(n, n);
        const double s = std::sqrt(0.5);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double re = gauss(stream), im = gauss(stream);
                a(i, j) = complex(s * re, s * im);
            }
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
        Eigen::MatrixXcd q = qr.householderQ();
        const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j) {
            const complex d = r(j, j);
            q.col(j) *= d / std::abs(d);
        }
        g.entries = std::move(q);
        break;
    }
    case BetaClass::symplectic: {
        Eigen::MatrixXcd a(2 * n, 2 * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double a0 = gauss(stream), a1 = gauss(stream), a2 = gauss(stream), a3 = gauss(stream);
                const complex al(a0, a3), be(a1, -a2);
                a(2 * i, 2 * j) = al;
                a(2 * i, 2 * j + 1) = be;
                a(2 * i + 1, 2 * j) = -std::conj(be);
                a(2 * i + 1, 2 * j + 1) = std::conj(al);
            }
        detail::symplectic_orthonormalize(a);
        g.entries = std::move(a);
        break;
    }
    case BetaClass::generic:
        throw InvalidArgument("sample_haar: no compact group for generic beta");
    }
    return g;
}

/// Monte-Carlo estimate of the group integral of exp(i Tr U^dagger x U k).
/// For beta = 4 the spectra are Kramers doubled and Tr is half the matrix trace.
inline MCEstimate mc_phi(DysonIndex beta, const Spectrum& x, const Spectrum& k, std::int64_t samples,
                         std::uint64_t seed, unsigned threads = 0) {
    require_same_size(x, k);
    if (!beta.is_group_case()) throw InvalidArgument("mc_phi: beta must be 1, 2 or 4");
    if (samples < 100) throw InvalidArgument("mc_phi: samples must be >= 100");
    if (threads == 0) threads = worker_count();

    const BetaClass cls = beta.cls();
    const int n = x.n();
    const int mult = cls == BetaClass::symplectic ? 2 : 1;
    const double trace_scale = 1.0 / mult;
    const int dim = mult * n;
    std::vector<double> xd(dim), kd(dim);
    for (int i = 0; i < dim; ++i) {
        xd[i] = x[i / mult];
        kd[i] = k[i / mult];
    }

    std::vector<complex> f(static_cast<std::size_t>(samples));
    parallel_for(
        f.size(),
        [&](std::size_t s) {
            auto rng = SplitMix64::for_sample(seed, s);
            const GroupMatrix u = sample_haar(cls, n, rng);
            double phase = 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) phase += std::norm(u.entries(a, b)) * xd[a] * kd[b];
            f[s] = std::exp(complex(0.0, trace_scale * phase));
        },
        threads);

    MCEstimate est;
    est.samples = samples;
    est.seed = seed;
    est.mean = pairwise_sum(f) / static_cast<double>(samples);
    std::vector<double> dev(f.size());
    for (std::size_t s = 0; s < f.size(); ++s) dev[s] = std::norm(f[s] - est.mean);
    const double var = pairwise_sum(dev) / static_cast<double>(samples - 1);
    est.std_err = std::sqrt(var / static_cast<double>(samples));
    return est;
}

/// Volume prod_{m=1}^{n} 2 pi^{beta m/2} / Gamma(beta m/2) of the group U(n; beta).
inline double group_volume(DysonIndex beta, int n) {
    if (!beta.is_group_case()) throw InvalidArgument("group_volume: beta must be 1, 2 or 4");
    if (n < 1) throw InvalidArgument("group_volume: n must be >= 1");
    double log_v = 0.0;
    for (int m = 1; m <= n; ++m) {
        const double h = 0.5 * beta.value() * m;
        log_v += std::log(2.0) + h * std::log(std::numbers::pi) - log_gamma(h);
    }
    return std::exp(log_v);
}

}  // namespace radialfn
