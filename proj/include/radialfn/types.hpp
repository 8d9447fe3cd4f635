#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radialfn {

using complex = std::complex<double>;

// Error hierarchy. Everything derives from std::runtime_error or
// std::invalid_argument so callers can catch at the granularity they need.

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegeneracyError : DomainError {
    using DomainError::DomainError;
};

enum class Method { recursion, closed_form, monte_carlo, asymptotic };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::recursion: return "recursion";
    case Method::closed_form: return "closed_form";
    case Method::monte_carlo: return "monte_carlo";
    case Method::asymptotic: return "asymptotic";
    }
    return "unknown";
}

/// Result of evaluating a radial function, with an honest error estimate.
struct RadialValue {
    complex value{1.0, 0.0};
    double abs_err_est = 0.0;
    Method method = Method::recursion;
    int nodes_used = 0;  // per-variable node count of the returned quadrature (0 if not a quadrature)
    std::vector<std::string> warnings;
};

/// Thrown when the error estimate stays above tolerance after all refinements.
struct AccuracyNotReached : std::runtime_error {
    RadialValue best;
    AccuracyNotReached(const std::string& what, RadialValue best_value)
        : std::runtime_error(what), best(std::move(best_value)) {}
};

/// Dyson index beta > 0 with its symmetry class.
class DysonIndex {
public:
    enum class Class { orthogonal, unitary, symplectic, generic };

    DysonIndex(double beta) : beta_(beta) {  // NOLINT: implicit from double is the common use
        if (!std::isfinite(beta) || beta <= 0.0)
            throw InvalidArgument("Dyson index must be finite and positive");
    }

    double value() const { return beta_; }
    operator double() const { return beta_; }

    Class cls() const {
        if (beta_ == 1.0) return Class::orthogonal;
        if (beta_ == 2.0) return Class::unitary;
        if (beta_ == 4.0) return Class::symplectic;
        return Class::generic;
    }

    bool is_group_case() const { return cls() != Class::generic; }

    // Exponent (beta-2)/2 of the interlacing factors; also the Jacobi exponent.
    double jacobi_exponent() const { return 0.5 * (beta_ - 2.0); }

private:
    double beta_;
};

inline const char* to_string(DysonIndex::Class c) {
    switch (c) {
    case DysonIndex::Class::orthogonal: return "orthogonal";
    case DysonIndex::Class::unitary: return "unitary";
    case DysonIndex::Class::symplectic: return "symplectic";
    case DysonIndex::Class::generic: return "generic";
    }
    return "unknown";
}

/// Ordered set of N real values (eigenvalues). Input is sorted on construction.
class Spectrum {
public:
    Spectrum() = default;

    explicit Spectrum(std::vector<double> values) : v_(std::move(values)) {
        for (double d : v_)
            if (!std::isfinite(d)) throw InvalidArgument("spectrum entries must be finite");
        std::sort(v_.begin(), v_.end());
    }

    Spectrum(std::initializer_list<double> values) : Spectrum(std::vector<double>(values)) {}

    std::size_t size() const { return v_.size(); }
    int n() const { return static_cast<int>(v_.size()); }
    double operator[](std::size_t i) const { return v_[i]; }
    std::span<const double> values() const { return v_; }
    const std::vector<double>& vec() const { return v_; }

    double min_gap() const {
        if (v_.size() < 2) return std::numeric_limits<double>::infinity();
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < v_.size(); ++i) g = std::min(g, v_[i] - v_[i - 1]);
        return g;
    }

    double diameter() const { return v_.empty() ? 0.0 : v_.back() - v_.front(); }

    double max_abs() const {
        double m = 0.0;
        for (double d : v_) m = std::max(m, std::abs(d));
        return m;
    }

    double sum() const {
        double s = 0.0;
        for (double d : v_) s += d;
        return s;
    }

    double sum_squares() const {
        double s = 0.0;
        for (double d : v_) s += d * d;
        return s;
    }

    /// True when adjacent entries are closer than rel_floor * diameter.
    bool is_degenerate(double rel_floor = 1e-8) const {
        if (v_.size() < 2) return false;
        double diam = diameter();
        return !(min_gap() > rel_floor * diam) || diam == 0.0;
    }

    Spectrum shifted(double c) const {
        std::vector<double> w(v_);
        for (double& d : w) d += c;
        return Spectrum(std::move(w));
    }

    Spectrum scaled(double s) const {
        std::vector<double> w(v_);
        for (double& d : w) d *= s;
        return Spectrum(std::move(w));
    }

    /// First m entries (the "k tilde" of the recursion when m = N-1).
    Spectrum head(std::size_t m) const {
        return Spectrum(std::vector<double>(v_.begin(), v_.begin() + static_cast<std::ptrdiff_t>(m)));
    }

private:
    std::vector<double> v_;
};

/// Vandermonde product prod_{n<m} (x_n - x_m).
inline double vandermonde(std::span<const double> x) {
    double d = 1.0;
    for (std::size_t n = 0; n < x.size(); ++n)
        for (std::size_t m = n + 1; m < x.size(); ++m) d *= x[n] - x[m];
    return d;
}

inline void require_same_size(const Spectrum& x, const Spectrum& k) {
    if (x.size() != k.size()) throw InvalidArgument("x and k must have the same length");
    if (x.size() == 0) throw InvalidArgument("spectra must be non-empty");
}

}  // namespace radialfn
