#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <radialfn/closed_forms.hpp>
#include <radialfn/radial_recursion.hpp>

using namespace radialfn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Spectrum random_spectrum(int n, std::mt19937_64& rng, double lo, double hi, double min_gap = 0.3) {
    std::uniform_real_distribution<double> u(lo, hi);
    for (;;) {
        std::vector<double> v(n);
        for (auto& d : v) d = u(rng);
        Spectrum s(v);
        if (s.min_gap() > min_gap) return s;
    }
}

double rel_diff(complex a, complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("permutations and parity", "[closed][combinatorics]") {
    CHECK(all_permutations(3).size() == 6);
    CHECK(all_permutations(4).size() == 24);
    int even = 0;
    for (const auto& p : all_permutations(4)) even += p.parity == 1;
    CHECK(even == 12);
    CHECK(Permutation::from_image({1, 0, 2}).parity == -1);
    CHECK(Permutation::from_image({1, 2, 0}).parity == 1);
    CHECK_THROWS_AS(Permutation::from_image({0, 0, 1}), InvalidArgument);
}

TEST_CASE("composite variables", "[closed][composite]") {
    const std::vector<double> x{0.0, 1.0, 3.0}, k{-1.0, 0.5, 2.0};
    const auto z = CompositeVariables::from_spectra(x, k, Permutation::identity(3));
    REQUIRE(z.size() == 3);
    CHECK(z.z[z.index(0, 1)] == complex((0.0 - 1.0) * (-1.0 - 0.5), 0.0));
    CHECK(z.z[z.index(2, 0)] == complex((0.0 - 3.0) * (-1.0 - 2.0), 0.0));
    const auto w = CompositeVariables::from_spectra(x, k, Permutation::from_image({2, 0, 1}));
    CHECK(w.z[w.index(1, 2)] == complex((1.0 - 3.0) * (-1.0 - 0.5), 0.0));
    CHECK_THROWS_AS(CompositeVariables::from_values(3, {1.0, 2.0}), InvalidArgument);
}

TEST_CASE("elementary symmetric functions", "[closed][symmetric]") {
    const auto z = CompositeVariables::from_values(3, {2.0, 3.0, 5.0});
    CHECK(elem_sym(0, z) == complex(1.0));
    CHECK(elem_sym(1, z) == complex(10.0));
    CHECK(elem_sym(2, z) == complex(31.0));
    CHECK(elem_sym(3, z) == complex(30.0));
    CHECK_THROWS_AS(elem_sym(4, z), InvalidArgument);
    CHECK(elem_sym_omitting(2, z, {1}) == complex(10.0));
}

TEST_CASE("N = 2 closed form", "[closed][n2]") {
    CHECK_THAT(phi2_closed(2, Spectrum{1, -1}, Spectrum{1, -1}).value.real(), WithinAbs(std::sin(2.0) / 2.0, 1e-15));
    CHECK_THAT(phi2_closed(1, Spectrum{1, -1}, Spectrum{1, -1}).value.real(),
               WithinAbs(std::cyl_bessel_j(0.0, 2.0), 1e-14));
    // phase carries the centre-of-mass motion
    const auto r = phi2_closed(3, Spectrum{0.5, 2.5}, Spectrum{1.0, 2.0});
    CHECK(std::abs(r.value - std::exp(complex(0.0, 1.5 * 3.0)) * chi(4.0, 1.0)) < 1e-15);
}

TEST_CASE("unitary determinant formula", "[closed][unitary]") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        const Spectrum x = random_spectrum(2, rng, -2, 2), k = random_spectrum(2, rng, -2, 2);
        CHECK(rel_diff(phi_unitary_det(x, k).value, phi2_closed(2, x, k).value) < 1e-12);
    }
    const Spectrum x{0.3, 1.1, 2.7}, k{-0.5, 0.4, 1.9};
    CHECK(rel_diff(phi_unitary_det(x, k).value, phi_radial(2, x, k).value) < 1e-9);
    CHECK_THROWS_AS(phi_unitary_det(Spectrum{0.0, 0.0, 1.0}, k), DegeneracyError);
}

TEST_CASE("symplectic N = 2 sum equals the Bessel form", "[closed][usp]") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 5; ++i) {
        const Spectrum x = random_spectrum(2, rng, -2, 2), k = random_spectrum(2, rng, -2, 2);
        CHECK(rel_diff(phi2_usp(x, k).value, phi2_closed(4, x, k).value) < 1e-10);
    }
}

TEST_CASE("symplectic constants are calibrated against the recursion", "[closed][usp][calibration]") {
    // Ratio of recursion to the unit-constant sum at one point fixes the constant.
    const Spectrum x3{-0.9, 0.4, 1.8}, k3{-1.1, 0.2, 0.9};
    const complex r3 = phi_radial(4, x3, k3).value / (phi3_usp(x3, k3).value / kUspConstant3);
    CHECK_THAT(r3.real(), WithinRel(-720.0, 1e-8));
    CHECK(std::abs(r3.imag()) < 1e-5);

    const Spectrum x4{-1.2, 0.1, 0.9, 2.0}, k4{-0.7, -0.1, 0.6, 1.3};
    const complex r4 = phi_radial(4, x4, k4).value / (phi4_usp(x4, k4).value / kUspConstant4);
    CHECK_THAT(r4.real(), WithinRel(3628800.0, 1e-6));
    CHECK(std::abs(r4.imag()) < 1.0);
}

TEST_CASE("symplectic closed forms validate at further points", "[closed][usp]") {
    std::mt19937_64 rng(8);
    QuadratureConfig s;
    s.leaf = Leaf::symplectic;
    for (int i = 0; i < 5; ++i) {
        const Spectrum x3 = random_spectrum(3, rng, -2, 2), k3 = random_spectrum(3, rng, -1.5, 1.5);
        CHECK(rel_diff(phi3_usp(x3, k3).value, phi_radial(4, x3, k3).value) < 1e-6);
        const Spectrum x4 = random_spectrum(4, rng, -2, 2), k4 = random_spectrum(4, rng, -1.5, 1.5);
        CHECK(rel_diff(phi4_usp(x4, k4).value, phi_radial(4, x4, k4, s).value) < 1e-5);
    }
}

TEST_CASE("rotated convention gives real values for real arguments", "[closed][usp]") {
    const Spectrum x{-0.9, 0.4, 1.8}, k{-1.1, 0.2, 0.9};
    const auto r = phi3_usp(x, k, true);
    CHECK(std::isfinite(r.value.real()));
    CHECK(std::abs(r.value.imag()) <= 1e-12 * std::abs(r.value.real()));
    const auto r4 = phi4_usp(Spectrum{-1.2, 0.1, 0.9, 2.0}, Spectrum{-0.7, -0.1, 0.6, 1.3}, true);
    CHECK(std::abs(r4.value.imag()) <= 1e-12 * std::abs(r4.value.real()));
}

TEST_CASE("compact and assembled forms of W_4 agree", "[closed][hankel]") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 10; ++i) {
        std::vector<complex> v(6);
        for (auto& z : v) z = complex(u(rng), u(rng));
        const auto z = CompositeVariables::from_values(4, v);
        const complex a = hankel_w4_compact(z), b = hankel_w4_assembled(z.inverted());
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("Hankel factor tends to one at large separations", "[closed][hankel]") {
    const Spectrum k{-1.0, 0.3, 1.2, 2.0};
    for (int n : {2, 3, 4}) {
        std::vector<double> xs(n), ks(k.vec().begin(), k.vec().begin() + n);
        complex prev_dev = 1e300;
        for (double scale : {10.0, 100.0, 1000.0}) {
            for (int i = 0; i < n; ++i) xs[i] = scale * (i + 0.3 * i * i);
            const complex w = hankel_w(4, xs, ks, Permutation::identity(n));
            const double dev = std::abs(w - 1.0);
            CHECK(dev < std::abs(prev_dev));
            prev_dev = dev;
        }
        CHECK(std::abs(prev_dev) < 1e-2);
    }
    CHECK(hankel_w(2, std::vector<double>{0.0, 1.0, 2.0}, std::vector<double>{0.0, 1.0, 5.0}, Permutation::identity(3)) ==
          complex(1.0));
    CHECK_THROWS_AS(hankel_w(1, std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}, Permutation::identity(2)),
                    InvalidArgument);
}

TEST_CASE("beta = 2: Phi is a constant multiple of the asymptotic form", "[closed][asymptotic]") {
    std::mt19937_64 rng(21);
    complex first = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Spectrum x = random_spectrum(3, rng, -2, 2), k = random_spectrum(3, rng, -2, 2);
        const complex ratio = phi_unitary_det(x, k).value / phi_asymptotic(2, x, k).value;
        if (i == 0) first = ratio;
        CHECK(std::abs(ratio - first) < 1e-10 * std::abs(first));
    }
    CHECK(std::abs(std::abs(first) - std::abs(unitary_det_constant(3))) < 1e-10 * std::abs(first));
}

TEST_CASE("closed-form dispatch", "[closed]") {
    CHECK(has_closed_form(1.3, 2));
    CHECK(has_closed_form(2, 5));
    CHECK(has_closed_form(4, 4));
    CHECK_FALSE(has_closed_form(4, 5));
    CHECK_FALSE(has_closed_form(1, 3));
    CHECK_THROWS_AS(closed_form(1, Spectrum{0.0, 1.0, 2.0}, Spectrum{0.0, 1.0, 2.0}), InvalidArgument);
    CHECK(closed_form(4, Spectrum{0.0, 1.0, 2.5}, Spectrum{0.1, 1.0, 2.0}).method == Method::closed_form);
}
