#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qmpe/spectral.hpp"

using namespace qmpe;
using Cx = std::complex<double>;

namespace {

PseudomodeSpec single(double alpha, double gamma, double omega0 = 1.0) {
    return PseudomodeSpec(omega0, {{alpha, omega0, gamma}});
}

}  // namespace

TEST_CASE("dynamical matrix carries the arrow structure") {
    const PseudomodeSpec spec(1.0, {{0.5, 2.0, 3.0}, {0.25, 4.0, 5.0}});
    const Eigen::MatrixXcd m = build_dynamical_matrix(spec);
    REQUIRE(m.rows() == 3);
    CHECK(m(0, 0) == Cx(0.0, -1.0));
    CHECK(m(1, 1) == Cx(-1.5, -2.0));
    CHECK(m(2, 2) == Cx(-2.5, -4.0));
    CHECK(m(0, 1) == Cx(0.0, -0.5));
    CHECK(m(1, 0) == Cx(0.0, -0.5));
    CHECK(m(0, 2) == Cx(0.0, -0.25));
    CHECK(m(2, 0) == Cx(0.0, -0.25));
    CHECK(m(1, 2) == Cx(0.0, 0.0));
    CHECK(m(2, 1) == Cx(0.0, 0.0));
}

TEST_CASE("characteristic polynomial in closed form, single resonant mode") {
    // Q(x) = (x + i)(x + i + 5) + 6.25 for alpha = 2.5, gamma = 10.
    const auto poly = characteristic_polynomial(single(2.5, 10.0));
    REQUIRE(poly.degree() == 2);
    const auto& c = poly.coefficients();
    CHECK(std::abs(c[0] - Cx(5.25, 5.0)) < 1e-14);
    CHECK(std::abs(c[1] - Cx(5.0, 2.0)) < 1e-14);
    CHECK(c[2] == Cx(1.0, 0.0));

    // At x = -gamma/2 - i omega0 the product term vanishes: Q = alpha^2.
    const auto p1 = characteristic_polynomial(single(1.0, 2.0));
    CHECK(std::abs(p1.evaluate(Cx(-1.0, -1.0)) - Cx(1.0, 0.0)) < 1e-14);
}

TEST_CASE("characteristic polynomial equals det(xI - M)") {
    const PseudomodeSpec spec(1.3, {{0.7, 1.1, 2.0}, {0.4, 0.6, 5.0}});
    const auto poly = characteristic_polynomial(spec);
    const Eigen::MatrixXcd m = build_dynamical_matrix(spec);
    const int d = static_cast<int>(m.rows());
    for (Cx x : {Cx(0.3, -0.2), Cx(-1.0, 0.5), Cx(2.0, 2.0)}) {
        const Eigen::MatrixXcd shifted =
            x * Eigen::MatrixXcd::Identity(d, d) - m;
        CHECK(std::abs(poly.evaluate(x) - shifted.determinant()) < 1e-12);
    }
}

TEST_CASE("closed-form roots across the damping regimes") {
    SUBCASE("overdamped") {
        const auto r = closed_form_roots(single(2.4, 10.0));
        CHECK(std::abs(r[0] - Cx(-1.8, -1.0)) < 1e-14);
        CHECK(std::abs(r[1] - Cx(-3.2, -1.0)) < 1e-14);
    }
    SUBCASE("overdamped, golden-ratio rates") {
        const auto r = closed_form_roots(single(1.0, 6.0));
        CHECK(r[0].real() == doctest::Approx(-0.3819660112501051).epsilon(1e-14));
        CHECK(r[1].real() == doctest::Approx(-2.618033988749895).epsilon(1e-14));
        CHECK(r[0].imag() == doctest::Approx(-1.0).epsilon(1e-14));
    }
    SUBCASE("underdamped pair shares the decay rate") {
        const auto r = closed_form_roots(single(1.0, 2.0));
        CHECK(r[0].real() == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(r[1].real() == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(r[0].imag() ==
              doctest::Approx(-1.8660254037844386).epsilon(1e-14));
        CHECK(r[1].imag() ==
              doctest::Approx(-0.1339745962155614).epsilon(1e-14));
    }
    SUBCASE("exceptional value gives a double root") {
        const auto r = closed_form_roots(single(2.5, 10.0));
        CHECK(std::abs(r[0] - Cx(-2.5, -1.0)) < 1e-14);
        CHECK(std::abs(r[1] - Cx(-2.5, -1.0)) < 1e-14);
    }
    SUBCASE("requires the resonant single-mode family") {
        CHECK_THROWS_AS(closed_form_roots(PseudomodeSpec(
                            1.0, {{0.5, 2.0, 1.0}})),
                        std::invalid_argument);
        CHECK_THROWS_AS(closed_form_roots(PseudomodeSpec(
                            1.0, {{0.5, 1.0, 1.0}, {0.5, 1.0, 1.0}})),
                        std::invalid_argument);
    }
}

TEST_CASE("companion roots agree with the closed form") {
    for (double gamma : {0.5, 2.0, 6.0, 9.99, 10.0, 10.01, 40.0}) {
        const auto spec = single(2.5, gamma);
        const auto rs = polynomial_roots(characteristic_polynomial(spec));
        const auto cf = closed_form_roots(spec);
        REQUIRE(rs.roots.size() == 2);
        CHECK(std::abs(rs.roots[0] - cf[0]) < 1e-10);
        CHECK(std::abs(rs.roots[1] - cf[1]) < 1e-10);
    }
}

TEST_CASE("multiple root is re-centred to full precision") {
    const auto rs = polynomial_roots(characteristic_polynomial(single(2.5, 10.0)));
    REQUIRE(rs.roots.size() == 2);
    CHECK(std::abs(rs.roots[0] - Cx(-2.5, -1.0)) < 1e-12);
    CHECK(std::abs(rs.roots[1] - Cx(-2.5, -1.0)) < 1e-12);
    CHECK(std::abs(rs.roots[0] - rs.roots[1]) == 0.0);
}

TEST_CASE("root ordering is ascending decay rate") {
    const PseudomodeSpec spec(1.0, {{0.8, 1.2, 3.0}, {0.3, 0.7, 1.0}});
    const auto rs = polynomial_roots(characteristic_polynomial(spec));
    REQUIRE(rs.roots.size() == 3);
    CHECK(rs.roots[0].real() >= rs.roots[1].real());
    CHECK(rs.roots[1].real() >= rs.roots[2].real());
}

TEST_CASE("polynomial validation") {
    CHECK_THROWS_AS(PolynomialCoefficients({Cx(1.0, 0.0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PolynomialCoefficients({Cx(1.0, 0.0), Cx(0.0, 0.0)}),
                    std::invalid_argument);
}

TEST_CASE("exceptional point detection on the root set") {
    SUBCASE("flags the coalesced pair") {
        const auto poly = characteristic_polynomial(single(2.5, 10.0));
        const auto report = detect_lep(poly, polynomial_roots(poly));
        CHECK(report.is_lep);
        REQUIRE(report.coalescing_pairs.size() == 1);
        CHECK(report.coalescing_pairs[0].first == 0);
        CHECK(report.coalescing_pairs[0].second == 1);
        REQUIRE(report.derivative_residuals.size() == 2);
        CHECK(report.derivative_residuals[0] < 1e-8);
    }
    SUBCASE("rejects separated roots") {
        const auto poly = characteristic_polynomial(single(2.4, 10.0));
        const auto report = detect_lep(poly, polynomial_roots(poly));
        CHECK_FALSE(report.is_lep);
        CHECK(report.coalescing_pairs.empty());
    }
}

TEST_CASE("generator eigenvalues from root combinations") {
    const auto rs = polynomial_roots(characteristic_polynomial(single(2.4, 10.0)));
    const Cx r0 = rs.roots[0];
    const Cx r1 = rs.roots[1];

    CHECK(std::abs(liouvillian_eigenvalue(rs, {0, 0, 0, 0})) == 0.0);
    CHECK(std::abs(liouvillian_eigenvalue(rs, {1, 0, 0, 0}) - r0) < 1e-14);
    CHECK(std::abs(liouvillian_eigenvalue(rs, {0, 1, 0, 0}) - std::conj(r0)) <
          1e-14);
    CHECK(std::abs(liouvillian_eigenvalue(rs, {0, 0, 1, 0}) - r1) < 1e-14);

    // Combinations add: (m, n) = (1, 1) on root 0 plus (1, 0) on root 1.
    const Cx expected = 2.0 * r0.real() + r1;
    CHECK(std::abs(liouvillian_eigenvalue(rs, {1, 1, 1, 0}) - expected) < 1e-14);

    CHECK_THROWS_AS(liouvillian_eigenvalue(rs, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(liouvillian_eigenvalue(rs, {1, 0, 0, -1}),
                    std::invalid_argument);
}

TEST_CASE("spectral gap of the root set") {
    auto gap_of = [](double alpha, double gamma) {
        return spectral_gap(
            polynomial_roots(characteristic_polynomial(single(alpha, gamma))));
    };
    CHECK(gap_of(2.5, 10.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(gap_of(2.4, 10.0) == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(gap_of(1.0, 6.0) ==
          doctest::Approx(0.3819660112501051).epsilon(1e-12));
    CHECK(gap_of(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("parameter substitution") {
    const auto base = single(2.0, 8.0);
    const auto g = with_parameter(base, ScanVariable::Gamma, 0, 12.0);
    CHECK(g.modes()[0].gamma == 12.0);
    CHECK(g.modes()[0].alpha == 2.0);
    const auto a = with_parameter(base, ScanVariable::Alpha, 0, 0.5);
    CHECK(a.modes()[0].alpha == 0.5);
    CHECK(a.modes()[0].gamma == 8.0);
    CHECK_THROWS_AS(with_parameter(base, ScanVariable::Gamma, 1, 1.0),
                    std::invalid_argument);
}

TEST_CASE("exceptional point location, resonant single mode") {
    const auto loc = locate_lep(single(2.5, 10.0), ScanVariable::Gamma, 0, 8.0,
                                12.0);
    CHECK(loc.found);
    CHECK(loc.value == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(loc.min_root_gap < 1e-6);
    CHECK(loc.report.is_lep);

    // Sweeping alpha at fixed gamma finds the same surface point.
    const auto la = locate_lep(single(2.5, 10.0), ScanVariable::Alpha, 0, 2.0,
                               3.0);
    CHECK(la.found);
    CHECK(la.value == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("exceptional point location, two-mode generator") {
    // Second resonant mode with its own width pushes the coalescence away
    // from gamma = 4 alpha; located by the gap-minimising general path.
    const PseudomodeSpec base(1.0, {{1.0, 1.0, 4.0}, {0.5, 1.0, 8.0}});
    const auto loc = locate_lep(base, ScanVariable::Gamma, 0, 3.0, 5.0);
    CHECK(loc.found);
    CHECK(std::abs(loc.value - 4.171124545999326) < 1e-6);
    CHECK(loc.min_root_gap < 1e-3);
}

TEST_CASE("no exceptional point off resonance") {
    // Detuned single mode: the root discriminant keeps a nonzero imaginary
    // part for every width, so no coalescence exists on the scan line.
    const PseudomodeSpec base(1.0, {{1.0, 2.0, 4.0}});
    const auto loc = locate_lep(base, ScanVariable::Gamma, 0, 1.0, 20.0);
    CHECK_FALSE(loc.found);
    CHECK(loc.min_root_gap > 0.5);
}

TEST_CASE("location input validation") {
    const auto base = single(1.0, 4.0);
    CHECK_THROWS_AS(locate_lep(base, ScanVariable::Gamma, 0, 5.0, 3.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(locate_lep(base, ScanVariable::Gamma, 2, 1.0, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(locate_lep(base, ScanVariable::Gamma, 0, 1.0, 2.0, 0.0),
                    std::invalid_argument);
}
