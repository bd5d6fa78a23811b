#include "blowup/asymptotics.hpp"
#include "blowup/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace blowup;

TEST_CASE("one-dimensional rate and constant") {
    const auto a = predict_1d(2.0, 0.0, 3.0);
    CHECK(a.beta == doctest::Approx(1.0));
    CHECK(a.psi_R == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    const auto b = predict_1d(3.0, 0.5, 4.0);
    CHECK(b.beta == doctest::Approx(1.25));
    // [1.25^2 (2.25 * 2 - 0.5)]^(1/2) = 2.5
    CHECK(b.psi_R == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(predict_1d(2.0, 0.0, 3.0, 2.0).beta == doctest::Approx(2.0));
    CHECK(predict_1d(2.0, 1.0, 3.0).outside_theory_range);
    CHECK_THROWS_AS(predict_1d(2.0, 0.0, 1.0), Error);
}

TEST_CASE("first-order constants") {
    const auto a = predict_first_order(2.0, 0.0, 2.0, 0.0, 1.0, 1.0, 1.0, XiVariant::TheoremNumerator2);
    CHECK(*a.xi0 == doctest::Approx(0.70710678).epsilon(1e-8));
    const auto b = predict_first_order(2.0, 0.0, 2.0, 1.0, 1.0, 1.0, 1.0, XiVariant::TheoremNumerator2);
    CHECK(*b.xi0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("variants coincide at p = 2 and differ otherwise") {
    for (double alpha : {-0.5, 0.0, 0.5})
        for (double l1 : {0.0, 0.4, 1.0}) {
            CHECK(xi_constant(2.0, alpha, 2.0, l1, 1.3, XiVariant::TheoremNumerator2) ==
                  xi_constant(2.0, alpha, 2.0, l1, 1.3, XiVariant::ProofNumeratorP));
            CHECK(xi_constant(3.0, alpha, 3.0, l1, 1.3, XiVariant::TheoremNumerator2) !=
                  xi_constant(3.0, alpha, 3.0, l1, 1.3, XiVariant::ProofNumeratorP));
        }
    // l1 = 0: ratio (2/p)^(1/(2+sigma-p)).
    const double th = xi_constant(3.0, 0.0, 3.0, 0.0, 1.0, XiVariant::TheoremNumerator2);
    const double pr = xi_constant(3.0, 0.0, 3.0, 0.0, 1.0, XiVariant::ProofNumeratorP);
    CHECK(th / pr == doctest::Approx(std::pow(2.0 / 3.0, 0.5)).epsilon(1e-14));
}

TEST_CASE("xi0 is decreasing in c and bracketed by xi1, xi2") {
    double prev = INFINITY;
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double x = xi_constant(2.5, 0.3, 2.0, 0.6, c, XiVariant::TheoremNumerator2);
        CHECK(x < prev);
        prev = x;
    }
    const auto f = predict_first_order(2.5, 0.3, 2.0, 0.6, 0.5, 2.0, 1.0, XiVariant::ProofNumeratorP);
    CHECK(f.xi2 <= *f.xi0);
    CHECK(*f.xi0 <= f.xi1);
}

TEST_CASE("G limit table") {
    CHECK(g_limit(1.0, YKind::power(1.0)).value == 1.0);
    CHECK(g_limit(0.5, YKind::log(1.0)).value == 0.0);
    CHECK(g_limit(1.0, YKind::power(0.5)).value == 0.0);
    const auto amb = g_limit(0.7, YKind::power(0.7));
    CHECK(amb.ambiguous);
    CHECK(amb.left == 0.0);
    CHECK(amb.right == 1.0);
}

TEST_CASE("second-order constant") {
    CHECK(predict_chi(2.0, 0.0, 0.0, 1.0, 0.0, 1.0, YKind::log(1.0)) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(predict_chi(2.0, 0.0, 0.0, 0.0, 0.0, 1.0, YKind::power(1.0)) == 0.0);
    CHECK(predict_chi(2.0, 0.0, 0.5, 1.0, 0.0, 1.0, YKind::power(1.0)) == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("I4 limit for a power weight") {
    const PhiTransform phi(NonlinearitySpec::pure_power(3.0), 2.0);
    ITermConfig c;
    c.k = KaramataSpec::power(0.5, 0.0);
    c.phi = &phi;
    c.sigma = 2.0;
    c.l1 = 1.0 / 1.5;
    c.y = YKind::power(1.0);
    c.xi0 = xi_constant(2.0, 0.0, 2.0, c.l1, 1.0, XiVariant::TheoremNumerator2);
    const auto lim = I_term_limits(c);
    CHECK(lim.target.I4p == doctest::Approx(-2.0 * c.l1 / 4.0).epsilon(1e-14));
    CHECK(std::abs(lim.limit.I4p - lim.target.I4p) < 1e-3);
    CHECK(std::abs(lim.limit.I4m - lim.target.I4m) < 1e-3);
    CHECK(std::abs(lim.limit.I1 - lim.target.I1) < 1e-3);
}
