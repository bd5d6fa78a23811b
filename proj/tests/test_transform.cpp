#include "blowup/transform.hpp"

#include <doctest.h>

#include <cmath>

using namespace blowup;

TEST_CASE("p = 2, f = u^3: phi(t) = sqrt(2)/t") {
    const PhiTransform phi(NonlinearitySpec::pure_power(3.0), 2.0);
    CHECK(phi.phi_inverse(std::sqrt(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
    for (double u : {0.5, 3.0, 1e4}) CHECK(phi.phi_inverse(u) == doctest::Approx(std::sqrt(2.0) / u).epsilon(1e-11));
    CHECK(phi.phi(1.0) == doctest::Approx(1.41421356).epsilon(1e-8));
    CHECK(phi.phi(0.1) == doctest::Approx(14.1421356).epsilon(1e-8));
}

TEST_CASE("p = 3, f = u^4: power closed form") {
    const double p = 3.0, sigma = 3.0, q = 1.5;
    const double C = (p / (sigma + 2.0 - p)) * std::pow((sigma + 2.0) / q, 1.0 / p);
    const double e = (sigma + 2.0 - p) / p;
    const PhiTransform phi(NonlinearitySpec::pure_power(4.0), p);
    for (double u : {0.3, 2.0, 1e3}) CHECK(phi.phi_inverse(u) == doctest::Approx(C * std::pow(u, -e)).epsilon(1e-10));
    for (double t : {1e-6, 1e-3, 0.5}) CHECK(phi.phi(t) == doctest::Approx(std::pow(t / C, -1.0 / e)).epsilon(1e-8));
}

TEST_CASE("round trip on [1e-6, 1]") {
    const PhiTransform phi(NonlinearitySpec::from_config(2.0, "log1p"), 2.0);
    for (double t : num::log_grid(1e-6, 1.0, 13)) CHECK(phi.phi_inverse(phi.phi(t)) == doctest::Approx(t).epsilon(1e-8));
}

TEST_CASE("phi is decreasing and unbounded at zero") {
    const PhiTransform phi(NonlinearitySpec::from_config(1.5, "loglog"), 2.5);
    double prev = INFINITY;
    for (double t : num::log_grid(1e-8, 1.0, 30)) {
        const double v = phi.phi(t);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(phi.phi(1e-12) > 1e6);
}

TEST_CASE("identity residuals") {
    const PhiTransform phi(NonlinearitySpec::pure_power(3.0), 2.0);
    const auto a = phi.identity_residuals(1.0);
    CHECK(a.r1 < 1e-6);
    CHECK(a.r1 >= 0.0);
    const auto b = phi.identity_residuals(0.01);
    CHECK(b.r2 < 1e-5);
    CHECK(b.r2 >= 0.0);
    // phi' = -sqrt(2)/t^2 exactly.
    CHECK(phi.phi_prime(0.2) == doctest::Approx(-std::sqrt(2.0) / 0.04).epsilon(1e-8));
}

TEST_CASE("NRVZ index of phi") {
    CHECK(PhiTransform(NonlinearitySpec::pure_power(3.0), 2.0).phi_nrvz_index().value == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(PhiTransform(NonlinearitySpec::pure_power(5.0), 2.0).phi_nrvz_index().value == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(PhiTransform(NonlinearitySpec::pure_power(4.0), 3.0).phi_nrvz_index().value == doctest::Approx(-1.5).epsilon(1e-6));
}

TEST_CASE("p = 2 derivative ratios near zero") {
    // phi'/(t phi'') -> -sigma/(sigma+2), phi/(t^2 phi'') -> sigma^2/(2(sigma+2)).
    for (double q : {3.0, 5.0}) {
        const double sigma = q - 1.0;
        const PhiTransform phi(NonlinearitySpec::pure_power(q), 2.0);
        const double t = 1e-4;
        CHECK(phi.phi_prime(t) / (t * phi.phi_second(t)) == doctest::Approx(-sigma / (sigma + 2.0)).epsilon(1e-3));
        CHECK(phi.phi(t) / (t * t * phi.phi_second(t)) ==
              doctest::Approx(sigma * sigma / (2.0 * (sigma + 2.0))).epsilon(1e-3));
    }
}

TEST_CASE("cached table agrees with direct inversion") {
    const PhiTransform phi(NonlinearitySpec::from_config(2.0, "log1p"), 2.0);
    for (double t : {1e-7, 3e-5, 0.02, 1.0}) CHECK(phi.phi_cached(t) == doctest::Approx(phi.phi(t)).epsilon(1e-6));
}
