#include "blowup/errors.hpp"
#include "blowup/karamata.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace blowup;

namespace {

KaramataSpec t_times_one_plus_t() {
    return KaramataSpec::custom([](double t) { return t * (1.0 + t); }, 0.0, 1.0,
                                Monotonicity::Nondecreasing, [](double t) { return 1.0 + 2.0 * t; });
}

}  // namespace

TEST_CASE("big_k trivial values") {
    CHECK(big_k(KaramataSpec::power(1.0, 0.0), 1.0) == doctest::Approx(0.5).epsilon(1e-13));
    // k = 1, alpha = 1: int_0^1 s^(-1/2) ds.
    CHECK(big_k(KaramataSpec::power(0.0, 1.0), 1.0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("big_k of ln(1+t^2) against composite Simpson") {
    const auto k = KaramataSpec::log1p_power(2.0, 0.0);
    const double ref = oracle::simpson([](double s) { return std::log1p(s * s); }, 0.0, 0.5, 2000);
    CHECK(big_k(k, 0.5) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("big_k is increasing and vanishes at zero") {
    const auto k = KaramataSpec::power(0.5, -0.5);
    double prev = 0.0;
    for (double t : num::log_grid(1e-10, 1.0, 40)) {
        const double K = big_k(k, t);
        CHECK(K > prev);
        prev = K;
    }
    CHECK(big_k(k, 1e-12) < 1e-12);
}

TEST_CASE("l1 for exact powers equals 1/(1+q-alpha/2)") {
    const auto a = estimate_limits(KaramataSpec::power(1.0, 0.0));
    CHECK(a.l1 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(a.l0) < 1e-6);
    const auto b = estimate_limits(KaramataSpec::power(2.0, 1.0));
    CHECK(b.l1 == doctest::Approx(0.4).epsilon(1e-6));
    for (double q : {0.0, 0.25, 0.5, 1.5, 3.0})
        for (double alpha : {-0.5, 0.0, 0.5}) {
            const auto lim = estimate_limits(KaramataSpec::power(q, alpha));
            CHECK(std::abs(lim.l1 - 1.0 / (1.0 + q - 0.5 * alpha)) < 1e-6);
            CHECK(std::abs(lim.l0) < 1e-6);
            CHECK(std::abs(lim.nrvz_index_k - lim.nrvz_target) < 1e-4);
        }
}

TEST_CASE("second-order limit of an exact power is zero") {
    for (double zeta : {0.5, 1.0}) {
        const auto k = KaramataSpec::power(0.5, 0.0);
        const auto so = second_order_limit(k, YKind::power(zeta), 1.0 / 1.5);
        CHECK(std::abs(so.value) < 1e-6);
        CHECK(so.cls == SecondOrderClass::K01_zeta);
    }
}

TEST_CASE("second-order limit against series expansions") {
    // k = t(1+t): K/k = t/2 - t^2/6 + ..., so (Q' - 1/2)/t -> -1/3.
    const auto so = second_order_limit(t_times_one_plus_t(), YKind::power(1.0), 0.5);
    CHECK(so.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-4));
    // k = ln(1+t^2): Q' = 1/3 + t^2/5 + ..., so the t-scale limit is 0.
    const auto so2 = second_order_limit(KaramataSpec::log1p_power(2.0, 0.0), YKind::power(1.0), 1.0 / 3.0);
    CHECK(std::abs(so2.value) < 1e-4);
}

TEST_CASE("dual limit equals 1 - l1") {
    const auto d1 = dual_limit_check(KaramataSpec::power(1.0, 0.0));
    CHECK(d1.residual < 1e-6);
    CHECK(d1.target == doctest::Approx(0.5).epsilon(1e-6));
    const auto d2 = dual_limit_check(KaramataSpec::power(0.0, 0.0));
    CHECK(std::abs(d2.limit) < 1e-6);
    CHECK(d2.target == doctest::Approx(0.0).epsilon(1e-6));
    // k = t^2, alpha = 1: K = t^(5/2)/(5/2), target 1 - 1/2.5.
    const auto d3 = dual_limit_check(KaramataSpec::power(2.0, 1.0));
    CHECK(d3.residual < 1e-6);
    CHECK(d3.target == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("config kinds and validation") {
    CHECK(KaramataSpec::from_config("log1p_power", 1.0, 0.0).kind == KaramataKind::Log1pPower);
    CHECK_THROWS_AS(KaramataSpec::from_config("bogus", 1.0, 0.0), Error);
    CHECK_NOTHROW(KaramataSpec::power(1.0, 0.0).validate());
}
