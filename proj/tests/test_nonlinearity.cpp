#include "blowup/errors.hpp"
#include "blowup/nonlinearity.hpp"

#include <doctest.h>

#include <cmath>

using namespace blowup;

TEST_CASE("big_f of pure powers") {
    CHECK(big_f(NonlinearitySpec::pure_power(3.0), 2.0) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(big_f(NonlinearitySpec::pure_power(2.0), 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    for (double q : {1.5, 2.0, 4.0})
        for (double t : {0.1, 1.0, 30.0})
            CHECK(big_f(NonlinearitySpec::pure_power(q), t) ==
                  doctest::Approx(std::pow(t, q + 1) / (q + 1)).epsilon(1e-12));
}

TEST_CASE("big_f of u^3 ln(1+u) against the termwise log series") {
    // int_0^1 u^3 ln(1+u) du = sum_n (-1)^(n+1) / (n (n+4)); averaging two consecutive
    // partial sums of the alternating series tames the tail.
    double s = 0.0, prev = 0.0;
    for (int n = 1; n <= 200000; ++n) {
        prev = s;
        s += (n % 2 ? 1.0 : -1.0) / (double(n) * (n + 4));
    }
    const double series = 0.5 * (s + prev);
    const auto f = NonlinearitySpec::from_config(2.0, "log1p");
    CHECK(big_f(f, 1.0) == doctest::Approx(series).epsilon(1e-9));
}

TEST_CASE("Keller-Osserman examples") {
    const auto v = keller_osserman(NonlinearitySpec::pure_power(3.0), 2.0);
    CHECK(v.convergent);
    CHECK(v.status == KOStatus::Convergent);
    // int_1^inf (t^4/4)^(-1/2) dt = 2.
    CHECK(v.f2_integral == doctest::Approx(2.0).epsilon(1e-9));
    // (q F)^(-1/2) with q = 2: int_1^inf (t^4/2)^(-1/2) dt = sqrt(2).
    CHECK(std::abs(v.integral_value - std::sqrt(2.0)) < 1e-8);
    CHECK_FALSE(keller_osserman(NonlinearitySpec::pure_power(1.0), 2.0).convergent);
}

TEST_CASE("Keller-Osserman grid: convergent iff q > p - 1") {
    for (double p : {1.5, 2.0, 3.0})
        for (int j = 1; j <= 10; ++j) {
            const double q = 0.5 * j;
            const auto v = keller_osserman(NonlinearitySpec::pure_power(q), p);
            CAPTURE(p);
            CAPTURE(q);
            CHECK(v.convergent == (q > p - 1.0));
            if (q <= p - 1.0) CHECK(v.status != KOStatus::Convergent);
        }
}

TEST_CASE("regular variation index") {
    CHECK(rv_index(NonlinearitySpec::pure_power(3.0)).value == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(rv_index(NonlinearitySpec::from_config(1.0, "log1p")).value == doctest::Approx(2.0).epsilon(1e-2));
    NonlinearitySpec osc;
    osc.sigma = 2.0;
    osc.kind = SlowlyVarying::Custom;
    osc.custom_L = [](double u) { return 2.0 + std::sin(std::log(std::log(std::max(u, 3.0)))); };
    CHECK_THROWS_AS(rv_index(osc), Error);
}

TEST_CASE("ratio limits match closed forms") {
    const auto a = ratio_limits(NonlinearitySpec::pure_power(3.0), 2.0);
    CHECK(a.lim_F_over_zf == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(a.lim_keller_ratio == doctest::Approx(0.25).epsilon(1e-4));
    const auto b = ratio_limits(NonlinearitySpec::pure_power(4.0), 3.0);
    CHECK(b.lim_keller_ratio == doctest::Approx(2.0 / 15.0).epsilon(1e-4));
    CHECK(std::abs(b.lim_F_over_zf - b.target_F_over_zf) < 1e-4);
}

TEST_CASE("uniform regular variation on compacts for pure powers") {
    const auto f = NonlinearitySpec::pure_power(3.0);
    const double u = 1e8;
    for (double xi : {0.5, 2.0, 5.0}) CHECK(f.f(xi * u) / f.f(u) == doctest::Approx(std::pow(xi, 3.0)).epsilon(1e-4));
}

TEST_CASE("log_f stays finite beyond the double range of f") {
    const auto f = NonlinearitySpec::from_config(2.0, "loglog");
    CHECK(std::isfinite(f.log_f(1e200)));
    CHECK(f.log_f(10.0) == doctest::Approx(std::log(f.f(10.0))).epsilon(1e-12));
}

TEST_CASE("slowly varying config strings") {
    CHECK(NonlinearitySpec::from_config(2.0, "explog:0.5").kind == SlowlyVarying::ExpLog);
    CHECK_THROWS_AS(NonlinearitySpec::from_config(2.0, "explog:1.5"), Error);
    CHECK_THROWS_AS(NonlinearitySpec::from_config(2.0, "nope"), Error);
}
