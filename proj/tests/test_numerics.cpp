#include "blowup/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace blowup::num;

TEST_CASE("Gauss-Kronrod integrates smooth polynomials and exponentials") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 2.0) ==
          doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("tanh-sinh handles an inverse square root endpoint") {
    const double v = integrate_singular([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("tail integral of a power decay") {
    const double v = tail_integral([](double x) { return std::pow(x, -3.0); }, 1.0, 3.0);
    CHECK(v == doctest::Approx(0.5).epsilon(1e-11));
    const double w = tail_integral([](double x) { return 1.0 / (x * x * (1.0 + 1.0 / x)); }, 1.0, 2.0);
    CHECK(w == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("five-point differences on a cubic are exact up to roundoff") {
    auto f = [](double x) { return x * x * x; };
    CHECK(diff1(f, 2.0, 1e-3) == doctest::Approx(12.0).epsilon(1e-10));
    CHECK(diff2(f, 2.0, 1e-3) == doctest::Approx(12.0).epsilon(1e-6));
}

TEST_CASE("Richardson removes polynomial error terms") {
    std::vector<double> h, v;
    for (int j = 0; j < 6; ++j) {
        const double hj = std::pow(0.5, j);
        h.push_back(hj);
        v.push_back(3.0 + 2.0 * hj - 5.0 * hj * hj);
    }
    const auto ex = richardson(h, v, 2);
    CHECK(ex.value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(ex.converged(1e-10));
}

TEST_CASE("Aitken accelerates geometric partial sums") {
    std::vector<double> s;
    double sum = 0.0;
    for (int n = 0; n < 8; ++n) {
        sum += std::pow(0.7, n);
        s.push_back(sum);
    }
    const auto a = aitken(s);
    CHECK(a.back() == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
    CHECK(accelerate(s).value == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
}

TEST_CASE("accelerate_best picks a deeper level for algebraic convergence") {
    // s_n = 1 + n^(-2/3): a single Aitken pass leaves an algebraic error.
    std::vector<double> s;
    for (int n = 1; n <= 17; ++n) s.push_back(1.0 + std::pow(2.0, -2.0 * n / 3.0) + std::pow(2.0, -n));
    const auto one = accelerate(s, 1);
    const auto best = accelerate_best(s, 4);
    CHECK(std::abs(best.value - 1.0) <= std::abs(one.value - 1.0) + 1e-15);
    CHECK(best.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("compensated summation recovers small terms lost in naive order") {
    CompensatedSum c;
    c.add(1.0);
    for (int i = 0; i < 1000; ++i) c.add(1e-17);
    c.add(-1.0);
    CHECK(c.value() == doctest::Approx(1e-14).epsilon(1e-6));
}

TEST_CASE("monotone table interpolates nodes exactly and stays monotone") {
    std::vector<double> x, y;
    for (double t : log_grid(1e-6, 1.0, 25)) {
        x.push_back(t);
        y.push_back(std::pow(t, 1.5));
    }
    MonotoneTable tab(x, y, true);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(tab(x[i]) == doctest::Approx(y[i]).epsilon(1e-13));
    // Log-log interpolation of an exact power is exact between nodes.
    CHECK(tab(3e-4) == doctest::Approx(std::pow(3e-4, 1.5)).epsilon(1e-10));
    double prev = 0.0;
    for (double t : log_grid(1e-6, 1.0, 400)) {
        CHECK(tab(t) >= prev);
        prev = tab(t);
    }
}
