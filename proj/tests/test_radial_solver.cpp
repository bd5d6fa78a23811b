#include "blowup/errors.hpp"
#include "blowup/radial_solver.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace blowup;

namespace {

RadialProblem cubic(int N = 1) {
    RadialProblem pb;
    pb.dimension = N;
    pb.p = 2.0;
    pb.nonlinearity = NonlinearitySpec::pure_power(3.0);
    return pb;
}

std::size_t nearest(const SolutionProfile& prof, double r) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < prof.size(); ++i)
        if (std::abs(prof.r[i] - r) < std::abs(prof.r[best] - r)) best = i;
    return best;
}

double interpolate(const SolutionProfile& prof, double r) {
    for (std::size_t i = 0; i + 1 < prof.size(); ++i)
        if (prof.r[i] <= r && r <= prof.r[i + 1]) {
            const double w = (r - prof.r[i]) / (prof.r[i + 1] - prof.r[i]);
            return (1 - w) * prof.u[i] + w * prof.u[i + 1];
        }
    return prof.u.back();
}

}  // namespace

TEST_CASE("zero shot stays zero") {
    const auto shot = shoot(cubic(), 0.0);
    CHECK_FALSE(shot.blow_up_radius.has_value());
    for (double u : shot.profile.u) CHECK(u == 0.0);
}

TEST_CASE("shot interior values match fixed-step RK4") {
    const auto shot = shoot(cubic(), 1.0);
    CHECK_FALSE(shot.blow_up_radius.has_value());
    for (double r : {0.25, 0.5, 0.9}) {
        const auto i = nearest(shot.profile, r);
        const auto [u, du] = oracle::rk4_second_order([](double v) { return v * v * v; }, 1.0, 0.0,
                                                      shot.profile.r[i]);
        CHECK(shot.profile.u[i] == doctest::Approx(u).epsilon(1e-6));
        CHECK(shot.profile.du[i] == doctest::Approx(du).epsilon(1e-6));
    }
    const auto [uR, duR] = oracle::rk4_second_order([](double v) { return v * v * v; }, 1.0, 0.0, 1.0);
    CHECK(shot.boundary_value == doctest::Approx(uR).epsilon(1e-6));
}

TEST_CASE("1D blow-up radius equals the lemniscate closed form") {
    // u'' = u^3, u(0) = a, u'(0) = 0 blows up at sqrt(2) L / a with L = int_0^1 (1-s^4)^(-1/2).
    for (double a : {2.0, 5.0, 40.0}) {
        const auto r = blow_up_radius(cubic(), a, 1.0);
        REQUIRE(r.has_value());
        CHECK(*r == doctest::Approx(std::sqrt(2.0) * oracle::lemniscate_quarter() / a).epsilon(1e-7));
        CHECK(sandwich_integral(NonlinearitySpec::pure_power(3.0), 2.0, a) == doctest::Approx(*r).epsilon(1e-7));
    }
}

TEST_CASE("blow-up radius is nonincreasing in the shooting parameter") {
    double prev = INFINITY;
    for (double a : {4.0, 6.0, 8.0, 16.0, 64.0}) {
        const auto r = blow_up_radius(cubic(3), a, 1.0);
        REQUIRE(r.has_value());
        CHECK(*r <= prev);
        prev = *r;
    }
}

TEST_CASE("KO envelope bounds and monotonicity") {
    double prev = INFINITY;
    for (double s : {0.05, 0.1, 0.3, 0.6, 0.9}) {
        const double e = ko_envelope(cubic(), s);
        CHECK(e >= std::sqrt(2.0) / s);
        CHECK(e < prev);
        prev = e;
    }
    CHECK(ko_envelope(cubic(), 1e-3) > 1e3);
}

TEST_CASE("Dirichlet solutions") {
    const auto pb = cubic(2);
    const auto zero = solve_dirichlet(pb, 0.0);
    for (double u : zero.u) CHECK(std::abs(u) < 1e-14);
    SolutionProfile prev;
    for (double k : {1.0, 2.0, 4.0, 8.0}) {
        const auto prof = solve_dirichlet(pb, k);
        CHECK(prof.boundary_value == doctest::Approx(k).epsilon(1e-9));
        CHECK(prof.residual_norm <= 1e-9);
        if (prev.size()) CHECK(comparison_check(prev, prof).ordered);
        prev = prof;
    }
}

TEST_CASE("Dirichlet solutions lie below the envelope") {
    const auto pb = cubic();
    const auto prof = solve_dirichlet(pb, 64.0);
    for (std::size_t i = 0; i < prof.size(); i += 7) {
        const double d = prof.d[i];
        if (d < 1e-3) continue;
        CHECK(prof.u[i] <= ko_envelope(pb, d) * (1 + 1e-9));
    }
}

TEST_CASE("large solution of u'' = u^3 near the boundary") {
    const auto prof = large_solution(cubic(), default_k_schedule());
    CHECK(prof.blow_up);
    for (std::size_t i = 0; i < prof.size(); ++i) {
        CHECK(prof.du[i] >= 0.0);
        if (prof.d[i] <= 1e-1 && prof.d[i] >= 1e-3)
            CHECK(prof.u[i] * prof.d[i] / std::sqrt(2.0) == doctest::Approx(1.0).epsilon(5e-3));
    }
}

TEST_CASE("large solution does not depend on the schedule") {
    std::vector<double> pow3;
    for (int i = 0; i <= 10; ++i) pow3.push_back(std::pow(3.0, i));
    const auto a = large_solution(cubic(), default_k_schedule());
    const auto b = large_solution(cubic(), pow3);
    for (double r : {0.0, 0.2, 0.4, 0.5}) CHECK(interpolate(a, r) == doctest::Approx(interpolate(b, r)).epsilon(1e-6));
}

TEST_CASE("larger coefficient gives a smaller large solution") {
    auto big = cubic();
    big.coefficient = Coefficient::constant(4.0);
    const auto u = large_solution_direct(cubic());
    const auto v = large_solution_direct(big);
    const auto c = comparison_check(v, u);
    CHECK(c.ordered);
}

TEST_CASE("comparison check") {
    const auto a = solve_dirichlet(cubic(), 1.0);
    const auto b = solve_dirichlet(cubic(), 2.0);
    const auto same = comparison_check(a, a);
    CHECK(same.ordered);
    CHECK(same.max_violation == 0.0);
    CHECK(comparison_check(a, b).ordered);
    const auto swapped = comparison_check(b, a);
    CHECK_FALSE(swapped.ordered);
    CHECK(swapped.max_violation > 0.0);
}

TEST_CASE("degenerate and singular p with a distance weight") {
    for (double p : {1.5, 3.0}) {
        RadialProblem pb;
        pb.p = p;
        pb.alpha = 0.25;
        pb.nonlinearity = NonlinearitySpec::pure_power(p + 1.0);
        const auto prof = large_solution_direct(pb);
        CHECK(prof.blow_up);
        CHECK(std::is_sorted(prof.u.begin(), prof.u.end()));
    }
}

TEST_CASE("interval problem with u(0) = 0") {
    auto pb = cubic();
    pb.left = LeftCondition::Dirichlet0;
    const auto prof = solve_dirichlet(pb, 3.0);
    CHECK(std::abs(prof.u.front()) < 1e-12);
    CHECK(prof.boundary_value == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("invalid problems are rejected") {
    auto pb = cubic();
    pb.p = 0.5;
    CHECK_THROWS_AS(pb.validate(), Error);
}
