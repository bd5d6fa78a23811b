#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace blowup::num {

using ScalarFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (31 point) on a finite interval.
double integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-13);

// tanh-sinh on a finite interval; tolerates integrable endpoint singularities.
double integrate_singular(const ScalarFn& f, double a, double b, double rel_tol = 1e-13);

// Integral of g over [a, inf) for g regularly varying with index -decay (decay > 1).
// Summed over doubling panels; the geometric remainder is added in closed form.
double tail_integral(const ScalarFn& g, double a, double decay, double rel_tol = 1e-14);

// Five-point central differences.
double diff1(const ScalarFn& f, double x, double h);
double diff2(const ScalarFn& f, double x, double h);

std::vector<double> log_grid(double a, double b, std::size_t n);

struct Extrapolation {
    double value = 0.0;
    double previous = 0.0;  // same scheme, one grid point earlier
    std::vector<double> raw;
    bool converged(double rel_tol, double abs_floor = 1e-12) const;
};

// Polynomial extrapolation to h = 0 through the given points (Neville).
double extrapolate_to_zero(std::span<const double> h, std::span<const double> v);

// Richardson: eliminates error terms h^1..h^order using the last order+1 samples.
Extrapolation richardson(std::span<const double> h, std::span<const double> v, int order);

// Aitken delta-squared transform; NaN where the second difference degenerates.
std::vector<double> aitken(std::span<const double> s);

// Aitken applied `levels` times to a sequence with geometric-like error. Stops early
// when a level has fewer than two finite entries; with none at all, falls back to the
// raw sequence.
Extrapolation accelerate(std::span<const double> s, int levels = 1);

// Among levels 0..max_levels of iterated Aitken, the one whose last two entries agree best.
Extrapolation accelerate_best(std::span<const double> s, int max_levels);

class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }
    double magnitude() const { return abs_; }

private:
    double sum_ = 0.0, comp_ = 0.0, abs_ = 0.0;
};

// Monotone cubic (PCHIP) interpolation, optionally in log-log coordinates.
class MonotoneTable {
public:
    MonotoneTable() = default;
    MonotoneTable(std::vector<double> x, std::vector<double> y, bool log_log);
    double operator()(double x) const;
    bool empty() const { return !impl_; }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

private:
    std::vector<double> x_, y_;
    bool log_log_ = false;
    std::shared_ptr<const ScalarFn> impl_;
};

}  // namespace blowup::num
