#include "blowup/numerics.hpp"

#include "blowup/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

// pchip.hpp in Boost 1.74 calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace blowup {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::NonIntegrableWeight: return "NonIntegrableWeight";
        case ErrorKind::NonConvergent: return "NonConvergent";
        case ErrorKind::WrongScale: return "WrongScale";
        case ErrorKind::WrongClass: return "WrongClass";
        case ErrorKind::Inconclusive: return "Inconclusive";
        case ErrorKind::DivergentIntegral: return "DivergentIntegral";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::StepUnderflow: return "StepUnderflow";
        case ErrorKind::BracketingFailure: return "BracketingFailure";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NotSaturated: return "NotSaturated";
        case ErrorKind::DegenerateExponent: return "DegenerateExponent";
        case ErrorKind::UnsupportedKind: return "UnsupportedKind";
        case ErrorKind::WindowTooSmall: return "WindowTooSmall";
        case ErrorKind::DecompositionMismatch: return "DecompositionMismatch";
        case ErrorKind::InsufficientResolution: return "InsufficientResolution";
        case ErrorKind::FirstOrderMismatch: return "FirstOrderMismatch";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace blowup

namespace blowup::num {

namespace bq = boost::math::quadrature;

double integrate(const ScalarFn& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    // Below ~50 eps the Kronrod error estimate is roundoff and deeper bisection only grows it.
    constexpr double floor = 50 * std::numeric_limits<double>::epsilon();
    double err = 0.0;
    return bq::gauss_kronrod<double, 31>::integrate(f, a, b, 8, std::max(rel_tol, floor), &err);
}

double integrate_singular(const ScalarFn& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    thread_local bq::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    return ts.integrate(f, a, b, rel_tol, &err, &l1);
}

double tail_integral(const ScalarFn& g, double a, double decay, double rel_tol) {
    if (!(decay > 1.0)) throw Error(ErrorKind::DivergentIntegral, "tail decay index <= 1");
    const double nominal_ratio = std::exp2(1.0 - decay);
    CompensatedSum sum;
    double lo = a, prev_panel = 0.0;
    for (int j = 0; j < 1000; ++j) {
        const double hi = 2.0 * lo;
        const double panel = integrate(g, lo, hi, 1e-14);
        sum.add(panel);
        double ratio = nominal_ratio;
        if (j >= 2 && prev_panel > 0.0) {
            const double observed = panel / prev_panel;
            if (observed > 0.0 && observed < 1.0) ratio = observed;
        }
        const double remainder = panel * ratio / (1.0 - ratio);
        if (j >= 2 && remainder < rel_tol * sum.value()) {
            sum.add(remainder);
            return sum.value();
        }
        if (hi > 1e290) {
            sum.add(remainder);
            return sum.value();
        }
        prev_panel = panel;
        lo = hi;
    }
    return sum.value();
}

double diff1(const ScalarFn& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double diff2(const ScalarFn& f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) /
           (12 * h * h);
}

std::vector<double> log_grid(double a, double b, std::size_t n) {
    std::vector<double> g(n);
    const double la = std::log(a), lb = std::log(b);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(la + (lb - la) * double(i) / double(n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

bool Extrapolation::converged(double rel_tol, double abs_floor) const {
    return std::abs(value - previous) <= rel_tol * std::max(std::abs(value), abs_floor / rel_tol);
}

double extrapolate_to_zero(std::span<const double> h, std::span<const double> v) {
    std::vector<double> p(v.begin(), v.end());
    const std::size_t n = p.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
    return p[0];
}

Extrapolation richardson(std::span<const double> h, std::span<const double> v, int order) {
    const std::size_t n = v.size();
    if (n < 2) throw Error(ErrorKind::NonConvergent, "richardson needs at least two samples");
    const std::size_t w = std::min<std::size_t>(order + 1, n - 1);
    Extrapolation out;
    out.raw.assign(v.begin(), v.end());
    out.value = extrapolate_to_zero(h.subspan(n - w), v.subspan(n - w));
    out.previous = extrapolate_to_zero(h.subspan(n - 1 - w, w), v.subspan(n - 1 - w, w));
    return out;
}

std::vector<double> aitken(std::span<const double> s) {
    std::vector<double> out;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t j = 0; j + 2 < s.size(); ++j) {
        const double d1 = s[j + 1] - s[j];
        const double d2 = s[j + 2] - s[j + 1];
        const double scale = std::max({std::abs(s[j]), std::abs(s[j + 1]), std::abs(s[j + 2])});
        if (std::abs(d2) <= 64 * eps * scale) {
            out.push_back(s[j + 2]);
            continue;
        }
        const double den = d2 - d1;
        if (std::abs(den) <= 64 * eps * scale) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        out.push_back(s[j + 2] - d2 * d2 / den);
    }
    return out;
}

Extrapolation accelerate(std::span<const double> s, int levels) {
    Extrapolation out;
    out.raw.assign(s.begin(), s.end());
    if (s.empty()) throw Error(ErrorKind::NonConvergent, "empty sequence");
    std::vector<double> cur(s.begin(), s.end());
    out.value = cur.back();
    out.previous = cur.size() >= 2 ? cur[cur.size() - 2] : cur.back();
    for (int level = 0; level < levels; ++level) {
        std::vector<double> next;
        for (double x : aitken(cur))
            if (std::isfinite(x)) next.push_back(x);
        if (next.size() < 2) break;
        out.value = next.back();
        out.previous = next[next.size() - 2];
        cur = std::move(next);
    }
    return out;
}

Extrapolation accelerate_best(std::span<const double> s, int max_levels) {
    Extrapolation best = accelerate(s, 0);
    for (int level = 1; level <= max_levels; ++level) {
        const auto e = accelerate(s, level);
        if (std::abs(e.value - e.previous) < std::abs(best.value - best.previous)) best = e;
    }
    return best;
}

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
    abs_ += std::abs(x);
}

MonotoneTable::MonotoneTable(std::vector<double> x, std::vector<double> y, bool log_log)
    : x_(std::move(x)), y_(std::move(y)), log_log_(log_log) {
    if (x_.size() != y_.size() || x_.size() < 4)
        throw Error(ErrorKind::DomainError, "monotone table needs >= 4 matching nodes");
    std::vector<double> xs = x_, ys = y_;
    if (log_log_) {
        for (auto& v : xs) v = std::log(v);
        for (auto& v : ys) v = std::log(v);
    }
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(xs), std::move(ys));
    impl_ = std::make_shared<const ScalarFn>([spline](double t) { return (*spline)(t); });
}

double MonotoneTable::operator()(double x) const {
    if (!impl_) throw Error(ErrorKind::DomainError, "empty table");
    if (log_log_) return std::exp((*impl_)(std::log(x)));
    return (*impl_)(x);
}

}  // namespace blowup::num
