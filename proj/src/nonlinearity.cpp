#include "blowup/nonlinearity.hpp"

#include "blowup/errors.hpp"
#include "blowup/numerics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace blowup {

NonlinearitySpec NonlinearitySpec::pure_power(double power_q) {
    NonlinearitySpec s;
    s.sigma = power_q - 1.0;
    return s;
}

NonlinearitySpec NonlinearitySpec::from_config(double sigma, const std::string& sv) {
    NonlinearitySpec s;
    s.sigma = sigma;
    if (sv == "one") {
        s.kind = SlowlyVarying::One;
    } else if (sv == "log1p") {
        s.kind = SlowlyVarying::Log1p;
    } else if (sv == "loglog") {
        s.kind = SlowlyVarying::LogLog;
    } else if (sv.rfind("explog:", 0) == 0) {
        s.kind = SlowlyVarying::ExpLog;
        try {
            s.explog_a = std::stod(sv.substr(7));
        } catch (const std::exception&) {
            throw Error(ErrorKind::ConfigError, "bad explog exponent in '" + sv + "'");
        }
        if (!(s.explog_a > 0.0 && s.explog_a < 1.0))
            throw Error(ErrorKind::ConfigError, "explog exponent must lie in (0,1)");
    } else {
        throw Error(ErrorKind::UnsupportedKind, "unknown slowly_varying '" + sv + "'");
    }
    return s;
}

double NonlinearitySpec::L(double u) const {
    switch (kind) {
        case SlowlyVarying::One: return 1.0;
        case SlowlyVarying::Log1p: return std::log1p(u);
        case SlowlyVarying::LogLog: return std::log(std::log(std::numbers::e + u));
        case SlowlyVarying::ExpLog: return std::exp(std::pow(std::log1p(u), explog_a));
        case SlowlyVarying::Custom: return custom_L(u);
    }
    return 1.0;
}

double NonlinearitySpec::log_L(double u) const {
    switch (kind) {
        case SlowlyVarying::One: return 0.0;
        case SlowlyVarying::Log1p: return std::log(std::log1p(u));
        case SlowlyVarying::LogLog: return std::log(std::log(std::log(std::numbers::e + u)));
        case SlowlyVarying::ExpLog: return std::pow(std::log1p(u), explog_a);
        case SlowlyVarying::Custom: return std::log(custom_L(u));
    }
    return 0.0;
}

double NonlinearitySpec::L_prime(double u) const {
    switch (kind) {
        case SlowlyVarying::One: return 0.0;
        case SlowlyVarying::Log1p: return 1.0 / (1.0 + u);
        case SlowlyVarying::LogLog: {
            const double e = std::numbers::e + u;
            return 1.0 / (e * std::log(e));
        }
        case SlowlyVarying::ExpLog: {
            const double l = std::log1p(u);
            if (l <= 0.0) return 0.0;
            return L(u) * explog_a * std::pow(l, explog_a - 1.0) / (1.0 + u);
        }
        case SlowlyVarying::Custom: {
            if (custom_L_prime) return custom_L_prime(u);
            const double h = std::max(u, 1e-8) * 1e-6;
            return num::diff1(custom_L, u, h);
        }
    }
    return 0.0;
}

double NonlinearitySpec::f(double u) const {
    if (u <= 0.0) return 0.0;
    return std::pow(u, sigma + 1.0) * L(u);
}

double NonlinearitySpec::log_f(double u) const {
    if (u <= 0.0) return -std::numeric_limits<double>::infinity();
    return (sigma + 1.0) * std::log(u) + log_L(u);
}

double NonlinearitySpec::f_prime(double u) const {
    if (u <= 0.0) return 0.0;
    return (sigma + 1.0) * std::pow(u, sigma) * L(u) + std::pow(u, sigma + 1.0) * L_prime(u);
}

std::string NonlinearitySpec::describe() const {
    std::ostringstream os;
    os << "u^" << sigma + 1.0;
    switch (kind) {
        case SlowlyVarying::One: break;
        case SlowlyVarying::Log1p: os << "*ln(1+u)"; break;
        case SlowlyVarying::LogLog: os << "*lnln(e+u)"; break;
        case SlowlyVarying::ExpLog: os << "*exp(ln(1+u)^" << explog_a << ")"; break;
        case SlowlyVarying::Custom: os << "*L(u)"; break;
    }
    return os.str();
}

double big_f_ratio(const NonlinearitySpec& spec, double t) {
    if (t <= 0.0 || spec.kind == SlowlyVarying::One) return 1.0 / (spec.sigma + 2.0);
    const double lft = spec.log_f(t);
    return num::integrate(
        [&](double v) { return v <= 0.0 ? 0.0 : std::exp(spec.log_f(t * v) - lft); }, 0.0, 1.0,
        1e-13);
}

double big_f(const NonlinearitySpec& spec, double t) {
    if (t < 0.0) throw Error(ErrorKind::DomainError, "F(t) needs t >= 0");
    if (t == 0.0) return 0.0;
    return t * spec.f(t) * big_f_ratio(spec, t);
}

double log_big_f(const NonlinearitySpec& spec, double t) {
    return std::log(t) + spec.log_f(t) + std::log(big_f_ratio(spec, t));
}

double keller_integrand(const NonlinearitySpec& spec, double p, double s) {
    const double q = p / (p - 1.0);
    return std::exp(-(std::log(q) + log_big_f(spec, s)) / p);
}

std::string_view to_string(KOStatus s) {
    switch (s) {
        case KOStatus::Convergent: return "convergent";
        case KOStatus::Divergent: return "divergent";
        case KOStatus::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

KOVerdict keller_osserman(const NonlinearitySpec& spec, double p) {
    if (!(p > 1.0)) throw Error(ErrorKind::DomainError, "keller_osserman needs p > 1");
    KOVerdict v;
    v.p = p;
    v.tail_exponent = (spec.sigma + 2.0) / p;
    const auto g = [&](double s) { return keller_integrand(spec, p, s); };

    // Numerical confirmation: doubling panels over [1, 2^27] ~ [1, 1.3e8].
    double prev = 0.0, last = 0.0;
    for (int j = 0; j < 27; ++j) {
        const double lo = std::ldexp(1.0, j);
        prev = last;
        last = num::integrate(g, lo, 2 * lo, 1e-12);
    }
    v.observed_panel_ratio = last / prev;

    const bool critical = std::abs(spec.sigma + 2.0 - p) < 1e-12;
    if (critical) {
        if (spec.kind == SlowlyVarying::One) {
            v.status = KOStatus::Divergent;
            v.numerically_confirmed = v.observed_panel_ratio > 1.0 - 1e-6;
        } else {
            v.status = KOStatus::Inconclusive;
        }
        return v;
    }
    if (v.tail_exponent > 1.0) {
        v.status = KOStatus::Convergent;
        v.convergent = true;
        v.integral_value = num::tail_integral(g, 1.0, v.tail_exponent, 1e-15);
        v.f2_integral = std::pow(p / (p - 1.0), 1.0 / p) * v.integral_value;
        v.numerically_confirmed = v.observed_panel_ratio < 1.0;
    } else {
        v.status = KOStatus::Divergent;
        v.numerically_confirmed = v.observed_panel_ratio >= 1.0;
    }
    return v;
}

namespace {

// Large-argument sample points y = ln u on a doubling grid.
std::vector<double> log_sample_points(double y0, int n) {
    std::vector<double> y(n);
    for (int j = 0; j < n; ++j) y[j] = y0 * std::ldexp(1.0, j);
    return y;
}

bool oscillates(const std::vector<double>& v) {
    int changes = 0, last_sign = 0;
    for (std::size_t j = 1; j < v.size(); ++j) {
        const double d = v[j] - v[j - 1];
        if (std::abs(d) <= 1e-13 * std::abs(v[j])) continue;
        const int s = d > 0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++changes;
        last_sign = s;
    }
    return changes > 0;
}

}  // namespace

IndexEstimate rv_index(const NonlinearitySpec& spec) {
    IndexEstimate est;
    const auto logf_of_y = [&](double y) { return spec.log_f(std::exp(y)); };
    for (double y : log_sample_points(5.0, 8)) {
        const double h = 1e-2 * y;
        est.samples.push_back(num::diff1(logf_of_y, y, h));
    }
    if (oscillates(est.samples))
        throw Error(ErrorKind::NonConvergent, "t f'(t)/f(t) oscillates on the sample grid");
    const auto ex = num::accelerate(est.samples);
    est.value = ex.value;
    est.previous = ex.previous;
    if (!ex.converged(1e-4))
        throw Error(ErrorKind::NonConvergent, "RV index extrapolants disagree");
    return est;
}

RatioLimits ratio_limits(const NonlinearitySpec& spec, double p) {
    RatioLimits out;
    const double s = spec.sigma;
    out.target_F_over_zf = 1.0 / (2.0 + s);
    out.target_keller_ratio = (s + 2.0 - p) / (p * (2.0 + s));
    const double q = p / (p - 1.0);
    const double kappa = (s + 2.0) / p;

    std::vector<double> r1, r2;
    for (double y : log_sample_points(5.0, 7)) {
        const double z = std::exp(y);
        const double ratio = big_f_ratio(spec, z);
        r1.push_back(ratio);
        const double lnF = std::log(z) + spec.log_f(z) + std::log(ratio);
        const double tail = num::tail_integral(
            [&](double t) { return std::exp(-log_big_f(spec, t) / p); }, z, kappa, 1e-14);
        r2.push_back(std::exp(lnF / q - spec.log_f(z) - std::log(tail)));
    }
    const auto e1 = num::accelerate(r1);
    const auto e2 = num::accelerate(r2);
    if (!e1.converged(1e-4) || !e2.converged(1e-4))
        throw Error(ErrorKind::NonConvergent, "ratio limits did not settle");
    out.lim_F_over_zf = e1.value;
    out.lim_keller_ratio = e2.value;
    return out;
}

}  // namespace blowup
