#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace blowup {

enum class SlowlyVarying { One, Log1p, LogLog, ExpLog, Custom };

// f(u) = u^(sigma+1) L(u). The documented L family:
//   One     L = 1
//   Log1p   L = ln(1+u)
//   LogLog  L = ln ln(e+u)
//   ExpLog  L = exp(ln(1+u)^a), 0 < a < 1
//   Custom  caller-provided L (and optionally L')
struct NonlinearitySpec {
    double sigma = 2.0;
    SlowlyVarying kind = SlowlyVarying::One;
    double explog_a = 0.5;
    std::function<double(double)> custom_L;
    std::function<double(double)> custom_L_prime;

    static NonlinearitySpec pure_power(double power_q);
    // Parses "one" | "log1p" | "loglog" | "explog:a".
    static NonlinearitySpec from_config(double sigma, const std::string& slowly_varying);

    double power() const { return sigma + 1.0; }
    double L(double u) const;
    double log_L(double u) const;
    double L_prime(double u) const;
    double f(double u) const;
    // ln f(u), finite for any u > 0 even when f itself would overflow.
    double log_f(double u) const;
    double f_prime(double u) const;
    std::string describe() const;
};

// F(t) = integral of f over [0, t].
double big_f(const NonlinearitySpec& spec, double t);
// F(t) / (t f(t)); bounded and overflow-free.
double big_f_ratio(const NonlinearitySpec& spec, double t);
// ln F(t).
double log_big_f(const NonlinearitySpec& spec, double t);
// (q F(s))^(-1/p) with q = p/(p-1).
double keller_integrand(const NonlinearitySpec& spec, double p, double s);

enum class KOStatus { Convergent, Divergent, Inconclusive };

struct KOVerdict {
    bool convergent = false;
    KOStatus status = KOStatus::Inconclusive;
    double integral_value = std::numeric_limits<double>::infinity();  // of (qF)^(-1/p) on [1, inf)
    double f2_integral = std::numeric_limits<double>::infinity();     // of F^(-1/p) on [1, inf)
    double p = 2.0;
    double tail_exponent = 0.0;  // (sigma+2)/p
    double observed_panel_ratio = 0.0;
    bool numerically_confirmed = false;
};

std::string_view to_string(KOStatus s);

KOVerdict keller_osserman(const NonlinearitySpec& spec, double p);

struct IndexEstimate {
    double value = 0.0;
    double previous = 0.0;
    std::vector<double> samples;
};

// Limit of t f'(t)/f(t) as t -> inf. Throws NonConvergent on oscillation.
IndexEstimate rv_index(const NonlinearitySpec& spec);

struct RatioLimits {
    double lim_F_over_zf = 0.0;
    double target_F_over_zf = 0.0;
    double lim_keller_ratio = 0.0;
    double target_keller_ratio = 0.0;
};

RatioLimits ratio_limits(const NonlinearitySpec& spec, double p);

}  // namespace blowup
