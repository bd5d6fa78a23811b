#pragma once

#include "blowup/numerics.hpp"

#include <functional>
#include <optional>
#include <string>

namespace blowup {

enum class Monotonicity { Nondecreasing, Nonincreasing };
enum class KaramataKind { Power, Log1pPower, Expm1Power, Table, Custom };

struct KaramataSpec {
    KaramataKind kind = KaramataKind::Power;
    double q = 0.0;
    double alpha = 0.0;
    double nu = 1.0;
    Monotonicity monotonicity = Monotonicity::Nondecreasing;
    std::function<double(double)> custom_k;
    std::function<double(double)> custom_k_prime;  // optional
    num::MonotoneTable table;                      // log-log interpolated samples

    static KaramataSpec power(double q, double alpha);
    static KaramataSpec log1p_power(double q, double alpha);
    static KaramataSpec expm1_power(double q, double alpha);
    static KaramataSpec custom(std::function<double(double)> k, double alpha, double nu,
                               Monotonicity mono,
                               std::function<double(double)> k_prime = nullptr);
    // Two-column CSV "t,k" (header optional), t increasing.
    static KaramataSpec from_csv(const std::string& path, double alpha);
    static KaramataSpec from_config(const std::string& kind, double q, double alpha);

    double k(double t) const;
    double k_prime(double t) const;
    bool has_analytic_derivative() const;
    // kappa(t) = t^(-alpha/2) k(t) = K'(t)
    double kappa(double t) const;
    double kappa_prime(double t) const;

    // Positivity, monotonicity spot check on a log grid, integrability. Throws.
    void validate() const;
    std::string describe() const;
};

struct YKind {
    enum class Type { PowerZeta, LogTau } type = Type::PowerZeta;
    double exponent = 1.0;  // zeta or tau

    static YKind power(double zeta) { return {Type::PowerZeta, zeta}; }
    static YKind log(double tau) { return {Type::LogTau, tau}; }
    double operator()(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;
    std::string describe() const;
};

enum class SecondOrderClass { K0_tau, K0_zeta, K01_zeta, K01_tau, Unclassified };
std::string_view to_string(SecondOrderClass c);

struct KaramataLimits {
    double l0 = 0.0;
    double l1 = 0.0;
    double nrvz_index_k = 0.0;
    double nrvz_target = 0.0;  // 1/l1 - 1 + alpha/2
    SecondOrderClass second_order_class = SecondOrderClass::Unclassified;
    double second_order_value = 0.0;
    std::optional<YKind> y_kind;
};

double big_k(const KaramataSpec& spec, double t);
// Q(t) = K(t)/kappa(t) and its derivative (five-point, step t*1e-3).
double ratio_q(const KaramataSpec& spec, double t);
double ratio_q_prime(const KaramataSpec& spec, double t);

KaramataLimits estimate_limits(const KaramataSpec& spec);

struct SecondOrderLimit {
    double value = 0.0;
    SecondOrderClass cls = SecondOrderClass::Unclassified;
    YKind y;
};

SecondOrderLimit second_order_limit(const KaramataSpec& spec, const YKind& y, double l1);

struct DualCheck {
    double limit = 0.0;
    double target = 0.0;  // 1 - l1
    double residual = 0.0;
};

DualCheck dual_limit_check(const KaramataSpec& spec);
DualCheck dual_limit_check(const KaramataSpec& spec, double l1);

}  // namespace blowup
