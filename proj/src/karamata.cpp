#include "blowup/karamata.hpp"

#include "blowup/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace blowup {

namespace {

std::vector<double> limit_grid(double first_exp, int count) {
    std::vector<double> t(count);
    for (int j = 0; j < count; ++j) t[j] = std::pow(10.0, first_exp - 0.5 * j);
    return t;
}

constexpr double kL1ZeroThreshold = 1e-8;

}  // namespace

KaramataSpec KaramataSpec::power(double q, double alpha) {
    KaramataSpec s;
    s.kind = KaramataKind::Power;
    s.q = q;
    s.alpha = alpha;
    s.monotonicity = q >= 0 ? Monotonicity::Nondecreasing : Monotonicity::Nonincreasing;
    return s;
}

KaramataSpec KaramataSpec::log1p_power(double q, double alpha) {
    KaramataSpec s = power(q, alpha);
    s.kind = KaramataKind::Log1pPower;
    return s;
}

KaramataSpec KaramataSpec::expm1_power(double q, double alpha) {
    KaramataSpec s = power(q, alpha);
    s.kind = KaramataKind::Expm1Power;
    return s;
}

KaramataSpec KaramataSpec::custom(std::function<double(double)> k, double alpha, double nu,
                                  Monotonicity mono, std::function<double(double)> k_prime) {
    KaramataSpec s;
    s.kind = KaramataKind::Custom;
    s.alpha = alpha;
    s.nu = nu;
    s.monotonicity = mono;
    s.custom_k = std::move(k);
    s.custom_k_prime = std::move(k_prime);
    return s;
}

KaramataSpec KaramataSpec::from_csv(const std::string& path, double alpha) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open k table '" + path + "'");
    std::vector<double> t, k;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) {
            if (t.empty()) continue;  // header
            throw Error(ErrorKind::ConfigError,
                        path + ":" + std::to_string(lineno) + ": expected two numbers");
        }
        if (!(a > 0 && b > 0) || (!t.empty() && a <= t.back()))
            throw Error(ErrorKind::ConfigError,
                        path + ":" + std::to_string(lineno) + ": need positive increasing t, k>0");
        t.push_back(a);
        k.push_back(b);
    }
    KaramataSpec s;
    s.kind = KaramataKind::Table;
    s.alpha = alpha;
    s.nu = t.empty() ? 1.0 : t.back();
    s.monotonicity = (k.size() > 1 && k.back() < k.front()) ? Monotonicity::Nonincreasing
                                                             : Monotonicity::Nondecreasing;
    s.table = num::MonotoneTable(std::move(t), std::move(k), true);
    return s;
}

KaramataSpec KaramataSpec::from_config(const std::string& kind, double q, double alpha) {
    if (kind == "power") return power(q, alpha);
    if (kind == "log1p_power") return log1p_power(q, alpha);
    if (kind == "expm1_power") return expm1_power(q, alpha);
    throw Error(ErrorKind::UnsupportedKind, "unknown karamata kind '" + kind + "'");
}

double KaramataSpec::k(double t) const {
    switch (kind) {
        case KaramataKind::Power: return std::pow(t, q);
        case KaramataKind::Log1pPower: return std::log1p(std::pow(t, q));
        case KaramataKind::Expm1Power: return std::expm1(std::pow(t, q));
        case KaramataKind::Custom: return custom_k(t);
        case KaramataKind::Table: {
            const auto& x = table.x();
            const auto& y = table.y();
            if (t < x.front()) {
                // power-law extension with the slope of the first cell
                const double slope = std::log(y[1] / y[0]) / std::log(x[1] / x[0]);
                return y[0] * std::pow(t / x[0], slope);
            }
            return table(std::min(t, x.back()));
        }
    }
    return 0.0;
}

bool KaramataSpec::has_analytic_derivative() const {
    return kind == KaramataKind::Power || kind == KaramataKind::Log1pPower ||
           kind == KaramataKind::Expm1Power || (kind == KaramataKind::Custom && custom_k_prime);
}

double KaramataSpec::k_prime(double t) const {
    switch (kind) {
        case KaramataKind::Power: return q * std::pow(t, q - 1.0);
        case KaramataKind::Log1pPower: {
            const double tq = std::pow(t, q);
            return q * tq / (t * (1.0 + tq));
        }
        case KaramataKind::Expm1Power: {
            const double tq = std::pow(t, q);
            return q * tq / t * std::exp(tq);
        }
        case KaramataKind::Custom:
            if (custom_k_prime) return custom_k_prime(t);
            break;
        case KaramataKind::Table: break;
    }
    const double h = t * 1e-6;
    return (k(t + h) - k(t - h)) / (2 * h);
}

double KaramataSpec::kappa(double t) const { return std::pow(t, -0.5 * alpha) * k(t); }

double KaramataSpec::kappa_prime(double t) const {
    return std::pow(t, -0.5 * alpha) * (k_prime(t) - 0.5 * alpha * k(t) / t);
}

void KaramataSpec::validate() const {
    if (!(alpha < 2.0))
        throw Error(ErrorKind::NonIntegrableWeight, "s^(-alpha/2) is not integrable for alpha >= 2");
    if (kind == KaramataKind::Power && !(q - 0.5 * alpha > -1.0))
        throw Error(ErrorKind::NonIntegrableWeight, "s^(q-alpha/2) is not integrable at 0");
    const auto grid = num::log_grid(1e-9 * nu, nu, 64);
    double prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = k(grid[i]);
        if (!(v > 0.0)) throw Error(ErrorKind::DomainError, "k must be positive on (0, nu)");
        if (i > 0) {
            const bool ok = monotonicity == Monotonicity::Nondecreasing ? v >= prev * (1 - 1e-12)
                                                                        : v <= prev * (1 + 1e-12);
            if (!ok) throw Error(ErrorKind::DomainError, "k violates its declared monotonicity");
        }
        prev = v;
    }
}

std::string KaramataSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case KaramataKind::Power: os << "t^" << q; break;
        case KaramataKind::Log1pPower: os << "ln(1+t^" << q << ")"; break;
        case KaramataKind::Expm1Power: os << "exp(t^" << q << ")-1"; break;
        case KaramataKind::Table: os << "table"; break;
        case KaramataKind::Custom: os << "custom"; break;
    }
    os << ", alpha=" << alpha;
    return os.str();
}

double YKind::operator()(double t) const {
    if (type == Type::PowerZeta) return std::pow(t, exponent);
    return std::pow(-std::log(t), -exponent);
}

double YKind::derivative(double t) const {
    if (type == Type::PowerZeta) return exponent * std::pow(t, exponent - 1.0);
    const double l = -std::log(t);
    return exponent * std::pow(l, -exponent - 1.0) / t;
}

double YKind::second_derivative(double t) const {
    if (type == Type::PowerZeta) return exponent * (exponent - 1.0) * std::pow(t, exponent - 2.0);
    const double l = -std::log(t);
    return exponent * std::pow(l, -exponent - 2.0) * ((exponent + 1.0) - l) / (t * t);
}

std::string YKind::describe() const {
    std::ostringstream os;
    if (type == Type::PowerZeta)
        os << "t^" << exponent;
    else
        os << "(-ln t)^-" << exponent;
    return os.str();
}

std::string_view to_string(SecondOrderClass c) {
    switch (c) {
        case SecondOrderClass::K0_tau: return "K0_tau";
        case SecondOrderClass::K0_zeta: return "K0_zeta";
        case SecondOrderClass::K01_zeta: return "K01_zeta";
        case SecondOrderClass::K01_tau: return "K01_tau";
        case SecondOrderClass::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

double big_k(const KaramataSpec& spec, double t) {
    if (!(t > 0.0 && t <= spec.nu * (1 + 1e-12)))
        throw Error(ErrorKind::DomainError, "K(t) needs 0 < t <= nu");
    if (!(spec.alpha < 2.0))
        throw Error(ErrorKind::NonIntegrableWeight, "alpha >= 2");
    if (spec.kind == KaramataKind::Power && !(spec.q - 0.5 * spec.alpha > -1.0))
        throw Error(ErrorKind::NonIntegrableWeight, "s^(q-alpha/2) is not integrable at 0");
    // s = tau^m removes the s^(-alpha/2) endpoint factor exactly.
    const double m = 2.0 / (2.0 - spec.alpha);
    const double upper = std::pow(t, 1.0 / m);
    const double v = num::integrate_singular(
        [&](double tau) { return tau <= 0.0 ? 0.0 : m * spec.k(std::pow(tau, m)); }, 0.0, upper,
        1e-15);
    if (!std::isfinite(v) || v <= 0.0)
        throw Error(ErrorKind::NonIntegrableWeight, "quadrature for K(t) diverged");
    return v;
}

double ratio_q(const KaramataSpec& spec, double t) { return big_k(spec, t) / spec.kappa(t); }

double ratio_q_prime(const KaramataSpec& spec, double t) {
    return num::diff1([&](double s) { return ratio_q(spec, s); }, t, 1e-3 * t);
}

KaramataLimits estimate_limits(const KaramataSpec& spec) {
    const auto t = limit_grid(-2.0, 15);
    std::vector<double> q0, q1, idx;
    for (double tj : t) {
        q0.push_back(ratio_q(spec, tj));
        q1.push_back(ratio_q_prime(spec, tj));
        idx.push_back(tj * spec.k_prime(tj) / spec.k(tj));
    }
    const auto e0 = num::richardson(t, q0, 2);
    const auto e1 = num::richardson(t, q1, 2);
    const auto ei = num::richardson(t, idx, 2);
    if (!e0.converged(1e-4, 1e-10) || !e1.converged(1e-4, 1e-10))
        throw Error(ErrorKind::NonConvergent, "Karamata ratio extrapolants disagree");
    KaramataLimits out;
    out.l0 = e0.value;
    out.l1 = e1.value;
    out.nrvz_index_k = ei.value;
    out.nrvz_target = out.l1 > 0 ? 1.0 / out.l1 - 1.0 + 0.5 * spec.alpha
                                 : std::numeric_limits<double>::infinity();
    return out;
}

SecondOrderLimit second_order_limit(const KaramataSpec& spec, const YKind& y, double l1) {
    SecondOrderLimit out;
    out.y = y;
    const bool log_scale = y.type == YKind::Type::LogTau;
    const bool k0 = std::abs(l1) < kL1ZeroThreshold;
    if (l1 > 1.0 + 1e-6) {
        out.cls = SecondOrderClass::Unclassified;
    } else if (k0) {
        out.cls = log_scale ? SecondOrderClass::K0_tau : SecondOrderClass::K0_zeta;
    } else {
        out.cls = log_scale ? SecondOrderClass::K01_tau : SecondOrderClass::K01_zeta;
    }

    const auto t = log_scale ? limit_grid(-1.0, 19) : limit_grid(-1.0, 11);
    std::vector<double> qp(t.size()), yy(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        qp[j] = ratio_q_prime(spec, t[j]);
        yy[j] = y(t[j]);
    }
    // Difference quotients cancel l1 exactly, so its estimation error does not leak in.
    std::vector<double> d, s;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        d.push_back((qp[j] - qp[j + 1]) / (yy[j] - yy[j + 1]));
        s.push_back(y(std::sqrt(t[j] * t[j + 1])));
    }
    const auto ex = num::richardson(s, d, 2);
    const double tol = log_scale ? 1e-2 : 1e-4;
    if (!ex.converged(tol, 1e-6)) {
        const std::size_t n = d.size();
        const bool growing = std::abs(d[n - 1]) > 10 * std::abs(d[0]) &&
                             std::abs(d[n - 1]) > std::abs(d[n - 2]) &&
                             std::abs(d[n - 2]) > std::abs(d[n - 3]);
        if (growing) throw Error(ErrorKind::WrongScale, "second-order quotient diverges for " + y.describe());
        throw Error(ErrorKind::NonConvergent, "second-order extrapolants disagree");
    }
    out.value = ex.value;
    return out;
}

DualCheck dual_limit_check(const KaramataSpec& spec, double l1) {
    const auto t = limit_grid(-2.0, 15);
    std::vector<double> v;
    for (double tj : t)
        v.push_back(ratio_q(spec, tj) * (spec.k_prime(tj) / spec.k(tj) - 0.5 * spec.alpha / tj));
    const auto ex = num::richardson(t, v, 2);
    if (!ex.converged(1e-4, 1e-10))
        throw Error(ErrorKind::NonConvergent, "dual limit extrapolants disagree");
    DualCheck out;
    out.limit = ex.value;
    out.target = 1.0 - l1;
    out.residual = std::abs(out.limit - out.target);
    return out;
}

DualCheck dual_limit_check(const KaramataSpec& spec) {
    return dual_limit_check(spec, estimate_limits(spec).l1);
}

}  // namespace blowup
