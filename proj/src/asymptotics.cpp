#include "blowup/asymptotics.hpp"

#include "blowup/errors.hpp"
#include "blowup/numerics.hpp"

#include <cmath>
#include <limits>

namespace blowup {

std::string_view to_string(XiVariant v) {
    return v == XiVariant::TheoremNumerator2 ? "theorem" : "proof";
}

Prediction1D predict_1d(double p, double alpha, double power_q, double gamma, double B_at_R) {
    const double s = power_q - (p - 1.0);
    if (s == 0.0) throw Error(ErrorKind::DegenerateExponent, "power_q equals p-1");
    if (s < 0.0) throw Error(ErrorKind::DomainError, "blow-up needs power_q > p-1");
    if (!(B_at_R > 0.0)) throw Error(ErrorKind::DomainError, "B(R) must be positive");
    Prediction1D out;
    out.beta = (p + gamma - alpha) / s;
    const double inner = std::pow(out.beta, p - 1.0) * ((out.beta + 1.0) * (p - 1.0) - alpha) / B_at_R;
    if (!(inner > 0.0)) throw Error(ErrorKind::DomainError, "psi(R) base is not positive");
    out.psi_R = std::pow(inner, 1.0 / s);
    out.outside_theory_range = !(alpha < p - 1.0);
    return out;
}

double xi_constant(double p, double alpha, double sigma, double l1, double c, XiVariant v) {
    const double s = 2.0 + sigma - p;
    if (!(s > 0.0)) throw Error(ErrorKind::DomainError, "xi needs sigma > p-2");
    const double lead = v == XiVariant::TheoremNumerator2 ? 2.0 : p;
    const double num = lead + l1 * (1.0 - alpha) * s;
    return std::pow(num / (c * (2.0 + sigma)), 1.0 / s);
}

FirstOrderPrediction predict_first_order(double p, double alpha, double sigma, double l1, double b1,
                                         double b2, std::optional<double> c, XiVariant v) {
    if (b1 > b2) throw Error(ErrorKind::DomainError, "b1 must not exceed b2");
    if (l1 < 0) throw Error(ErrorKind::DomainError, "l1 must be >= 0");
    FirstOrderPrediction out;
    out.variant = v;
    out.xi1 = xi_constant(p, alpha, sigma, l1, b1, v);
    out.xi2 = xi_constant(p, alpha, sigma, l1, b2, v);
    if (c) out.xi0 = xi_constant(p, alpha, sigma, l1, *c, v);
    return out;
}

GLimit g_limit(double theta, const YKind& y) {
    if (!(theta > 0.0)) throw Error(ErrorKind::DomainError, "theta must be positive");
    GLimit g;
    if (y.type == YKind::Type::LogTau) return g;
    const double omega = y.exponent;
    if (theta > omega) return g;
    if (theta == omega) {
        // r^theta / r^omega == 1 identically; the table writes this as H(0).
        g.value = 1.0;
        g.ambiguous = omega != 1.0;
        g.left = 0.0;
        g.right = 1.0;
        return g;
    }
    throw Error(ErrorKind::UnsupportedKind, "r^theta / y(r) diverges for theta < omega");
}

double predict_chi(double sigma, double alpha, double l1, double second_value, double B0,
                   double theta, const YKind& y, std::optional<SecondOrderClass> cls) {
    if (!(sigma > 0.0)) throw Error(ErrorKind::DomainError, "chi needs sigma > 0");
    const bool log_scale = y.type == YKind::Type::LogTau;
    if (cls) {
        const bool cls_log = *cls == SecondOrderClass::K0_tau || *cls == SecondOrderClass::K01_tau;
        if (*cls == SecondOrderClass::Unclassified || cls_log != log_scale)
            throw Error(ErrorKind::WrongClass, "Karamata class does not match y scale");
    }
    if (log_scale) {
        const double p = 2.0;
        return (1.0 - alpha) * sigma * second_value / ((p - 1.0) * (3.0 + sigma));
    }
    const double G = B0 == 0.0 ? 0.0 : g_limit(theta, y).value;
    const double num = sigma * ((1.0 - 0.5 * alpha) * second_value - l1) - B0 * (2.0 + sigma * l1) * G;
    const double den = sigma * (3.0 + sigma + l1) - 0.5 * alpha * sigma * sigma * l1 * l1 +
                       alpha * sigma * l1;
    return num / den;
}

ITerms evaluate_I_terms(const ITermConfig& c, double r) {
    if (!c.phi) throw Error(ErrorKind::DomainError, "I-terms need a transform");
    if (c.phi->p() != 2.0) throw Error(ErrorKind::DomainError, "I-terms are defined for p = 2");
    const auto& f = c.phi->nonlinearity();
    const double K = big_k(c.k, r);
    const double K1 = c.k.kappa(r);
    const double K2 = c.k.kappa_prime(r);
    const double ph = c.phi->phi(K);
    const double ph1 = c.phi->phi_prime_identity(K);
    const double ph2 = f.f(ph);  // p = 2: phi'' = f(phi)
    const double A = ph1 / (K * ph2);
    const double Bq = ph / (K * K * ph2);
    const double fr = std::exp(f.log_f(c.xi0 * ph) - f.log_f(ph)) / c.xi0;
    const double y = c.y(r), y1 = c.y.derivative(r), y2 = c.y.second_derivative(r);
    const double KK = K * K2 / (K1 * K1);
    const double KoK1 = K / K1;
    const double KorK1 = K / (r * K1);
    // Printed f(phi') read as f'(phi), and the mean-value ratio f'(gamma)/f'(xi0 phi)
    // taken at gamma = xi0 phi, where it equals 1.
    const double T = ph * f.f_prime(ph) / f.f(ph);
    const double eps = std::numeric_limits<double>::epsilon();

    ITerms out;
    auto bracket = [&](std::initializer_list<double> terms) {
        num::CompensatedSum s;
        for (double t : terms) s.add(t);
        if (std::abs(s.value()) < 1e6 * eps * s.magnitude()) out.cancellation_warning = true;
        return s.value();
    };
    out.I1 = bracket({1.0, A * KK, A * c.alpha * c.l1, -fr}) / y;
    for (int sgn : {+1, -1}) {
        const double chi = sgn > 0 ? c.chi_plus : c.chi_minus;
        const double Bpm = c.B0 + sgn * c.epsilon;
        const double I2 = -Bpm * std::pow(r, c.theta) / y * fr +
                          chi * bracket({1.0, A * KK, A * 2.0 * KoK1 * y1 / y, Bq * KK * y2 / y, -T});
        const double I3 = c.alpha * (A * (bracket({KorK1 / y, -c.l1 / y}) + chi * KorK1) +
                                     chi * Bq * KorK1 * KorK1 * r * y1 / y);
        const double I4 = A * KoK1 * (1.0 / y + chi) + chi * Bq * KoK1 * KoK1 * y1 / y - chi * Bpm * T;
        (sgn > 0 ? out.I2p : out.I2m) = I2;
        (sgn > 0 ? out.I3p : out.I3m) = I3;
        (sgn > 0 ? out.I4p : out.I4m) = I4;
    }
    return out;
}

ITermLimits I_term_limits(const ITermConfig& c) {
    std::vector<double> rs;
    std::vector<ITerms> vals;
    ITermLimits out;
    for (int j = 0; j <= 10; ++j) {
        rs.push_back(std::pow(10.0, -2.0 - 0.5 * j));
        vals.push_back(evaluate_I_terms(c, rs.back()));
        out.cancellation_warning |= vals.back().cancellation_warning;
    }
    auto lim = [&](double ITerms::*m) {
        std::vector<double> v;
        for (const auto& t : vals) v.push_back(t.*m);
        return num::richardson(rs, v, 2).value;
    };
    for (auto m : {&ITerms::I1, &ITerms::I2p, &ITerms::I2m, &ITerms::I3p, &ITerms::I3m,
                   &ITerms::I4p, &ITerms::I4m})
        out.limit.*m = lim(m);

    const double s = c.sigma, l1 = c.l1, a = c.alpha;
    out.target.I1 = s / (2.0 + s) * c.e_k;
    for (int sgn : {+1, -1}) {
        const double chi = sgn > 0 ? c.chi_plus : c.chi_minus;
        const double Bpm = c.B0 + sgn * c.epsilon;
        double I2, I3, I4;
        if (c.y.type == YKind::Type::LogTau) {
            I2 = chi * (1.0 - s / (2.0 + s) * (1.0 - l1) - s);
            I3 = -a * s / (2.0 + s) * (c.e_k + chi * l1);
            I4 = 0.0;
        } else {
            const double G = Bpm == 0.0 ? 0.0 : g_limit(c.theta, c.y).value;
            I2 = chi * (1.0 - s / (2.0 + s) * (1.0 + l1) - s) -
                 Bpm * (2.0 + l1 * (1.0 - a) * s) / (2.0 + s) * G;
            I3 = a * (-s / (2.0 + s) * c.e_k / 2.0 +
                      chi * (s * s * l1 * l1 / (2.0 * (2.0 + s)) - s * l1 / (2.0 + s)));
            I4 = -s * l1 / (2.0 + s);
        }
        (sgn > 0 ? out.target.I2p : out.target.I2m) = I2;
        (sgn > 0 ? out.target.I3p : out.target.I3m) = I3;
        (sgn > 0 ? out.target.I4p : out.target.I4m) = I4;
    }
    return out;
}

}  // namespace blowup
