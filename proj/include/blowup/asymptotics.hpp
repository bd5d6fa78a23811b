#pragma once

#include "blowup/karamata.hpp"
#include "blowup/transform.hpp"

#include <optional>
#include <string>

namespace blowup {

enum class XiVariant { TheoremNumerator2, ProofNumeratorP };
std::string_view to_string(XiVariant v);

struct Prediction1D {
    double beta = 0.0;
    double psi_R = 0.0;
    bool outside_theory_range = false;  // alpha >= p-1
};

// beta = (p+gamma-alpha)/(q-(p-1)),
// psi(R) = [beta^(p-1) ((beta+1)(p-1) - alpha) / B(R)]^(1/(q-(p-1))).
Prediction1D predict_1d(double p, double alpha, double power_q, double gamma = 0.0,
                        double B_at_R = 1.0);

// xi for a given coefficient constant c under the chosen numerator.
double xi_constant(double p, double alpha, double sigma, double l1, double c, XiVariant v);

struct FirstOrderPrediction {
    std::optional<double> xi0;
    double xi1 = 0.0;  // from b1
    double xi2 = 0.0;  // from b2
    XiVariant variant = XiVariant::TheoremNumerator2;
};

FirstOrderPrediction predict_first_order(double p, double alpha, double sigma, double l1, double b1,
                                         double b2, std::optional<double> c, XiVariant v);

struct GLimit {
    double value = 0.0;
    bool ambiguous = false;  // zeta == theta: H(0) convention unresolved
    double left = 0.0;       // H(0-) = 0
    double right = 0.0;      // H(0+) = 1
};

// Table of lim r^theta / y(r). For y = r^omega, zeta is the y exponent.
GLimit g_limit(double theta, const YKind& y);

// chi for p = 2. LogTau uses (1-alpha) sigma L* / (3+sigma); PowerZeta uses
// [sigma((1-alpha/2) e_k - l1) - B0 (2 + sigma l1) G] /
// [sigma (3+sigma+l1) - (alpha/2) sigma^2 l1^2 + alpha sigma l1].
// At the ambiguous G case the right-hand value H(0+) = 1 is used.
double predict_chi(double sigma, double alpha, double l1, double second_value, double B0,
                   double theta, const YKind& y,
                   std::optional<SecondOrderClass> cls = std::nullopt);

struct ITermConfig {
    KaramataSpec k;
    const PhiTransform* phi = nullptr;  // p = 2
    double sigma = 2.0;
    double alpha = 0.0;
    double l1 = 0.0;
    double e_k = 0.0;  // e_k or L* depending on the scale
    double B0 = 0.0;
    double theta = 1.0;
    double epsilon = 0.0;
    YKind y;
    double chi_plus = 0.0;
    double chi_minus = 0.0;
    double xi0 = 1.0;
};

struct ITerms {
    double I1 = 0, I2p = 0, I2m = 0, I3p = 0, I3m = 0, I4p = 0, I4m = 0;
    bool cancellation_warning = false;
};

ITerms evaluate_I_terms(const ITermConfig& cfg, double r);

struct ITermLimits {
    ITerms limit;
    ITerms target;
    bool cancellation_warning = false;
};

// Richardson (order 2) over r = 10^(-2-j/2), j = 0..10.
ITermLimits I_term_limits(const ITermConfig& cfg);

}  // namespace blowup
