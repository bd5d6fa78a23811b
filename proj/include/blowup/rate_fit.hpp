#pragma once

#include "blowup/asymptotics.hpp"
#include "blowup/karamata.hpp"
#include "blowup/radial_solver.hpp"
#include "blowup/transform.hpp"

#include <optional>
#include <string>
#include <vector>

namespace blowup {

// Distances in units of R.
struct Window {
    double d_min = 1e-5;
    double d_max = 1e-2;
};

struct PowerFit {
    double beta_hat = 0.0;
    double C_hat = 0.0;
    double beta_stderr = 0.0;
    double C_stderr = 0.0;
    Window window;
    std::size_t points = 0;
};

PowerFit fit_power(const SolutionProfile& profile, Window window);

struct TracePoint {
    double d = 0.0;
    double value = 0.0;
};

struct LimitFit {
    double value = 0.0;
    double std_error = 0.0;
    bool accelerated = false;  // false: last-value fallback
    std::vector<TracePoint> trace;
};

struct RatioFit {
    double xi_hat = 0.0;
    double std_error = 0.0;
    double c_hat = 0.0;              // limit of b / (d^(alpha - alpha p/2) k^p)
    double decomposition_spread = 0.0;
    bool accelerated = false;
    Window window;
    std::vector<TracePoint> trace;   // (d, u / phi(K(d)))
};

// Extrapolates u/phi(K(d)) to d -> 0 along the window. The problem supplies b and alpha.
RatioFit first_order_ratio(const SolutionProfile& profile, const RadialProblem& problem,
                           const KaramataSpec& k, const PhiTransform& phi, Window window,
                           double decomposition_tolerance = 0.05);

struct SecondOrderFit {
    double chi_hat = 0.0;
    double std_error = 0.0;
    bool accelerated = false;
    bool outside_hypothesis = false;  // y = r violates t/y(t) -> 0
    Window window;
    std::vector<TracePoint> trace;    // (d, (u/(xi0 phi(K(d))) - 1)/y(d))
};

SecondOrderFit second_order_correction(const SolutionProfile& profile, double xi0,
                                       const KaramataSpec& k, const PhiTransform& phi,
                                       const YKind& y, Window window);

// Shared limit extraction: Aitken with a last-value fallback.
LimitFit extrapolate_trace(std::vector<TracePoint> trace);

enum class AdjudicationOutcome { Theorem, Proof, Inconclusive, Neither };
std::string_view to_string(AdjudicationOutcome o);

struct FamilyMember {
    double p = 3.0;
    double alpha = 0.0;
    double power_q = 4.0;
};

struct AdjudicationEntry {
    FamilyMember member;
    double l1 = 0.0;
    double xi_hat = 0.0;
    double std_error = 0.0;
    double margin = 0.0;
    double xi_theorem = 0.0;
    double xi_proof = 0.0;
    AdjudicationOutcome outcome = AdjudicationOutcome::Inconclusive;
    bool by_design = false;  // p = 2: variants coincide
    std::vector<TracePoint> trace;
};

struct AdjudicationReport {
    std::vector<AdjudicationEntry> entries;
};

// N = 1, b = 1, w = d^alpha, f = u^power_q, k(t) = t^(alpha/2 - alpha/p).
AdjudicationEntry adjudicate_member(const FamilyMember& m, Window window,
                                    const SolverOptions& opt = {});
AdjudicationReport adjudicate_variant(const std::vector<FamilyMember>& family, Window window,
                                      const SolverOptions& opt = {}, int jobs = 1);

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace,
                     const std::string& value_name);

}  // namespace blowup
