#pragma once

#include "blowup/nonlinearity.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

// Radial functions receive both r and the boundary distance d = R - r, so that
// boundary-layer evaluations never lose digits to the subtraction.
using RadialFunction = std::function<double(double r, double d)>;

enum class WeightKind { DistancePower, CenterPower, Custom };
enum class LeftCondition { Symmetric, Dirichlet0 };

struct Coefficient {
    RadialFunction fn;
    // Optional factored form b = B(r) d^gamma.
    std::optional<double> gamma;
    std::function<double(double)> B;

    static Coefficient constant(double c);
    static Coefficient factored(std::function<double(double)> B, double gamma);
    static Coefficient general(RadialFunction fn);
    double operator()(double r, double d) const { return fn(r, d); }
};

struct RadialProblem {
    int dimension = 1;
    double radius = 1.0;
    double p = 2.0;
    double alpha = 0.0;
    WeightKind weight_kind = WeightKind::DistancePower;
    RadialFunction custom_weight;
    Coefficient coefficient = Coefficient::constant(1.0);
    NonlinearitySpec nonlinearity;
    // Symmetric: psi'(0) = 0 and the shooting parameter is psi(0).
    // Dirichlet0 (interval, N = 1): psi(0) = 0 and the shooting parameter is psi'(0).
    LeftCondition left = LeftCondition::Symmetric;

    double weight(double r, double d) const;
    void validate() const;
};

struct GridOptions {
    int center_nodes = 64;        // uniform nodes on [0, R/2]
    double grading_ratio = 0.9;   // geometric distance ratio toward the boundary
    double finest = 1e-8;         // smallest recorded distance, relative to R
};

struct SolverOptions {
    double rtol = 1e-13;
    double blowup_threshold = 1e12;
    double blowup_log_cap = 250.0;  // hard stop on ln(psi)
    long max_steps = 2'000'000;
    GridOptions grid;
};

struct SolutionProfile {
    std::vector<double> r, d, u, du, flux;  // flux = w |u'|^(p-2) u'
    double shooting_parameter = 0.0;
    bool blow_up = false;
    double boundary_value = std::numeric_limits<double>::quiet_NaN();
    double blow_up_radius = std::numeric_limits<double>::quiet_NaN();
    double residual_norm = 0.0;
    double grading_ratio = 0.9;
    long steps = 0;

    std::size_t size() const { return r.size(); }
    void write_csv(const std::string& path) const;
};

struct ShotResult {
    SolutionProfile profile;
    std::optional<double> blow_up_radius;
    double boundary_value = std::numeric_limits<double>::quiet_NaN();
};

ShotResult shoot(const RadialProblem& problem, double parameter, const SolverOptions& opt = {});

// Blow-up radius of the shot, or nullopt if it stays finite up to r = stop_radius (<= R).
std::optional<double> blow_up_radius(const RadialProblem& problem, double parameter,
                                     double stop_radius, const SolverOptions& opt = {});

// Smallest shooting parameter whose solution blows up at radius s.
double ko_envelope(const RadialProblem& problem, double s, const SolverOptions& opt = {});

// Critical parameter separating finite boundary values from blow-up inside the ball.
struct CriticalShot {
    double lower = 0.0;  // reaches r = R with finite value
    double upper = 0.0;  // blows up before R
    int iterations = 0;
};
CriticalShot critical_parameter(const RadialProblem& problem, const SolverOptions& opt = {});

struct DirichletTrace {
    std::vector<double> parameters;
    std::vector<double> boundary_values;
};

SolutionProfile solve_dirichlet(const RadialProblem& problem, double k,
                                const SolverOptions& opt = {}, DirichletTrace* trace = nullptr);
SolutionProfile solve_dirichlet(const RadialProblem& problem, double k, const CriticalShot& crit,
                                const SolverOptions& opt = {}, DirichletTrace* trace = nullptr);

struct LargeSolutionReport {
    std::vector<double> k_schedule;
    std::vector<double> parameters;       // psi0(k)
    double parameter_limit = 0.0;          // Aitken limit of psi0(k)
    double parameter_critical = 0.0;       // direct bisection value
    double interior_change = 0.0;          // last successive relative change of extrapolants
    double monotonicity_violation = 0.0;
};

std::vector<double> default_k_schedule();

// Profile of the critical shot (boundary-graded, blow-up flagged). No Dirichlet sequence.
SolutionProfile large_solution_direct(const RadialProblem& problem, const SolverOptions& opt = {});

// Dirichlet sequence along k_schedule, monotonicity check, Aitken limit, cross-check
// against the critical shot. Throws NotSaturated when the sequence has not settled.
SolutionProfile large_solution(const RadialProblem& problem, const std::vector<double>& k_schedule,
                               const SolverOptions& opt = {}, LargeSolutionReport* report = nullptr);

struct ComparisonResult {
    bool ordered = true;
    double max_violation = 0.0;  // relative
};

ComparisonResult comparison_check(const SolutionProfile& sub, const SolutionProfile& super,
                                  double slack = 1e-8);

// I(psi0) = integral_{psi0}^inf (q (F(z) - F(psi0)))^(-1/p) dz  (constant weight, b = 1).
double sandwich_integral(const NonlinearitySpec& f, double p, double psi0);

}  // namespace blowup
