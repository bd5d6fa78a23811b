#include "blowup/rate_fit.hpp"

#include "blowup/errors.hpp"
#include "blowup/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <thread>

#include <Eigen/Dense>

namespace blowup {

namespace {

double profile_radius(const SolutionProfile& p) { return p.r.front() + p.d.front(); }

// Indices of nodes inside the window, ordered by decreasing distance.
std::vector<std::size_t> window_nodes(const SolutionProfile& prof, Window w) {
    const double R = profile_radius(prof);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const double x = prof.d[i] / R;
        if (x >= w.d_min * (1 - 1e-12) && x <= w.d_max * (1 + 1e-12) && prof.u[i] > 0) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return prof.d[a] > prof.d[b]; });
    if (idx.size() < 8)
        throw Error(ErrorKind::WindowTooSmall,
                    "window holds " + std::to_string(idx.size()) + " nodes, need >= 8");
    return idx;
}

double spread(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

}  // namespace

PowerFit fit_power(const SolutionProfile& prof, Window w) {
    const auto idx = window_nodes(prof, w);
    const Eigen::Index n = Eigen::Index(idx.size());
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = std::log(prof.d[idx[i]]);
        y(i) = std::log(prof.u[idx[i]]);
    }
    const Eigen::Vector2d coef = X.colPivHouseholderQr().solve(y);
    const double rss = (y - X * coef).squaredNorm();
    const Eigen::Matrix2d cov = (X.transpose() * X).inverse() * (rss / double(n - 2));
    PowerFit out;
    out.beta_hat = -coef(1);
    out.C_hat = std::exp(coef(0));
    out.beta_stderr = std::sqrt(std::max(cov(1, 1), 0.0));
    out.C_stderr = out.C_hat * std::sqrt(std::max(cov(0, 0), 0.0));
    out.window = w;
    out.points = idx.size();
    return out;
}

LimitFit extrapolate_trace(std::vector<TracePoint> trace) {
    LimitFit out;
    std::vector<double> v;
    for (const auto& t : trace) v.push_back(t.value);
    out.trace = std::move(trace);
    const auto a = num::aitken(v);
    std::vector<double> acc;
    for (double x : a)
        if (std::isfinite(x)) acc.push_back(x);
    const std::size_t n = v.size();
    const double raw_spread = spread(std::span<const double>(v).subspan(n - 3));
    if (acc.size() >= 3) {
        const double acc_spread = spread(std::span<const double>(acc).subspan(acc.size() - 3));
        if (acc_spread <= raw_spread) {
            out.value = acc.back();
            out.std_error = acc_spread;
            out.accelerated = true;
        }
    }
    if (!out.accelerated) {
        out.value = v.back();
        out.std_error = raw_spread;
    }
    out.std_error = std::max(out.std_error, 1e-12 * std::abs(out.value) + 1e-15);
    return out;
}

RatioFit first_order_ratio(const SolutionProfile& prof, const RadialProblem& pb,
                           const KaramataSpec& k, const PhiTransform& phi, Window w,
                           double decomposition_tolerance) {
    const auto idx = window_nodes(prof, w);
    const double a = pb.alpha, p = pb.p;
    std::vector<TracePoint> ratios, cs;
    for (auto i : idx) {
        const double d = prof.d[i];
        ratios.push_back({d, prof.u[i] / phi.phi(big_k(k, d))});
        const double scale = std::pow(d, a - 0.5 * a * p) * std::pow(k.k(d), p);
        cs.push_back({d, pb.coefficient(prof.r[i], d) / scale});
    }
    RatioFit out;
    out.window = w;
    std::vector<double> cv;
    for (const auto& c : cs) cv.push_back(c.value);
    const auto cfit = extrapolate_trace(cs);
    out.c_hat = cfit.value;
    out.decomposition_spread = spread(cv) / std::abs(out.c_hat);
    if (out.decomposition_spread > decomposition_tolerance)
        throw Error(ErrorKind::DecompositionMismatch,
                    "b / (d^(alpha-alpha p/2) k^p) varies by " +
                        std::to_string(out.decomposition_spread) + " on the window");
    const auto fit = extrapolate_trace(ratios);
    out.xi_hat = fit.value;
    out.std_error = fit.std_error;
    out.accelerated = fit.accelerated;
    out.trace = fit.trace;
    return out;
}

SecondOrderFit second_order_correction(const SolutionProfile& prof, double xi0,
                                       const KaramataSpec& k, const PhiTransform& phi,
                                       const YKind& y, Window w) {
    if (phi.p() != 2.0) throw Error(ErrorKind::DomainError, "second-order theory is for p = 2");
    const double R = profile_radius(prof);
    const double dmin = *std::min_element(prof.d.begin(), prof.d.end());
    if (dmin > 1e-6 * R * (1 + 1e-9))
        throw Error(ErrorKind::InsufficientResolution, "profile must resolve d <= 1e-6 R");
    const auto idx = window_nodes(prof, w);
    std::vector<TracePoint> trace;
    double last_rel = 0.0;
    for (auto i : idx) {
        const double d = prof.d[i];
        const double rel = prof.u[i] / (xi0 * phi.phi(big_k(k, d))) - 1.0;
        trace.push_back({d, rel / y(d)});
        last_rel = rel;
    }
    if (std::abs(last_rel) > 0.05)
        throw Error(ErrorKind::FirstOrderMismatch,
                    "u / (xi0 phi(K(d))) is " + std::to_string(1 + last_rel) + " at the window end");
    const auto fit = extrapolate_trace(trace);
    SecondOrderFit out;
    out.chi_hat = fit.value;
    out.std_error = fit.std_error;
    out.accelerated = fit.accelerated;
    out.outside_hypothesis = y.type == YKind::Type::PowerZeta && y.exponent >= 1.0;
    out.window = w;
    out.trace = fit.trace;
    return out;
}

std::string_view to_string(AdjudicationOutcome o) {
    switch (o) {
        case AdjudicationOutcome::Theorem: return "theorem";
        case AdjudicationOutcome::Proof: return "proof";
        case AdjudicationOutcome::Inconclusive: return "inconclusive";
        case AdjudicationOutcome::Neither: return "neither";
    }
    return "inconclusive";
}

AdjudicationEntry adjudicate_member(const FamilyMember& m, Window window, const SolverOptions& opt) {
    RadialProblem pb;
    pb.p = m.p;
    pb.alpha = m.alpha;
    pb.nonlinearity = NonlinearitySpec::pure_power(m.power_q);
    const auto prof = large_solution_direct(pb, opt);
    const auto k = KaramataSpec::power(0.5 * m.alpha - m.alpha / m.p, m.alpha);
    const PhiTransform phi(pb.nonlinearity, m.p);
    const auto fit = first_order_ratio(prof, pb, k, phi, window);

    AdjudicationEntry e;
    e.member = m;
    e.l1 = 1.0 / (1.0 + k.q - 0.5 * m.alpha);
    const double sigma = m.power_q - 1.0;
    e.xi_hat = fit.xi_hat;
    e.std_error = fit.std_error;
    e.trace = fit.trace;
    e.xi_theorem = xi_constant(m.p, m.alpha, sigma, e.l1, fit.c_hat, XiVariant::TheoremNumerator2);
    e.xi_proof = xi_constant(m.p, m.alpha, sigma, e.l1, fit.c_hat, XiVariant::ProofNumeratorP);
    // Two standard errors plus a floor for solver and transform accuracy.
    e.margin = 2.0 * e.std_error + 1e-7 * std::abs(e.xi_hat);
    const bool th = std::abs(e.xi_hat - e.xi_theorem) <= e.margin;
    const bool pr = std::abs(e.xi_hat - e.xi_proof) <= e.margin;
    e.by_design = m.p == 2.0;
    if (e.by_design || (th && pr))
        e.outcome = AdjudicationOutcome::Inconclusive;
    else if (th)
        e.outcome = AdjudicationOutcome::Theorem;
    else if (pr)
        e.outcome = AdjudicationOutcome::Proof;
    else
        e.outcome = AdjudicationOutcome::Neither;
    return e;
}

AdjudicationReport adjudicate_variant(const std::vector<FamilyMember>& family, Window window,
                                      const SolverOptions& opt, int jobs) {
    AdjudicationReport rep;
    if (jobs <= 1) {
        for (const auto& m : family) rep.entries.push_back(adjudicate_member(m, window, opt));
        return rep;
    }
    // At most `jobs` workers pull members by index; entries keep family order.
    std::vector<std::future<AdjudicationEntry>> futs(family.size());
    std::vector<std::promise<AdjudicationEntry>> slots(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) futs[i] = slots[i].get_future();
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), family.size());
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < family.size();) {
                try {
                    slots[i].set_value(adjudicate_member(family[i], window, opt));
                } catch (...) {
                    slots[i].set_exception(std::current_exception());
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& f : futs) rep.entries.push_back(f.get());
    return rep;
}

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace,
                     const std::string& value_name) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path + "'");
    out << "d," << value_name << '\n' << std::setprecision(17);
    for (const auto& t : trace) out << t.d << ',' << t.value << '\n';
}

}  // namespace blowup
