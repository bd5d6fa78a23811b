#include "blowup/radial_solver.hpp"

#include "blowup/errors.hpp"
#include "blowup/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

namespace blowup {

Coefficient Coefficient::constant(double c) {
    Coefficient b;
    b.fn = [c](double, double) { return c; };
    b.gamma = 0.0;
    b.B = [c](double) { return c; };
    return b;
}

Coefficient Coefficient::factored(std::function<double(double)> B, double gamma) {
    Coefficient b;
    b.fn = [B, gamma](double r, double d) { return B(r) * std::pow(d, gamma); };
    b.gamma = gamma;
    b.B = std::move(B);
    return b;
}

Coefficient Coefficient::general(RadialFunction fn) {
    Coefficient b;
    b.fn = std::move(fn);
    return b;
}

double RadialProblem::weight(double r, double d) const {
    switch (weight_kind) {
        case WeightKind::DistancePower: return std::pow(d, alpha);
        case WeightKind::CenterPower: return std::pow(r, alpha);
        case WeightKind::Custom: return custom_weight(r, d);
    }
    return 1.0;
}

void RadialProblem::validate() const {
    if (dimension < 1) throw Error(ErrorKind::DomainError, "dimension must be >= 1");
    if (!(radius > 0)) throw Error(ErrorKind::DomainError, "radius must be positive");
    if (!(p > 1)) throw Error(ErrorKind::DomainError, "p must exceed 1");
    if (weight_kind == WeightKind::DistancePower && !(alpha < p - 1.0))
        throw Error(ErrorKind::DomainError, "alpha must be below p-1");
    if (weight_kind == WeightKind::CenterPower && !(alpha < 1.0 && alpha > -1.0))
        throw Error(ErrorKind::DomainError, "center weight exponent must lie in (-1,1)");
    if (weight_kind == WeightKind::Custom && !custom_weight)
        throw Error(ErrorKind::DomainError, "custom weight missing");
    if (left == LeftCondition::Dirichlet0 && dimension != 1)
        throw Error(ErrorKind::DomainError, "u(0)=0 left condition is the interval problem (N=1)");
    if (!coefficient.fn) throw Error(ErrorKind::DomainError, "coefficient missing");
    for (double frac : {0.0, 0.25, 0.5, 0.75, 0.999}) {
        const double r = frac * radius;
        if (!(coefficient(r, radius - r) > 0))
            throw Error(ErrorKind::DomainError, "coefficient b must be positive inside the ball");
    }
}

void SolutionProfile::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path + "'");
    out << "r,d,u,du_dr\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.size(); ++i)
        out << r[i] << ',' << d[i] << ',' << u[i] << ',' << du[i] << '\n';
}

namespace {

using State = std::array<double, 3>;  // z (boundary coordinate), ln psi, ln flux

// The weight is split as w = d^(alpha) * w_hat with a = alpha/(p-1) for distance
// weights. The boundary coordinate z = d^nu / nu, nu = min(1, 1-a), keeps both
// dpsi/dz ~ d^(1-nu-a) and dflux/dz ~ d^(1-nu) finite at d = 0.
struct Geometry {
    const RadialProblem& pb;
    int N;
    double R, p, a, nu, e_psi, e_flux, zR, scale;

    explicit Geometry(const RadialProblem& problem)
        : pb(problem), N(problem.dimension), R(problem.radius), p(problem.p) {
        a = pb.weight_kind == WeightKind::DistancePower ? pb.alpha / (p - 1.0) : 0.0;
        nu = std::min(1.0, 1.0 - a);
        e_psi = 1.0 - nu - a;
        e_flux = 1.0 - nu;
        zR = z_of_d(R);
        scale = zR;
    }

    double z_of_d(double d) const { return nu == 1.0 ? d : std::pow(d, nu) / nu; }
    double d_of_z(double z) const {
        if (z <= 0) return 0.0;
        return nu == 1.0 ? z : std::pow(nu * z, 1.0 / nu);
    }
    double log_w_hat(double r, double d) const {
        switch (pb.weight_kind) {
            case WeightKind::DistancePower: return 0.0;
            case WeightKind::CenterPower: return pb.alpha * std::log(r);
            case WeightKind::Custom: return std::log(pb.custom_weight(r, d));
        }
        return 0.0;
    }
    // ln of g = dx/dz, x = ln psi
    double log_g(const State& y, double r, double d) const {
        double lg = (y[2] - log_w_hat(r, d)) / (p - 1.0) - y[1];
        if (e_psi != 0.0) lg += e_psi * std::log(d);
        return lg;
    }

    void rhs(const State& y, State& dy) const {
        const double d = d_of_z(y[0]);
        const double r = R - d;
        const double g = std::exp(log_g(y, r, d));
        const double den = 1.0 + scale * g;
        const double b = pb.coefficient(r, d);
        double src = 0.0;
        if (b > 0) src = b * std::exp(pb.nonlinearity.log_f(std::exp(y[1])) - y[2]);
        if (N > 1) src -= (N - 1) / r;
        if (e_flux != 0.0) src *= std::pow(d, e_flux);
        dy[0] = -1.0 / den;
        dy[1] = g / den;
        dy[2] = src / den;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Node {
    double z, r, d;
};

std::vector<Node> profile_nodes(const Geometry& geo, const GridOptions& grid) {
    std::vector<Node> nodes;
    const double R = geo.R;
    for (int i = 1; i <= grid.center_nodes; ++i) {
        const double r = 0.5 * R * i / grid.center_nodes;
        const double d = R - r;
        nodes.push_back({geo.z_of_d(d), r, d});
    }
    const double dmin = grid.finest * R;
    for (double d = 0.5 * R * grid.grading_ratio; d > dmin; d *= grid.grading_ratio)
        nodes.push_back({geo.z_of_d(d), R - d, d});
    nodes.push_back({geo.z_of_d(dmin), R - dmin, dmin});
    return nodes;
}

struct Outcome {
    bool blew_up = false;
    double z_blow = 0.0;
    double x_stop = 0.0;  // ln psi at the stop event
    long steps = 0;
    double error_sum = 0.0;
};

class Integrator {
public:
    Integrator(const Geometry& geo, const SolverOptions& opt) : geo_(geo), opt_(opt) {}

    // Integrates from y0 until z reaches z_stop or the solution blows up.
    // Calls record(node_index, state) at every node crossing.
    template <class Record>
    Outcome run(State y, double z_stop, const std::vector<Node>& nodes, Record&& record) {
        namespace odeint = boost::numeric::odeint;
        odeint::runge_kutta_fehlberg78<State> stepper;
        auto sys = [this](const State& s, State& ds, double) { geo_.rhs(s, ds); };

        Outcome out;
        std::size_t next = 0;
        while (next < nodes.size() && nodes[next].z >= y[0]) ++next;  // nodes already passed
        double h = 1e-4 * geo_.zR;
        double tau = 0.0;
        const double x_thr = std::log(opt_.blowup_threshold);
        double lg_prev = std::numeric_limits<double>::quiet_NaN(), x_prev = y[1];
        State yn, err;

        while (true) {
            if (++out.steps > opt_.max_steps)
                throw Error(ErrorKind::NoConvergence, "step budget exhausted at r = " +
                                                          std::to_string(radius_of(y)));
            // The last sliver before the stop is closed along the current slope: steps that
            // straddle d = 0 see the d^(1-nu-a) kink and never pass the z error test.
            if (y[0] - z_stop <= 1e-13 * geo_.zR) {
                State dy;
                geo_.rhs(y, dy);
                out.x_stop = y[1] + dy[1] / -dy[0] * (y[0] - z_stop);
                return out;
            }
            stepper.do_step(sys, y, tau, yn, h, err);
            double en = 0.0;
            bool finite = true;
            for (int i = 0; i < 3; ++i) {
                if (!std::isfinite(yn[i])) finite = false;
                const double sc = i == 0 ? 1e-22 * geo_.zR + opt_.rtol * std::max(std::abs(y[0]), std::abs(yn[0]))
                                         : 1e-13 + opt_.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
                en = std::max(en, std::abs(err[i]) / sc);
            }
            if (!finite || !(en <= 1.0)) {
                h *= finite ? std::max(0.2, 0.9 * std::pow(en, -1.0 / 8.0)) : 0.25;
                if (h < 1e-15 * geo_.zR)
                    throw Error(ErrorKind::StepUnderflow,
                                "step underflow at d = " + fmt(geo_.d_of_z(y[0])) + ", ln u = " + fmt(y[1]));
                continue;
            }
            out.error_sum += en * opt_.rtol;

            // Node and stop events crossed by this step.
            while (next < nodes.size() && yn[0] <= nodes[next].z) {
                const State ys = locate(stepper, sys, y, tau, h, nodes[next].z);
                record(next, ys);
                ++next;
            }
            if (yn[0] <= z_stop) {
                const State ys = locate(stepper, sys, y, tau, h, z_stop);
                out.x_stop = ys[1];
                return out;
            }

            y = yn;
            tau += h;
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(en, 1e-30), -1.0 / 8.0)));

            if (y[1] >= x_thr) {
                const double d = geo_.d_of_z(y[0]);
                const double lg = geo_.log_g(y, geo_.R - d, d);
                if (std::isfinite(lg_prev) && y[1] > x_prev) {
                    const double growth = (lg - lg_prev) / (y[1] - x_prev);
                    if (growth > 0) {
                        const double tail = 1.0 / (growth * std::exp(lg));
                        const double zb = y[0] - tail;
                        if ((zb > z_stop && tail <= 1e-4 * (zb - z_stop)) ||
                            y[1] >= opt_.blowup_log_cap) {
                            if (zb > z_stop) {
                                out.blew_up = true;
                                out.z_blow = zb;
                                return out;
                            }
                            out.x_stop = std::numeric_limits<double>::infinity();
                            return out;
                        }
                    }
                }
                lg_prev = lg;
            }
            x_prev = y[1];
        }
    }

private:
    double radius_of(const State& y) const { return geo_.R - geo_.d_of_z(y[0]); }

    // Step from y by the h* in (0, h] that lands exactly on z = target (Illinois).
    template <class Stepper, class Sys>
    State locate(Stepper& stepper, Sys& sys, const State& y, double tau, double h, double target) {
        State ys;
        double ha = 0.0, fa = y[0] - target;
        double hb = h;
        stepper.do_step(sys, y, tau, ys, hb);
        double fb = ys[0] - target;
        if (fa <= 0.0) {
            ys = y;
            ys[0] = target;
            return ys;
        }
        int side = 0;
        const double tol = 1e-16 * std::max(std::abs(target), 1e-6 * geo_.zR);
        for (int it = 0; it < 100 && std::abs(fb) > tol; ++it) {
            const double hc = hb - fb * (hb - ha) / (fb - fa);
            stepper.do_step(sys, y, tau, ys, hc);
            const double fc = ys[0] - target;
            if ((fc > 0) == (fa > 0)) {
                ha = hc;
                fa = fc;
                if (side == -1) fb *= 0.5;
                side = -1;
            } else {
                hb = hc;
                fb = fc;
                if (side == 1) fa *= 0.5;
                side = 1;
            }
            if (std::abs(hb - ha) <= 1e-16 * h) break;
        }
        stepper.do_step(sys, y, tau, ys, hb);
        ys[0] = target;
        return ys;
    }

    const Geometry& geo_;
    const SolverOptions& opt_;
};

constexpr double kStartFraction = 1e-7;

// Series start a short distance from the centre.
State initial_state(const Geometry& geo, double param, double& r0) {
    const RadialProblem& pb = geo.pb;
    r0 = kStartFraction * geo.R;
    const double d0 = geo.R - r0;
    State y;
    y[0] = geo.z_of_d(d0);
    if (pb.left == LeftCondition::Dirichlet0) {
        y[1] = std::log(param) + std::log(r0);
        y[2] = std::log(pb.weight(r0, d0)) + (geo.p - 1.0) * std::log(param);
        return y;
    }
    double w0 = 1.0, c = 0.0;
    switch (pb.weight_kind) {
        case WeightKind::DistancePower: w0 = std::pow(geo.R, pb.alpha); break;
        case WeightKind::CenterPower: c = pb.alpha; break;
        case WeightKind::Custom: w0 = pb.custom_weight(0.0, geo.R); break;
    }
    const double b0 = pb.coefficient(0.0, geo.R);
    const double lnf0 = pb.nonlinearity.log_f(param);
    const double N = geo.N;
    const double e = (1.0 - c) / (geo.p - 1.0) + 1.0;
    const double lnC = (std::log(b0 / (N * w0)) + lnf0) / (geo.p - 1.0);
    const double rel = std::exp(lnC + e * std::log(r0) - std::log(e) - std::log(param));
    y[1] = std::log(param) + std::log1p(rel);
    y[2] = std::log(b0 / N) + lnf0 + std::log(r0);
    return y;
}

void record_node(const Geometry& geo, SolutionProfile& prof, const Node& n, const State& y) {
    prof.r.push_back(n.r);
    prof.d.push_back(n.d);
    prof.u.push_back(std::exp(y[1]));
    const double G = std::exp((y[2] - geo.log_w_hat(n.r, n.d)) / (geo.p - 1.0));
    prof.du.push_back(geo.a == 0.0 ? G : G * std::pow(n.d, -geo.a));
    prof.flux.push_back(std::exp(y[2]));
}

ShotResult shoot_impl(const RadialProblem& pb, double param, double stop_radius, bool record,
                      const SolverOptions& opt) {
    if (param < 0) throw Error(ErrorKind::DomainError, "shooting parameter must be >= 0");
    Geometry geo(pb);
    ShotResult res;
    SolutionProfile& prof = res.profile;
    prof.shooting_parameter = param;
    prof.grading_ratio = opt.grid.grading_ratio;

    std::vector<Node> nodes;
    if (record) nodes = profile_nodes(geo, opt.grid);
    const bool dirichlet0 = pb.left == LeftCondition::Dirichlet0;

    if (record) {
        prof.r.push_back(0.0);
        prof.d.push_back(pb.radius);
        prof.u.push_back(dirichlet0 ? 0.0 : param);
        prof.du.push_back(dirichlet0 ? param : 0.0);
        prof.flux.push_back(dirichlet0 ? pb.weight(0.0, pb.radius) * std::pow(param, pb.p - 1.0) : 0.0);
    }
    if (param == 0.0) {
        // f(0) = 0: the zero solution.
        for (const auto& n : nodes) {
            prof.r.push_back(n.r);
            prof.d.push_back(n.d);
            prof.u.push_back(0.0);
            prof.du.push_back(0.0);
            prof.flux.push_back(0.0);
        }
        res.boundary_value = 0.0;
        prof.boundary_value = 0.0;
        return res;
    }

    double r0 = 0.0;
    const State y0 = initial_state(geo, param, r0);
    const double z_stop = stop_radius >= pb.radius ? 0.0 : geo.z_of_d(pb.radius - stop_radius);
    Integrator integ(geo, opt);
    const Outcome out = integ.run(y0, z_stop, nodes, [&](std::size_t i, const State& y) {
        record_node(geo, prof, nodes[i], y);
    });
    prof.steps = out.steps;
    prof.residual_norm = out.error_sum;
    if (out.blew_up) {
        const double rb = pb.radius - geo.d_of_z(out.z_blow);
        res.blow_up_radius = rb;
        prof.blow_up = true;
        prof.blow_up_radius = rb;
    } else {
        res.boundary_value = std::exp(out.x_stop);
        prof.boundary_value = res.boundary_value;
    }
    return res;
}

}  // namespace

ShotResult shoot(const RadialProblem& problem, double parameter, const SolverOptions& opt) {
    problem.validate();
    return shoot_impl(problem, parameter, problem.radius, true, opt);
}

std::optional<double> blow_up_radius(const RadialProblem& problem, double parameter,
                                     double stop_radius, const SolverOptions& opt) {
    return shoot_impl(problem, parameter, stop_radius, false, opt).blow_up_radius;
}

namespace {

// Bisection on the monotone map parameter -> "blows up before stop_radius".
CriticalShot bisect_blow_up(const RadialProblem& pb, double stop_radius, const SolverOptions& opt) {
    auto blows = [&](double v) {
        return shoot_impl(pb, v, stop_radius, false, opt).blow_up_radius.has_value();
    };
    CriticalShot c;
    double lo = 0.0, hi = 1.0;
    if (!blows(hi)) {
        lo = hi;
        for (int i = 0; !blows(hi *= 4.0); ++i) {
            lo = hi;
            if (i > 400) throw Error(ErrorKind::BracketingFailure, "no blow-up for any tried value");
        }
    } else {
        lo = hi / 4.0;
        while (blows(lo)) {
            hi = lo;
            lo /= 4.0;
            if (lo < 1e-250) throw Error(ErrorKind::BracketingFailure, "blow-up for all tried values");
        }
    }
    int it = 0;
    while (it < 200) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ++it;
        if (blows(mid))
            hi = mid;
        else
            lo = mid;
    }
    c.lower = lo;
    c.upper = hi;
    c.iterations = it;
    return c;
}

}  // namespace

double ko_envelope(const RadialProblem& problem, double s, const SolverOptions& opt) {
    problem.validate();
    if (!(s > 0.0 && s <= problem.radius))
        throw Error(ErrorKind::BracketingFailure, "envelope radius outside (0, R]");
    return bisect_blow_up(problem, s, opt).upper;
}

CriticalShot critical_parameter(const RadialProblem& problem, const SolverOptions& opt) {
    problem.validate();
    return bisect_blow_up(problem, problem.radius, opt);
}

SolutionProfile solve_dirichlet(const RadialProblem& problem, double k, const SolverOptions& opt,
                                DirichletTrace* trace) {
    if (k == 0.0) return shoot(problem, 0.0, opt).profile;
    return solve_dirichlet(problem, k, critical_parameter(problem, opt), opt, trace);
}

SolutionProfile solve_dirichlet(const RadialProblem& pb, double k, const CriticalShot& crit,
                                const SolverOptions& opt, DirichletTrace* trace) {
    if (k < 0) throw Error(ErrorKind::DomainError, "boundary value must be >= 0");
    pb.validate();
    if (k == 0.0) return shoot_impl(pb, 0.0, pb.radius, true, opt).profile;
    namespace bt = boost::math::tools;

    const double star = crit.lower;
    const double big = 1e3;
    auto mismatch = [&](double v) {
        const auto s = shoot_impl(pb, v, pb.radius, false, opt);
        const double bv = s.blow_up_radius ? std::numeric_limits<double>::infinity() : s.boundary_value;
        if (trace) {
            trace->parameters.push_back(v);
            trace->boundary_values.push_back(bv);
        }
        if (!std::isfinite(bv)) return big;
        return std::max(-big, std::log(bv) - std::log(k));
    };

    double root;
    const double mid = 0.5 * star;
    const double gm = mismatch(mid);
    std::uintmax_t iters = 200;
    if (gm > 0) {
        // Small parameters: psi(R) is roughly proportional to psi0, so solve in ln psi0.
        double hi = std::log(mid), lo = hi - 2.0, glo = mismatch(std::exp(lo));
        while (glo > 0) {
            hi = lo;
            lo -= 2.0;
            if (lo < -700) throw Error(ErrorKind::BracketingFailure, "boundary value too small");
            glo = mismatch(std::exp(lo));
        }
        auto fn = [&](double s) { return mismatch(std::exp(s)); };
        const auto r = bt::toms748_solve(fn, lo, hi, glo, mismatch(std::exp(hi)),
                                         bt::eps_tolerance<double>(50), iters);
        root = std::exp(0.5 * (r.first + r.second));
    } else {
        // Near the critical value psi(R) ~ (star - psi0)^(-c), so solve in ln(star - psi0).
        auto at = [&](double t) { return star - std::exp(t); };
        double lo = std::log(mid), hi = lo - 2.0;
        double ghi = mismatch(at(hi));
        const double floor = std::log(star) - 36.0;
        while (ghi < 0) {
            lo = hi;
            hi -= 2.0;
            if (hi < floor)
                throw Error(ErrorKind::BracketingFailure,
                            "boundary value beyond resolvable range: k = " + std::to_string(k));
            ghi = mismatch(at(hi));
        }
        auto fn = [&](double t) { return -mismatch(at(t)); };
        const auto r = bt::toms748_solve(fn, hi, lo, -ghi, -mismatch(at(lo)),
                                         bt::eps_tolerance<double>(50), iters);
        root = at(0.5 * (r.first + r.second));
    }
    auto prof = shoot_impl(pb, root, pb.radius, true, opt).profile;
    if (prof.blow_up || !std::isfinite(prof.boundary_value))
        throw Error(ErrorKind::NoConvergence, "Dirichlet shot blew up at the root");
    prof.residual_norm = std::abs(prof.boundary_value / k - 1.0);
    if (prof.residual_norm > 1e-9)
        throw Error(ErrorKind::NoConvergence,
                    "Dirichlet mismatch " + std::to_string(prof.residual_norm) + " for k = " + std::to_string(k));
    return prof;
}

std::vector<double> default_k_schedule() {
    std::vector<double> k;
    for (int i = 0; i <= 16; ++i) k.push_back(std::ldexp(1.0, i));
    return k;
}

SolutionProfile large_solution_direct(const RadialProblem& problem, const SolverOptions& opt) {
    const auto crit = critical_parameter(problem, opt);
    auto prof = shoot_impl(problem, crit.lower, problem.radius, true, opt).profile;
    prof.blow_up = true;
    prof.blow_up_radius = problem.radius;
    return prof;
}

SolutionProfile large_solution(const RadialProblem& problem, const std::vector<double>& ks,
                               const SolverOptions& opt, LargeSolutionReport* report) {
    if (ks.size() < 4) throw Error(ErrorKind::DomainError, "k schedule needs >= 4 entries");
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (!(ks[i] > ks[i - 1])) throw Error(ErrorKind::DomainError, "k schedule must increase");
    const auto crit = critical_parameter(problem, opt);

    LargeSolutionReport rep;
    rep.k_schedule = ks;
    rep.parameter_critical = crit.lower;
    std::vector<SolutionProfile> seq;
    for (double k : ks) {
        seq.push_back(solve_dirichlet(problem, k, crit, opt));
        rep.parameters.push_back(seq.back().shooting_parameter);
        if (seq.size() > 1) {
            const auto c = comparison_check(seq[seq.size() - 2], seq.back());
            rep.monotonicity_violation = std::max(rep.monotonicity_violation, c.max_violation);
        }
    }
    const auto pe = num::accelerate_best(rep.parameters, 4);
    rep.parameter_limit = pe.value;

    // Interior half of the grid: r <= R/2.
    const auto& first = seq.front();
    for (std::size_t i = 0; i < first.size() && first.r[i] <= 0.5 * problem.radius; ++i) {
        std::vector<double> v;
        for (const auto& s : seq) v.push_back(s.u[i]);
        const auto ex = num::accelerate_best(v, 4);
        rep.interior_change =
            std::max(rep.interior_change, std::abs(ex.value - ex.previous) / std::abs(ex.value));
    }
    if (report) *report = rep;

    if (rep.monotonicity_violation > 1e-8)
        throw Error(ErrorKind::NoConvergence, "Dirichlet sequence is not monotone in k");
    const double agree = std::abs(rep.parameter_limit - crit.lower) / crit.lower;
    if (rep.interior_change > 1e-8 || agree > 1e-7)
        throw Error(ErrorKind::NotSaturated,
                    "schedule exhausted before interior convergence (change " +
                        fmt(rep.interior_change) + ", limit mismatch " +
                        fmt(agree) + ")");
    auto prof = shoot_impl(problem, crit.lower, problem.radius, true, opt).profile;
    prof.blow_up = true;
    prof.blow_up_radius = problem.radius;
    return prof;
}

ComparisonResult comparison_check(const SolutionProfile& sub, const SolutionProfile& super,
                                  double slack) {
    ComparisonResult res;
    auto violation = [](double a, double b) {
        const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        return (a - b) / scale;
    };
    if (sub.r == super.r) {
        for (std::size_t i = 0; i < sub.size(); ++i)
            res.max_violation = std::max(res.max_violation, violation(sub.u[i], super.u[i]));
    } else {
        num::MonotoneTable sup(super.r, super.u, false);
        for (std::size_t i = 0; i < sub.size(); ++i) {
            if (sub.r[i] < super.r.front() || sub.r[i] > super.r.back()) continue;
            res.max_violation = std::max(res.max_violation, violation(sub.u[i], sup(sub.r[i])));
        }
    }
    res.ordered = res.max_violation <= slack;
    return res;
}

double sandwich_integral(const NonlinearitySpec& f, double p, double psi0) {
    const double q = p / (p - 1.0);
    // Near psi0 the integrand ~ (z - psi0)^(-1/p); F differences taken directly.
    const auto head = [&](double z) {
        if (z <= psi0) return 0.0;
        const double dF = num::integrate([&](double s) { return f.f(s); }, psi0, z, 1e-14);
        return std::pow(q * dF, -1.0 / p);
    };
    const double near = num::integrate_singular(head, psi0, 2.0 * psi0, 1e-13);
    const double F0 = big_f(f, psi0);
    const auto far = [&](double z) { return std::pow(q * (big_f(f, z) - F0), -1.0 / p); };
    return near + num::tail_integral(far, 2.0 * psi0, (f.sigma + 2.0) / p, 1e-14);
}

}  // namespace blowup
