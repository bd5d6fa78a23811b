#include "blowup/transform.hpp"

#include "blowup/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>

#include <boost/math/tools/roots.hpp>

namespace blowup {

PhiTransform::PhiTransform(NonlinearitySpec f, double p, TransformOptions opt)
    : f_(std::move(f)), p_(p), q_(p / (p - 1.0)), kappa_((f_.sigma + 2.0) / p) {
    if (!(p > 1.0)) throw Error(ErrorKind::DomainError, "transform needs p > 1");
    // With a slowly varying factor F itself is a quadrature good to ~1e-13; asking the
    // outer panels for more only bisects that noise.
    tol_ = f_.kind == SlowlyVarying::One ? 1e-14 : 1e-12;
    if (!(kappa_ > 1.0))
        throw Error(ErrorKind::DivergentIntegral, "Keller-Osserman integral diverges (sigma+2 <= p)");

    const double step = std::exp2(1.0 / opt.panels_per_octave);
    const auto g = [this](double s) { return integrand(s); };

    // Upward panels from u = 1 until the remaining tail is far below t_min.
    std::vector<double> up{1.0}, up_panels;
    while (true) {
        const double u = up.back();
        if (u * g(u) / (kappa_ - 1.0) < 1e-2 * opt.t_min || u > 1e280) break;
        up_panels.push_back(num::integrate(g, u, u * step, tol_));
        up.push_back(u * step);
    }
    tail_top_ = tail_from(up.back());

    // Downward panels until phi_inverse exceeds t_max (or u is negligible).
    std::deque<double> down_u, down_panels;
    {
        num::CompensatedSum total;
        for (double x : up_panels) total.add(x);
        total.add(tail_top_);
        double u = 1.0, acc = total.value();
        while (acc < 2.0 * opt.t_max && u > 1e-250) {
            const double lo = u / step;
            const double panel = num::integrate(g, lo, u, tol_);
            down_panels.push_front(panel);
            down_u.push_front(lo);
            acc += panel;
            u = lo;
        }
    }

    u_.assign(down_u.begin(), down_u.end());
    u_.insert(u_.end(), up.begin(), up.end());
    std::vector<double> panels(down_panels.begin(), down_panels.end());
    panels.insert(panels.end(), up_panels.begin(), up_panels.end());

    T_.assign(u_.size(), 0.0);
    num::CompensatedSum acc;
    acc.add(tail_top_);
    T_.back() = acc.value();
    for (std::size_t j = panels.size(); j-- > 0;) {
        acc.add(panels[j]);
        T_[j] = acc.value();
    }

    auto tc = num::log_grid(opt.cache_t_min, opt.cache_t_max, opt.cache_nodes);
    std::vector<double> pc;
    pc.reserve(tc.size());
    for (double t : tc) pc.push_back(phi(t));
    // Table is stored with increasing abscissa; PCHIP handles the decreasing ordinate.
    cache_ = num::MonotoneTable(std::move(tc), std::move(pc), true);
}

double PhiTransform::integrand(double s) const { return keller_integrand(f_, p_, s); }

double PhiTransform::tail_from(double u) const {
    return num::tail_integral([this](double s) { return integrand(s); }, u, kappa_, 0.1 * tol_);
}

double PhiTransform::phi_inverse(double u) const {
    if (!(u > 0.0)) throw Error(ErrorKind::DomainError, "phi_inverse needs u > 0");
    const auto g = [this](double s) { return integrand(s); };
    if (u >= u_.back()) return tail_from(u);
    if (u < u_.front()) return T_.front() + num::integrate(g, u, u_.front(), tol_);
    const auto it = std::upper_bound(u_.begin(), u_.end(), u);
    const std::size_t j = std::size_t(it - u_.begin());  // u_[j-1] <= u < u_[j]
    if (u == u_[j - 1]) return T_[j - 1];
    return T_[j] + num::integrate(g, u, u_[j], tol_);
}

double PhiTransform::phi(double t) const {
    if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "phi needs t > 0");
    namespace bt = boost::math::tools;
    double lo, hi;
    if (t > T_.front()) {
        if (u_.front() <= 1e-250)
            throw Error(ErrorKind::OutOfRange, "t exceeds the total integral; phi reaches 0");
        hi = u_.front();
        lo = hi;
        while (phi_inverse(lo) < t) {
            hi = lo;
            lo /= 16.0;
            if (lo < 1e-300) throw Error(ErrorKind::OutOfRange, "t exceeds the total integral");
        }
    } else if (t < T_.back()) {
        lo = u_.back();
        hi = lo;
        while (phi_inverse(hi) > t) {
            lo = hi;
            hi *= 16.0;
            if (hi > 1e300) throw Error(ErrorKind::OutOfRange, "phi(t) overflows");
        }
    } else {
        // T_ is decreasing; locate T_[j+1] <= t <= T_[j].
        const auto it = std::lower_bound(T_.begin(), T_.end(), t, std::greater<double>());
        std::size_t j = std::size_t(it - T_.begin());
        if (j < T_.size() && T_[j] == t) return u_[j];
        lo = u_[j - 1];
        hi = u_[j];
    }
    auto fn = [&](double u) { return phi_inverse(u) - t; };
    std::uintmax_t iters = 100;
    const auto r = bt::toms748_solve(fn, lo, hi, bt::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

double PhiTransform::phi_cached(double t) const { return cache_(t); }

double PhiTransform::phi_prime(double t) const {
    return num::diff1([this](double s) { return phi(s); }, t, 1e-3 * t);
}

double PhiTransform::phi_second(double t) const {
    return num::diff2([this](double s) { return phi(s); }, t, 1e-3 * t);
}

double PhiTransform::phi_prime_identity(double t) const {
    return -std::exp((std::log(q_) + log_big_f(f_, phi(t))) / p_);
}

IdentityResiduals PhiTransform::identity_residuals(double t) const {
    const double ph = phi(t);
    const double d1 = phi_prime(t);
    const double d2 = phi_second(t);
    const double root = std::exp((std::log(q_) + log_big_f(f_, ph)) / p_);
    const double rhs = (q_ / p_) * f_.f(ph);
    IdentityResiduals r;
    r.r1 = std::abs(d1 + root) / std::abs(d1);
    r.r2 = std::abs(std::pow(std::abs(d1), p_ - 2.0) * d2 - rhs) / rhs;
    return r;
}

IndexEstimate PhiTransform::phi_nrvz_index() const {
    IndexEstimate est;
    for (int j = 0; j < 7; ++j) {
        const double t = std::pow(10.0, -2.0 - j);
        est.samples.push_back(t * phi_prime(t) / phi(t));
    }
    const auto ex = num::accelerate(est.samples);
    if (!ex.converged(1e-4))
        throw Error(ErrorKind::NonConvergent, "phi index extrapolants disagree");
    est.value = ex.value;
    est.previous = ex.previous;
    return est;
}

void PhiTransform::write_cache_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path + "'");
    out << "t,phi\n" << std::setprecision(17);
    for (std::size_t i = 0; i < cache_.x().size(); ++i)
        out << cache_.x()[i] << ',' << cache_.y()[i] << '\n';
}

}  // namespace blowup
