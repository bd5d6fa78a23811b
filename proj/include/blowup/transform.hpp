#pragma once

#include "blowup/nonlinearity.hpp"
#include "blowup/numerics.hpp"

#include <string>
#include <vector>

namespace blowup {

struct TransformOptions {
    double t_min = 1e-16;  // smallest t the u-grid must resolve
    double t_max = 10.0;
    int panels_per_octave = 4;
    std::size_t cache_nodes = 400;
    double cache_t_min = 1e-8;
    double cache_t_max = 10.0;
};

struct IdentityResiduals {
    double r1 = 0.0;
    double r2 = 0.0;
};

// phi defined by  integral_{phi(t)}^inf (q F(s))^(-1/p) ds = t,  q = p/(p-1).
class PhiTransform {
public:
    PhiTransform(NonlinearitySpec f, double p, TransformOptions opt = {});

    double p() const { return p_; }
    double q() const { return q_; }
    const NonlinearitySpec& nonlinearity() const { return f_; }

    double phi_inverse(double u) const;
    double phi(double t) const;
    // Monotone interpolation of the cached table; valid on the cache range.
    double phi_cached(double t) const;

    // Five-point differences of phi with step t*1e-3.
    double phi_prime(double t) const;
    double phi_second(double t) const;
    // -(q F(phi(t)))^(1/p)
    double phi_prime_identity(double t) const;

    IdentityResiduals identity_residuals(double t) const;
    IndexEstimate phi_nrvz_index() const;
    double nrvz_target() const { return -p_ / (f_.sigma + 2.0 - p_); }

    const num::MonotoneTable& cache() const { return cache_; }
    void write_cache_csv(const std::string& path) const;

private:
    double integrand(double s) const;
    double tail_from(double u) const;

    NonlinearitySpec f_;
    double p_, q_, kappa_;
    double tol_ = 1e-14;  // panel quadrature tolerance
    std::vector<double> u_;  // increasing
    std::vector<double> T_;  // T_[j] = phi_inverse(u_[j]), decreasing
    double tail_top_ = 0.0;
    num::MonotoneTable cache_;
};

}  // namespace blowup
