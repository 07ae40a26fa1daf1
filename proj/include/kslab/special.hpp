#pragma once

#include <cmath>

#include "kslab/errors.hpp"

namespace kslab {

// C^3 bump: 1 on |x| <= 1, 0 on |x| >= 2, degree-7 smoothstep in between.
namespace cutoff {

inline double smoothstep7(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double t4 = t * t * t * t;
    return t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}

inline double dsmoothstep7(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double t3 = t * t * t;
    return t3 * (140.0 - 420.0 * t + 420.0 * t * t - 140.0 * t3);
}

inline double d2smoothstep7(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double t2 = t * t;
    return t2 * (420.0 - 1680.0 * t + 2100.0 * t2 - 840.0 * t2 * t);
}

inline double chi(double x) {
    x = std::abs(x);
    return smoothstep7(2.0 - x);
}

inline double dchi(double x) {
    const double s = x < 0.0 ? -1.0 : 1.0;
    x = std::abs(x);
    return -s * dsmoothstep7(2.0 - x);
}

inline double d2chi(double x) {
    x = std::abs(x);
    return d2smoothstep7(2.0 - x);
}

} // namespace cutoff

// The four rescaled cutoffs of the construction plus the matching bump.
struct CutoffConfig {
    double zeta_star_small = 0.05; // zeta_*
    double zeta_star_big = 20.0;   // zeta^*
    double zeta_m = 0.05;          // matching spot
    double nu = 1e-2;

    void validate() const {
        if (!(zeta_star_small > 0.0 && zeta_star_big > 1.0 && zeta_m > 0.0))
            throw ConfigError("cutoff scales must be positive with zeta^* > 1");
        if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("nu must lie in (0,1)");
    }

    double log_nu_abs() const { return std::abs(std::log(nu)); }

    double chi_star_small(double z) const { return cutoff::chi(z / zeta_star_small); }
    double chi_star_big(double z) const { return cutoff::chi(z / zeta_star_big); }
    double chi_m(double z) const { return cutoff::chi(z / zeta_m); }
    double dchi_m(double z) const { return cutoff::dchi(z / zeta_m) / zeta_m; }
    double d2chi_m(double z) const { return cutoff::d2chi(z / zeta_m) / (zeta_m * zeta_m); }
    double chi_nu(double z) const { return cutoff::chi(z / log_nu_abs()); }
    double dchi_nu(double z) const { return cutoff::dchi(z / log_nu_abs()) / log_nu_abs(); }
    double d2chi_nu(double z) const {
        const double l = log_nu_abs();
        return cutoff::d2chi(z / l) / (l * l);
    }
    double chi_bar_nu(double gamma) const { return cutoff::chi(gamma * nu / log_nu_abs()); }
};

struct WeightSpec {
    double beta = 0.5;
    double nu = 1e-2;

    double rho_nu(double zeta) const { return std::exp(-0.5 * beta * zeta * zeta); }
    double rho_gamma(double gamma) const {
        return std::exp(-0.5 * beta * nu * nu * gamma * gamma);
    }
};

// Exponential integrals E1, E2 in exp-scaled form exp(z) E_n(z), z > 0.
// Series below the switch point, continued fraction above; the switch at
// z = 4 matches beta zeta^2/2 = 4 in the outer eigenfunction assembly.
double expE1_scaled(double z);
double expE2_scaled(double z);

#if defined(__GNUC__) && defined(__x86_64__)
#define KSLAB_HAVE_FLOAT128 1
__float128 expE1_scaled_q(__float128 z);
__float128 expE2_scaled_q(__float128 z);
#endif

} // namespace kslab
