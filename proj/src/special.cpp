#include "kslab/special.hpp"

#include <cmath>
#include <limits>

#if defined(KSLAB_HAVE_FLOAT128)
#include <quadmath.h>
#endif

namespace kslab {

namespace {

constexpr double kEuler = 0.57721566490153286060651209008240243;

template <typename Real>
Real expE1_series(Real z, Real euler, Real logz, Real tol) {
    // E1(z) by its ascending series; valid and fast for z < ~6.
    Real sum = 0.0, term = 1.0;
    for (int k = 1; k < 400; ++k) {
        term *= -z / Real(k);
        const Real add = -term / Real(k);
        sum += add;
        const Real mag = add < Real(0) ? -add : add;
        if (mag < tol) break;
    }
    const Real e1 = -euler - logz + sum;
    return e1; // caller applies the exp scaling
}

double expEn_cf(int n, double x) {
    // Continued fraction for exp(x) E_n(x), x >= 1.
    const double fpmin = 1e-300;
    double b = x + n;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        const double a = -static_cast<double>(i) * (n - 1 + i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h;
}

} // namespace

double expE1_scaled(double z) {
    if (!(z > 0.0)) throw RuntimeError("expE1_scaled requires z > 0");
    if (z < 4.0) return std::exp(z) * expE1_series<double>(z, kEuler, std::log(z), 1e-18);
    return expEn_cf(1, z);
}

double expE2_scaled(double z) {
    if (!(z > 0.0)) throw RuntimeError("expE2_scaled requires z > 0");
    // recurrence E2 = e^-z - z E1, scaled by e^z
    if (z < 4.0) return 1.0 - z * expE1_scaled(z);
    return expEn_cf(2, z);
}

#if defined(KSLAB_HAVE_FLOAT128)

__float128 expE1_scaled_q(__float128 z) {
    const __float128 euler = 0.57721566490153286060651209008240243104Q;
    if (z < 6.0Q) return expq(z) * expE1_series<__float128>(z, euler, logq(z), 1e-36Q);
    return static_cast<__float128>(expEn_cf(1, static_cast<double>(z)));
}

__float128 expE2_scaled_q(__float128 z) {
    if (z < 6.0Q) return 1.0Q - z * expE1_scaled_q(z);
    return static_cast<__float128>(expEn_cf(2, static_cast<double>(z)));
}

#endif

} // namespace kslab
