#pragma once

#include <cmath>

namespace kslab {

// Stationary profile U(gamma) = 8/(1+gamma^2)^2 and closed-form relatives.
// Lambda f = 2f + y.grad f = div(y f); applied to U this gives
// LamU = 16(1-g^2)/(1+g^2)^3.
namespace profile {

inline double U(double g) {
    const double q = 1.0 + g * g;
    return 8.0 / (q * q);
}

inline double dU(double g) {
    const double q = 1.0 + g * g;
    return -32.0 * g / (q * q * q);
}

inline double d2U(double g) {
    const double g2 = g * g;
    const double q = 1.0 + g2;
    return 32.0 * (5.0 * g2 - 1.0) / (q * q * q * q);
}

inline double LamU(double g) {
    const double g2 = g * g;
    const double q = 1.0 + g2;
    return 16.0 * (1.0 - g2) / (q * q * q);
}

inline double dLamU(double g) {
    const double g2 = g * g;
    const double q = 1.0 + g2;
    return -64.0 * g * (2.0 - g2) / (q * q * q * q);
}

inline double d2LamU(double g) {
    const double g2 = g * g;
    const double q = 1.0 + g2;
    return -64.0 * (2.0 - 17.0 * g2 + 5.0 * g2 * g2) / (q * q * q * q * q);
}

inline double Lam2U(double g) {
    const double g2 = g * g;
    const double q = 1.0 + g2;
    return 32.0 * (1.0 - 4.0 * g2 + g2 * g2) / (q * q * q * q);
}

inline double dLam2U(double g) {
    // d/dg of Lam2U, used by analytic residual assembly.
    const double g2 = g * g;
    const double q = 1.0 + g2;
    const double p = 1.0 - 4.0 * g2 + g2 * g2;
    const double dp = -8.0 * g + 4.0 * g * g2;
    return 32.0 * (dp * q - 8.0 * g * p) / (q * q * q * q * q);
}

// Potential of U with -Lap Psi = U, normalized by Psi_U(0) = 0.
inline double PsiU(double g) { return -2.0 * std::log1p(g * g); }
inline double dPsiU(double g) { return -4.0 * g / (1.0 + g * g); }

// Partial mass m(g) = int_0^g s U ds = 4 g^2/(1+g^2).
inline double massU(double g) {
    const double g2 = g * g;
    return 4.0 * g2 / (1.0 + g2);
}

// Soliton family at scale nu in the parabolic variable.
inline double U_nu(double zeta, double nu) { return U(zeta / nu) / (nu * nu); }
inline double dU_nu(double zeta, double nu) { return dU(zeta / nu) / (nu * nu * nu); }
inline double dPsiU_nu(double zeta, double nu) {
    return -4.0 * zeta / (nu * nu + zeta * zeta);
}

} // namespace profile
} // namespace kslab
