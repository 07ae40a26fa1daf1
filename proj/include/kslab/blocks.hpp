#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/profile.hpp"

namespace kslab {

// One inversion of L0, stored in the ratio variable W = V/U together with its
// first two derivatives and the partial mass m_V = int_0^g s V ds. The regular
// branch W(0) = m_V(0) = 0 is selected, which excludes the kernel mode LamU
// (whose ratio tends to 2 at the origin) and makes V vanish like g^2.
struct Block {
    std::string name;
    RadialGrid grid;
    std::vector<double> W, dW, d2W, mV;
    // Interpolants are parameterized by log(gamma) for conditioning on the
    // geometric grid; the stored samples remain gamma-derivatives.
    Pchip Wi, dWi, d2Wi, mVi;

    double Wv(double g) const { return Wi(std::log(g)); }
    double dWv(double g) const { return dWi(std::log(g)); }
    double d2Wv(double g) const { return d2Wi(std::log(g)); }
    double V(double g) const { return profile::U(g) * Wv(g); }
    double dV(double g) const { return profile::dU(g) * Wv(g) + profile::U(g) * dWv(g); }
    double d2V(double g) const {
        return profile::d2U(g) * Wv(g) + 2.0 * profile::dU(g) * dWv(g) +
               profile::U(g) * d2Wv(g);
    }
    double m(double g) const { return mVi(std::log(g)); }

    RadialField field() const;
    void finalize(); // build the interpolants after the arrays are filled
};

// The six chained inversions:
//   L0 V2 = LamU, L0 V2t = Lam2U, L0 V4sharp = Lam V2, L0 V4sharpt = Lam V2t,
//   L0 V4 = V2, L0 V4t = V2t.
struct BuildingBlockSet {
    RadialGrid grid;
    Block V2, V2t, V4sharp, V4sharpt, V4, V4t;

    static BuildingBlockSet build(const RadialGrid& grid);
    static RadialGrid default_grid(double ppd = 64.0);
};

enum class FarClass { power, power_log };

// General inversion of L0 for a sampled radial source via the partial-mass
// reduction. The computed far field is compared against the declared class
// over the outer decade; a >20% mismatch throws AsymptoticMismatch.
RadialField invert_L0_radial(const RadialField& S, FarClass far_class, double far_power);

} // namespace kslab
