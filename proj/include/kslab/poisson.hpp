#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "kslab/axisym.hpp"
#include "kslab/grid.hpp"

namespace kslab {

// Declared algebraic far-field decay f ~ A / x^q beyond the grid, with the
// amplitude pinned at the outer node. mass_zero marks sources whose partial
// mass converges to zero, enabling the potential tail correction.
struct DecaySpec {
    double q = 4.0;
    bool mass_zero = false;
};

// 2 pi int f gamma dgamma over the grid plus the declared-decay tail
// correction. Throws TailDivergence when the declared decay is q <= 2.
double total_mass(const RadialField& f, std::optional<DecaySpec> decay = {});

struct RadialPoisson {
    std::vector<double> partial_mass; // m(g) = int_0^g s S(s) ds at the nodes
    RadialField dpsi;                 // d/dg Psi, sign convention -Lap Psi = S
    RadialField psi;                  // potential, see normalization note below
    // Exact per-interval drops Psi(x_i) - Psi(x_{i+1}) = int m/s over the
    // interval, kept separately so callers can difference Psi without the
    // cancellation against its large constant part.
    std::vector<double> psi_segments;
    bool psi_normalized_at_edge = false;
};

// Sign convention: d/dg Psi(g) = -(1/g) int_0^g s S(s) ds. The potential is
// normalized to vanish at infinity when the source has zero total mass and a
// declared decay; otherwise it is pinned to zero at the outer grid edge.
RadialPoisson radial_poisson(const RadialField& S, std::optional<DecaySpec> decay = {});
RadialField radial_poisson_gradient(const RadialField& S);

// Same solver driven by an analytic integrand, used by oracle tests.
RadialPoisson radial_poisson_fn(const std::function<double(double)>& S, const RadialGrid& grid,
                                std::optional<DecaySpec> decay = {});

struct FourierModePoisson {
    int j = 1;
    RadialField psi;
    RadialField dpsi;
};

// Mode-j planar Poisson solution
//   Psi^j(g) = (g^j/2j) int_g^inf u y^{1-j} dy + (g^-j/2j) int_0^g u y^{1+j} dy.
// Throws ModeDivergence when the declared decay fails the outer quadrature test.
FourierModePoisson fourier_mode_poisson(int j, const RadialField& u, DecaySpec decay);

// Ring kernel of the 3D axisymmetric Poisson field and its gradient.
double ring_kernel_E3(double r, double z, double rt, double zt, double rel_tol = 1e-8);
std::array<double, 2> ring_kernel_grad_E3(double r, double z, double rt, double zt,
                                          double rel_tol = 1e-8);

// Gradient of the 3D Poisson field of an axisymmetric source, evaluated at the
// given (r, z) targets. Weakly singular self-cells are desingularized unless
// disabled, in which case coincident target/source throws SingularEvaluation.
std::vector<std::array<double, 2>> axisym_poisson_3d_gradient_at(
    const AxisymField& u, const std::vector<std::array<double, 2>>& targets,
    bool desingularize = true, double rel_tol = 1e-8);

// [OP] form: both gradient components on the source grid itself.
std::pair<AxisymField, AxisymField> axisym_poisson_3d_gradient(const AxisymField& u,
                                                               double ring_offset);

struct Diff2d3dReport {
    double sup_near_diff = 0.0; // sup over probe ball of |grad Psi_u - grad Phi_u|
    double sup_far_grad = 0.0;  // sup over the exterior shell of |grad Phi_u|
    double predicted_scale = 0.0;
    double L_inf = 0.0, L_2 = 0.0, L_2p = 0.0;
    double mu = 0.0, s = 0.0;
};

// 2D/3D Poisson-field difference diagnostic for a radial-in-zeta bump placed
// on a ring at distance ring_offset = R/mu from the axis.
Diff2d3dReport poisson_2d_3d_difference(const RadialField& u_zeta, double ring_offset,
                                        double probe_radius, double s = 0.9,
                                        double zeta_star_big = 20.0);

} // namespace kslab
