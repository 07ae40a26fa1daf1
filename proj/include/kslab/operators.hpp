#pragma once

#include <optional>

#include "kslab/grid.hpp"
#include "kslab/poisson.hpp"

namespace kslab {

enum class LVariant { L0_soliton, L_zeta_parabolic };

// M f = f/U - Psi_f (soliton grid) or f/U_nu - Psi_f (parabolic grid).
RadialField apply_M(const RadialField& f, double nu, std::optional<DecaySpec> decay = {});

// L0 f = div(U grad M f);  L^zeta_nu f = div(U_nu grad M f) - beta Lam f.
// Centered second-order stencils in the log coordinate of the graded grid.
RadialField apply_L(const RadialField& f, double nu, double beta, LVariant variant,
                    std::optional<DecaySpec> decay = {});

// Angular-mode versions for f = h(gamma) cos(j theta), j >= 1. The Poisson
// field is the mode-j planar solution and the divergence picks up the extra
// -U j^2 (M h)/gamma^2 centrifugal term.
RadialField apply_M_mode(const RadialField& h, int j, double nu, DecaySpec decay);
RadialField apply_L_mode(const RadialField& h, int j, double nu, double beta,
                         LVariant variant, DecaySpec decay);

// M on an axisymmetric (r,z) slice: f/U_nu - Psi_f with the 2D free-space
// Poisson field obtained by cosine-mode decomposition about (ring_center, 0).
AxisymField apply_M(const AxisymField& f, double nu, double ring_center,
                    int n_modes = 8, double ppd = 128.0);

// Lam f = 2f + y f', one-sided stencils at the boundary nodes.
RadialField lambda_op(const RadialField& f);

// First derivative on the grid (3-point nonuniform stencils in log coordinate).
std::vector<double> grid_deriv(const RadialGrid& grid, const std::vector<double>& v);

} // namespace kslab
