#pragma once

#include "kslab/axisym.hpp"
#include "kslab/blocks.hpp"
#include "kslab/grid.hpp"
#include "kslab/special.hpp"

namespace kslab {

// Outer (Hermite-zone) eigenfunction data at one point. Omega_i is the
// algebraically decaying homogeneous mode, G the particular solution of
// (H - 2 beta (1-i)) G = Omega_i normalized to carry no homogeneous-mode
// admixture (its zeta -> 0 expansion is exactly -1/(4 zeta^2) + const +
// log terms). phi = Omega + 2 beta alpha_tilde G.
struct OuterPoint {
    double Omega = 0.0, dOmega = 0.0;
    double G = 0.0, dG = 0.0;
    double G_reg = 0.0; // G + 1/(4 zeta^2), assembled without cancellation
    double phi = 0.0, dphi = 0.0;
};

OuterPoint outer_point(int i, double zeta, double alpha_tilde, double beta);
double outer_eigenfunction(int i, double zeta, double alpha_tilde, double beta);

struct InnerCoeffs {
    double A = 0.0; // 1 - i + alpha_tilde
    double alpha_tilde = 0.0;
    double c2 = 0.0, c2t = 0.0, d4 = 0.0, d4t = 0.0, c4 = 0.0, c4t = 0.0;
};
InnerCoeffs inner_coeffs(int i, double nu, double beta);

// Inner (soliton-zone) approximate eigenfunction
//   phi_in = LamU + nu^2 (c2 V2 + c2t V2t)
//          + nu^4 (d4 V4sharp + d4t V4sharpt + c4 V4 + c4t V4t),
// with closed forms for its derivatives, partial mass and residual
//   R_i = L0 phi_in - beta nu^2 Lam phi_in - 2 beta nu^2 A phi_in = O(nu^6).
class InnerEigen {
  public:
    InnerEigen(int i, double nu, double beta, const BuildingBlockSet& blocks);

    double phi(double g) const;
    double dphi(double g) const;
    double d2phi(double g) const;
    double partial_mass(double g) const;
    double residual(double g) const;

    const InnerCoeffs& coeffs() const { return c_; }
    int index() const { return i_; }
    double nu() const { return nu_; }
    double beta() const { return beta_; }

  private:
    int i_;
    double nu_, beta_;
    InnerCoeffs c_;
    const BuildingBlockSet* blocks_;
};

RadialField inner_eigenfunction(int i, double nu, const BuildingBlockSet& blocks,
                                double beta = 0.5);

struct MatchReport {
    double zeta_m = 0.0; // matching spot: gap taken over [zeta_m/4, 4 zeta_m]
    double sup_gap = 0.0;
    double predicted_scale = 0.0; // 1/|log nu|
};

struct EigenPair {
    int i = 0;
    double nu = 0.0;
    double beta = 0.5;
    double eigenvalue = 0.0; // 2 beta (1 - i + alpha_tilde)
    RadialField phi;         // parabolic variable, support in {zeta <= 2|log nu|}
    RadialField residual;    // R_i = L^zeta_nu phi - eigenvalue phi
    MatchReport match;
    double partial_mass_residual = 0.0; // |int_{zeta<1} R zeta dzeta|
    double residual_norm_in = 0.0;      // weighted ||R||_in
};

// Glued eigenfunction phi = chi_m P + (1 - chi_m) chi_nu Q with
// P = -(1/(16 nu^4)) phi_in(zeta/nu) and Q the outer eigenfunction. The
// residual is assembled analytically: the pure inner region uses the exact
// scaling identity, the outer region the Hermite ODE relations, and the
// cutoff regions the first-order commutator terms, so no finite differencing
// of the glued profile enters.
// zeta_match is the matching spot for the gap report. It is kept separate
// from the gluing cutoff: the inner large-gamma expansion carries an O(nu^2)
// tail ~ 4 nu^2 / zeta^6, so the O(1/|log nu|) mismatch is only visible on
// windows with zeta >~ 1, while the glue cutoff may sit lower.
EigenPair glue_eigenfunction(int i, double nu, const CutoffConfig& cutoffs,
                             const BuildingBlockSet& blocks, double beta = 0.5,
                             double ppd = 128.0, double zeta_match = 4.0);

// Adapted inner product <f,g> = int h_f (h_g/U_nu - Psi_{h_g}) zeta dzeta
// with h = sqrt(rho_nu) chi_nu (.), evaluated through the symmetric
// log-kernel double integral so the discrete form is symmetric by
// construction. Reusable across many field pairs on a fixed grid.
class AdaptedForm {
  public:
    AdaptedForm(const RadialGrid& grid, double nu, const CutoffConfig& cutoffs,
                double beta = 0.5);
    double operator()(const RadialField& f, const RadialField& g) const;

  private:
    std::vector<double> pts_, wz_;   // gauss points and weights incl. zeta measure
    std::vector<double> half_;       // sqrt(rho) chi_nu at the points
    std::vector<double> inv_unu_;    // 1/U_nu at the points
};

double adapted_inner_product(const RadialField& f, const RadialField& g, double nu,
                             const CutoffConfig& cutoffs, double beta = 0.5);

// Inner bootstrap norm (int nu^2 eps^2 chi_nu^2 rho_nu / U_nu)^{1/2}.
double bootstrap_norm_in(const RadialField& eps, double nu, const CutoffConfig& cutoffs,
                         double beta = 0.5);
double bootstrap_norm_in(const AxisymField& eps, double nu, const CutoffConfig& cutoffs,
                         double beta = 0.5, double ring_center = 0.0);

} // namespace kslab
