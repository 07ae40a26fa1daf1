#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kslab/axisym.hpp"
#include "kslab/grid.hpp"
#include "kslab/special.hpp"

namespace kslab {

enum class Geometry { radial2d, axisym3d };
enum class Stepper { imex_euler, imex_bdf2 };

struct SimConfig {
    Geometry geometry = Geometry::radial2d;
    double extent = 30.0; // radial extent; axisym3d: |r_bar| <= extent, 0 <= z <= extent
    int n = 512;          // cells per dimension
    Stepper stepper = Stepper::imex_euler;
    double cfl = 0.4;
    double amp_cap = 1.05; // max sup amplification per step, halve dt and retry above
    double dt_max = 0.05;
    double t_end = 1.0;
    double max_sup = 1e12;
    double min_lambda_cells = 10.0; // stop when lambda_fit < this many cells
    double ring_offset = 0.0;       // axisym3d: R/mu
    std::uint64_t max_steps = 2'000'000;
    int snapshot_count = 12; // geometric-in-amplification snapshot schedule

    void validate() const;
};

// Conservative finite-volume IMEX stepper for the 2D radial system
//   u_t = (1/r) d_r ( r (u_r - u Phi_r) ),   Phi_r(r) = -m(r)/r.
// Cell-centered uniform grid on [0, extent]; diffusion implicit (tridiagonal),
// advection explicit with upwind-biased MC-limited fluxes; no-flux walls.
class Radial2dSolver {
  public:
    Radial2dSolver(const SimConfig& cfg, const std::function<double(double)>& u0);

    double t() const { return t_; }
    double h() const { return h_; }
    double cell_center(std::size_t i) const { return (i + 0.5) * h_; }
    const std::vector<double>& u() const { return u_; }

    double mass() const;  // 2 pi int u r dr
    double sup() const;
    double min_u() const;
    double suggest_dt() const;

    // One raw step with the given dt (no cap control), used by consistency
    // probes; cap violations are not checked here.
    void step_with_dt(double dt);

    // One accepted step under the amplification cap; returns the dt used.
    double step();

    RadialField snapshot() const;

  private:
    void advective_rhs(const std::vector<double>& u, std::vector<double>& adv,
                       double& vmax) const;

    SimConfig cfg_;
    double h_, t_ = 0.0, dt_ = 0.0;
    std::vector<double> u_;
    // BDF2 history
    bool have_prev_ = false;
    double dt_prev_ = 0.0;
    std::vector<double> u_prev_, adv_prev_;
};

// Tensor-grid IMEX stepper for the 3D axisymmetric system in ring-translated
// coordinates r = ring_offset + r_bar:
//   u_t = (1/r) [ d_rb ( r (u_rb - u Phi_rb) ) + d_z ( r (u_z - u Phi_z) ) ],
// with the Poisson field -[d_rb^2 + (1/r) d_rb + d_z^2] Phi = u solved on the
// truncated domain, Dirichlet data on the outer walls from the ring kernel,
// even symmetry at z = 0. Diffusion implicit through a banded Cholesky solve.
class Axisym3dSolver {
  public:
    Axisym3dSolver(const SimConfig& cfg,
                   const std::function<double(double, double)>& u0);

    double t() const { return t_; }
    double hr() const { return hr_; }
    // absolute radius of the cell center; subtract ring_offset for r_bar
    double r_center(std::size_t i) const {
        return cfg_.ring_offset - cfg_.extent + (i + 0.5) * hr_;
    }
    double z_center(std::size_t j) const { return (j + 0.5) * hz_; }

    double mass() const; // 2 pi int u (ring_offset + r_bar) dr_bar dz over both z signs
    double sup() const;
    void step_with_dt(double dt);
    double suggest_dt();

    AxisymField field() const; // cell-centered samples, even-in-z tagged
    const std::vector<double>& phi() const { return phi_; }

  private:
    void solve_poisson();

    SimConfig cfg_;
    std::size_t nr_, nz_;
    double hr_, hz_, t_ = 0.0;
    std::vector<double> u_, phi_;
    std::vector<double> bc_right_, bc_left_, bc_top_; // Dirichlet face values
};

struct MassLedgerEntry {
    double t = 0.0, mass = 0.0, sup_u = 0.0, lambda_fit = 0.0, ring_radius = 0.0;
};

struct SimRun {
    SimConfig config;
    std::vector<std::pair<double, RadialField>> snapshots;
    std::vector<MassLedgerEntry> ledger;
    std::string stop_reason;
    std::uint64_t steps = 0;

    void save_ledger_csv(const std::string& path) const; // t,mass,sup_u,lambda_fit,ring_radius
};

SimRun run_radial2d(const SimConfig& cfg, const std::function<double(double)>& u0);

// lambda_fit = sqrt(8 / sup u), the scale of (1/lambda^2) U(./lambda) with the
// observed peak. Throws ConfigError on a zero peak.
double fit_scale(const RadialField& snap);
double fit_scale(const AxisymField& snap, double* ring_radius = nullptr);

struct ProfileDistance {
    double sup_local = 0.0; // sup_{gamma <= 10} |lambda^2 u(lambda gamma) - U|
    double e_norm = 0.0;    // H1(B(2)) + (1+gamma^2)^{3/4}-weighted Linf outside B(1)
};

ProfileDistance profile_distance(const RadialField& snap, double lambda,
                                 double center = 0.0);

// The four bootstrap remainder norms:
// ||eps||_in, ||grad eps*||_{L2(U_nu)}, ||eps||_{H2(zeta*/2<=zeta<=4 zeta*)},
// ||eps (1+zeta)^{3/2}||_{Linf(zeta>=zeta*)}; eps given about ring_center.
std::array<double, 4> evaluate_bootstrap_norms(const AxisymField& eps, double nu,
                                               const CutoffConfig& cutoffs,
                                               double beta = 0.5,
                                               double ring_center = 0.0);

} // namespace kslab
