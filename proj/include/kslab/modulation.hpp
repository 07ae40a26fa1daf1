#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kslab {

struct ModulationState {
    double tau = 0.0;
    double nu = 0.0;    // in (0,1)
    double a = 0.0;
    double drift = 0.0; // R_tau / mu

    double log2nu() const;
    double atilde() const { return a - 8.0 * nu * nu; }
};

struct BootstrapParams {
    double M0 = 100.0;
    std::array<double, 7> K{1.5, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0}; // K1..K7
    double beta = 0.5;
    double zeta_star_big = 20.0;
};

struct Trajectory {
    std::vector<ModulationState> states;
    // optional norm traces, one entry per state when present:
    // ||eps||_in, ||grad eps*||_{L2(U_nu)}, H2 middle, weighted L-inf far
    std::vector<std::array<double, 4>> norms;

    void save_csv(const std::string& path) const; // tau,nu,a,drift,log2nu,atilde
};

// mod0 = a_tau - 2 a beta (1 + 1/(2 log nu)) - 16 nu^2 (nu_tau/nu - beta)
// mod1 = -a_tau + a beta / log nu
std::pair<double, double> modulation_residuals(const ModulationState& s, double a_tau,
                                               double nu_tau, double beta = 0.5);

struct ReducedLawResult {
    Trajectory exact;   // nu = exp(-sqrt(beta tau + M0)), a = 8 nu^2
    Trajectory numeric; // adaptive integration of nu_tau = nu beta/(2 log nu)
    // Literal two-by-two branch: mod0 = mod1 = 0 solved for (a_tau, nu_tau)
    // each step. The a-direction of that system is linearly unstable (rate
    // 2 beta), so this branch tracks the closed form only over moderate
    // horizons; it is attached for cross-validation, not for the law itself.
    Trajectory full;
};

ReducedLawResult integrate_reduced_law(double M0, double beta, double tau_end,
                                       double dtau_out = 0.25);

// Blowup-scale converter: tau = log(T/(T-t)), lambda = sqrt(T-t) e^{-sqrt(beta tau + M0)}.
double blowup_scale(double t, double T, double M0, double beta = 0.5);

struct ShootResult {
    double a0 = 0.0;
    int iterations = 0;
    std::vector<std::array<double, 2>> bracket_history;
    std::array<int, 2> exit_signs{0, 0}; // exit sign of the low / high endpoint
    Trajectory trapped;                  // atilde stored in the a slot
    void save_json(const std::string& path) const;
};

// Unstable-direction shooting: integrate atilde_tau = 2 beta atilde + f(tau)
// inside the band |atilde| <= band(tau); bisect the initial value between the
// band endpoints until a trajectory stays inside through the horizon.
ShootResult shoot_trapped_a(const std::function<double(double)>& forcing, double beta,
                            const std::function<double(double)>& band,
                            std::optional<double> horizon = {});

// Convenience band K2 nu^2/|log nu| on the reduced law.
std::function<double(double)> reduced_band(double K2, double M0, double beta = 0.5);

struct BootstrapReport {
    // first violation time per inequality family, unset means PASS
    std::array<std::optional<double>, 7> first_violation;
    bool pass() const;
};

BootstrapReport bootstrap_check(const Trajectory& traj, const BootstrapParams& p);

} // namespace kslab
