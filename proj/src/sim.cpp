#include "kslab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <boost/math/special_functions/ellint_1.hpp>

#include "kslab/banded.hpp"
#include "kslab/eigen.hpp"
#include "kslab/errors.hpp"
#include "kslab/profile.hpp"

namespace kslab {

void SimConfig::validate() const {
    if (!(extent > 0.0)) throw ConfigError("sim extent must be positive");
    if (n < 8) throw ConfigError("sim needs at least 8 cells");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    if (!(amp_cap > 1.0)) throw ConfigError("amp_cap must exceed 1");
    if (!(dt_max > 0.0)) throw ConfigError("dt_max must be positive");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (geometry == Geometry::axisym3d && !(ring_offset > extent))
        throw ConfigError("axisym3d needs ring_offset > extent to keep r positive");
}

namespace {

// MC-limited slope from the three cell averages around the middle one.
inline double mc_slope(double um, double u0, double up, double h) {
    const double a = (u0 - um) / h;
    const double b = (up - u0) / h;
    if (a * b <= 0.0) return 0.0;
    const double c = 0.5 * (a + b);
    const double m = std::min({std::abs(c), 2.0 * std::abs(a), 2.0 * std::abs(b)});
    return a > 0.0 ? m : -m;
}

} // namespace

Radial2dSolver::Radial2dSolver(const SimConfig& cfg, const std::function<double(double)>& u0)
    : cfg_(cfg) {
    cfg_.validate();
    h_ = cfg_.extent / cfg_.n;
    u_.resize(static_cast<std::size_t>(cfg_.n));
    for (std::size_t i = 0; i < u_.size(); ++i) u_[i] = u0(cell_center(i));
    for (double v : u_)
        if (!std::isfinite(v)) throw ConfigError("initial data not finite");
}

double Radial2dSolver::mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < u_.size(); ++i) s += cell_center(i) * u_[i];
    return 2.0 * M_PI * s * h_;
}

double Radial2dSolver::sup() const {
    return *std::max_element(u_.begin(), u_.end());
}

double Radial2dSolver::min_u() const {
    return *std::min_element(u_.begin(), u_.end());
}

// Face velocities v = Phi_r = -m/r and the limited upwind advective update
// adv_i = -(1/(r_i h)) [ r v u~ ]_i^{i+1}; wall faces carry no flux.
void Radial2dSolver::advective_rhs(const std::vector<double>& u, std::vector<double>& adv,
                                   double& vmax) const {
    const std::size_t n = u.size();
    std::vector<double> flux(n + 1, 0.0); // r v u~ at faces
    double m = 0.0;
    vmax = 0.0;
    for (std::size_t f = 1; f < n; ++f) {
        m += cell_center(f - 1) * u[f - 1] * h_;
        const double rf = f * h_;
        const double v = -m / rf;
        vmax = std::max(vmax, std::abs(v));
        // upwind cell: f-1 when v > 0, f when v < 0 (the aggregation direction)
        std::size_t c;
        double sgn;
        if (v > 0.0) {
            c = f - 1;
            sgn = 1.0;
        } else {
            c = f;
            sgn = -1.0;
        }
        const double um = c == 0 ? u[0] : u[c - 1]; // even reflection at the axis
        const double up = c + 1 < n ? u[c + 1] : u[c];
        const double ut = u[c] + sgn * 0.5 * h_ * mc_slope(um, u[c], up, h_);
        flux[f] = rf * v * ut;
    }
    adv.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        adv[i] = -(flux[i + 1] - flux[i]) / (cell_center(i) * h_);
}

double Radial2dSolver::suggest_dt() const {
    std::vector<double> adv;
    double vmax = 0.0;
    advective_rhs(u_, adv, vmax);
    double dt = cfg_.dt_max;
    if (vmax > 0.0) dt = std::min(dt, cfg_.cfl * h_ / vmax);
    return dt;
}

void Radial2dSolver::step_with_dt(double dt) {
    if (!(dt > 0.0)) throw ConfigError("step_with_dt needs dt > 0");
    const std::size_t n = u_.size();
    std::vector<double> adv;
    double vmax = 0.0;
    advective_rhs(u_, adv, vmax);

    const bool bdf2 = cfg_.stepper == Stepper::imex_bdf2 && have_prev_;
    const double rho = bdf2 ? dt / dt_prev_ : 0.0;
    const double a0 = bdf2 ? (1.0 + 2.0 * rho) / (1.0 + rho) : 1.0;

    // (a0 I - dt D) u^{n+1} = rhs, D in conservative flux form so the
    // r-weighted row sums telescope and mass is conserved exactly.
    std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double ri = cell_center(i);
        const double cl = i == 0 ? 0.0 : dt * (i * h_) / (ri * h_ * h_);
        const double cr = i + 1 == n ? 0.0 : dt * ((i + 1) * h_) / (ri * h_ * h_);
        lo[i] = -cl;
        up[i] = -cr;
        di[i] = a0 + cl + cr;
        if (bdf2) {
            rhs[i] = (1.0 + rho) * u_[i] - rho * rho / (1.0 + rho) * u_prev_[i] +
                     dt * ((1.0 + rho) * adv[i] - rho * adv_prev_[i]);
        } else {
            rhs[i] = u_[i] + dt * adv[i];
        }
    }
    solve_tridiag(lo, di, up, rhs);

    u_prev_ = u_;
    adv_prev_ = adv;
    dt_prev_ = dt;
    have_prev_ = true;
    u_ = std::move(rhs);
    t_ += dt;
    for (double v : u_)
        if (!std::isfinite(v)) throw RuntimeError("radial2d state not finite");
}

double Radial2dSolver::step() {
    double dt = suggest_dt();
    if (cfg_.t_end > t_) dt = std::min(dt, cfg_.t_end - t_);
    const double s0 = sup();
    for (;;) {
        const auto u_save = u_;
        const auto up_save = u_prev_;
        const auto ap_save = adv_prev_;
        const double dp_save = dt_prev_, t_save = t_;
        const bool hp_save = have_prev_;
        step_with_dt(dt);
        if (s0 <= 0.0 || sup() <= cfg_.amp_cap * s0) break;
        u_ = u_save;
        u_prev_ = up_save;
        adv_prev_ = ap_save;
        dt_prev_ = dp_save;
        t_ = t_save;
        have_prev_ = hp_save;
        dt *= 0.5;
        if (dt < 1e-14) throw TimestepUnderflow("radial2d dt underflow under amp cap");
    }
    return dt_prev_;
}

RadialField Radial2dSolver::snapshot() const {
    RadialGrid g;
    g.tag = Variable::parabolic;
    g.nodes.resize(u_.size());
    for (std::size_t i = 0; i < u_.size(); ++i) g.nodes[i] = cell_center(i);
    return RadialField(std::move(g), u_);
}

void SimRun::save_ledger_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw OutputUnwritable("cannot open " + path);
    out << "t,mass,sup_u,lambda_fit,ring_radius\n";
    char buf[192];
    for (const auto& e : ledger) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", e.t, e.mass,
                      e.sup_u, e.lambda_fit, e.ring_radius);
        out << buf;
    }
}

SimRun run_radial2d(const SimConfig& cfg, const std::function<double(double)>& u0) {
    if (cfg.geometry != Geometry::radial2d)
        throw ConfigError("run_radial2d needs radial2d geometry");
    Radial2dSolver s(cfg, u0);
    SimRun run;
    run.config = cfg;

    auto lam = [&]() { return s.sup() > 0.0 ? std::sqrt(8.0 / s.sup()) : 0.0; };
    auto record = [&]() { run.ledger.push_back({s.t(), s.mass(), s.sup(), lam(), 0.0}); };

    record();
    run.snapshots.emplace_back(s.t(), s.snapshot());
    double snap_sup = s.sup();
    const double snap_factor = 1.5; // geometric-in-amplification schedule
    const double snap_dt = cfg.t_end / std::max(1, cfg.snapshot_count);
    double next_snap_t = snap_dt;

    for (;;) {
        if (s.t() >= cfg.t_end) {
            run.stop_reason = "t_end";
            break;
        }
        if (s.sup() >= cfg.max_sup) {
            run.stop_reason = "max_sup";
            break;
        }
        const double lf = lam();
        if (lf > 0.0 && lf < cfg.min_lambda_cells * s.h()) {
            run.stop_reason = "resolution";
            break;
        }
        if (run.steps >= cfg.max_steps) {
            run.stop_reason = "max_steps";
            break;
        }
        s.step();
        ++run.steps;
        record();
        if (s.sup() >= snap_factor * snap_sup || s.t() >= next_snap_t) {
            run.snapshots.emplace_back(s.t(), s.snapshot());
            snap_sup = s.sup();
            while (next_snap_t <= s.t()) next_snap_t += snap_dt;
        }
    }
    if (run.snapshots.back().first != s.t()) run.snapshots.emplace_back(s.t(), s.snapshot());
    return run;
}

double fit_scale(const RadialField& snap) {
    const double m = *std::max_element(snap.values.begin(), snap.values.end());
    if (!(m > 0.0)) throw ConfigError("fit_scale needs a positive peak");
    return std::sqrt(8.0 / m);
}

double fit_scale(const AxisymField& snap, double* ring_radius) {
    const auto it = std::max_element(snap.values.begin(), snap.values.end());
    if (!(*it > 0.0)) throw ConfigError("fit_scale needs a positive peak");
    if (ring_radius) {
        const std::size_t k = static_cast<std::size_t>(it - snap.values.begin());
        *ring_radius = snap.r_nodes[k / snap.nz()];
    }
    return std::sqrt(8.0 / *it);
}

ProfileDistance profile_distance(const RadialField& snap, double lambda, double center) {
    if (!(lambda > 0.0)) throw ConfigError("profile_distance needs lambda > 0");
    if (center + 10.0 * lambda > snap.grid.back())
        throw InterpolationOutOfDomain("snapshot does not cover gamma <= 10");
    ProfileDistance res;
    const int n = 4000;
    double h1 = 0.0;
    double wsup = 0.0;
    double prev_g = 0.0, prev_f = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double g = 10.0 * k / n;
        const double x = std::max(center + lambda * g, snap.grid.front());
        const double d = lambda * lambda * snap(x) - profile::U(g);
        res.sup_local = std::max(res.sup_local, std::abs(d));
        if (g <= 2.0) {
            const double dp =
                lambda * lambda * lambda * snap.deriv(x) - profile::dU(g);
            const double f = (d * d + dp * dp) * 2.0 * M_PI * g;
            if (k > 0) h1 += 0.5 * (prev_f + f) * (g - prev_g);
            prev_g = g;
            prev_f = f;
        }
        if (g >= 1.0)
            wsup = std::max(wsup, std::abs(d) * std::pow(1.0 + g * g, 0.75));
    }
    res.e_norm = std::sqrt(h1) + wsup;
    return res;
}

// ---------------------------------------------------------------------------
// axisym3d

namespace {

// potential of a unit-mass ring at (rt, zt), evaluated at (r, z):
//   (1/4pi) int dtheta / sqrt(r^2 + rt^2 - 2 r rt cos theta + (z-zt)^2)
//   = K(k) / (pi sqrt((r+rt)^2 + (z-zt)^2)),  k^2 = 4 r rt / ((r+rt)^2+(z-zt)^2)
double ring_pot(double r, double z, double rt, double zt) {
    const double dz = z - zt;
    const double den2 = (r + rt) * (r + rt) + dz * dz;
    const double k2 = 4.0 * r * rt / den2;
    return boost::math::ellint_1(std::sqrt(k2)) / (M_PI * std::sqrt(den2));
}

} // namespace

Axisym3dSolver::Axisym3dSolver(const SimConfig& cfg,
                               const std::function<double(double, double)>& u0)
    : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.geometry != Geometry::axisym3d)
        throw ConfigError("Axisym3dSolver needs axisym3d geometry");
    nr_ = static_cast<std::size_t>(cfg_.n);
    nz_ = static_cast<std::size_t>(std::max(4, cfg_.n / 2));
    hr_ = 2.0 * cfg_.extent / nr_;
    hz_ = cfg_.extent / nz_;
    u_.resize(nr_ * nz_);
    for (std::size_t i = 0; i < nr_; ++i)
        for (std::size_t j = 0; j < nz_; ++j) {
            const double v = u0(r_center(i) - cfg_.ring_offset, z_center(j));
            if (!std::isfinite(v)) throw ConfigError("initial data not finite");
            u_[i * nz_ + j] = v;
        }
    phi_.assign(nr_ * nz_, 0.0);
    bc_left_.assign(nz_, 0.0);
    bc_right_.assign(nz_, 0.0);
    bc_top_.assign(nr_, 0.0);
}

double Axisym3dSolver::mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < nr_; ++i) {
        double col = 0.0;
        for (std::size_t j = 0; j < nz_; ++j) col += u_[i * nz_ + j];
        s += col * r_center(i);
    }
    return 4.0 * M_PI * s * hr_ * hz_; // 2 pi ring measure, doubled for z < 0
}

double Axisym3dSolver::sup() const {
    return *std::max_element(u_.begin(), u_.end());
}

// -div(r grad Phi) = r u with Dirichlet outer walls from the ring kernel of
// the full-space field and even symmetry across z = 0.
void Axisym3dSolver::solve_poisson() {
    const double r0 = cfg_.ring_offset - cfg_.extent; // left wall radius
    // aggregate the source into blocks for the boundary sums
    const std::size_t B = 8;
    struct Blk {
        double m, rc, zc;
    };
    std::vector<Blk> blks;
    for (std::size_t ib = 0; ib < nr_; ib += B)
        for (std::size_t jb = 0; jb < nz_; jb += B) {
            double m = 0.0, rc = 0.0, zc = 0.0;
            for (std::size_t i = ib; i < std::min(ib + B, nr_); ++i)
                for (std::size_t j = jb; j < std::min(jb + B, nz_); ++j) {
                    const double w = u_[i * nz_ + j] * r_center(i);
                    m += w;
                    rc += w * r_center(i);
                    zc += w * z_center(j);
                }
            if (m != 0.0) blks.push_back({m * hr_ * hz_, rc / m, zc / m});
        }
    auto wall_phi = [&](double r, double z) {
        double p = 0.0;
        for (const auto& b : blks)
            p += b.m * (ring_pot(r, z, b.rc, b.zc) + ring_pot(r, z, b.rc, -b.zc));
        return p;
    };
    for (std::size_t j = 0; j < nz_; ++j) {
        bc_left_[j] = wall_phi(r0, z_center(j));
        bc_right_[j] = wall_phi(r0 + 2.0 * cfg_.extent, z_center(j));
    }
    for (std::size_t i = 0; i < nr_; ++i) bc_top_[i] = wall_phi(r_center(i), cfg_.extent);

    BandedSPD A(nr_ * nz_, nz_);
    std::vector<double> rhs(nr_ * nz_);
    for (std::size_t i = 0; i < nr_; ++i) {
        const double ri = r_center(i);
        for (std::size_t j = 0; j < nz_; ++j) {
            const std::size_t k = i * nz_ + j;
            double d = 0.0;
            double b = ri * u_[k] * hr_ * hz_;
            // r faces
            if (i + 1 < nr_) {
                const double c = (ri + 0.5 * hr_) * hz_ / hr_;
                d += c;
                A.add(k, k + nz_, -c);
            } else {
                const double c = 2.0 * (ri + 0.5 * hr_) * hz_ / hr_;
                d += c;
                b += c * bc_right_[j];
            }
            if (i > 0) {
                const double c = (ri - 0.5 * hr_) * hz_ / hr_;
                d += c;
            } else {
                const double c = 2.0 * (ri - 0.5 * hr_) * hz_ / hr_;
                d += c;
                b += c * bc_left_[j];
            }
            // z faces; j = 0 lower face is the symmetry plane (no flux)
            if (j + 1 < nz_) {
                const double c = ri * hr_ / hz_;
                d += c;
                A.add(k, k + 1, -c);
            } else {
                const double c = 2.0 * ri * hr_ / hz_;
                d += c;
                b += c * bc_top_[i];
            }
            if (j > 0) d += ri * hr_ / hz_;
            A.add(k, k, d);
            rhs[k] = b;
        }
    }
    A.factor();
    A.solve(rhs);
    phi_ = std::move(rhs);
}

double Axisym3dSolver::suggest_dt() {
    solve_poisson();
    double vmax = 0.0;
    for (std::size_t i = 0; i + 1 < nr_; ++i)
        for (std::size_t j = 0; j < nz_; ++j)
            vmax = std::max(vmax,
                            std::abs(phi_[(i + 1) * nz_ + j] - phi_[i * nz_ + j]) / hr_);
    for (std::size_t i = 0; i < nr_; ++i)
        for (std::size_t j = 0; j + 1 < nz_; ++j)
            vmax = std::max(vmax, std::abs(phi_[i * nz_ + j + 1] - phi_[i * nz_ + j]) / hz_);
    double dt = cfg_.dt_max;
    if (vmax > 0.0) dt = std::min(dt, cfg_.cfl * std::min(hr_, hz_) / vmax);
    return dt;
}

void Axisym3dSolver::step_with_dt(double dt) {
    if (!(dt > 0.0)) throw ConfigError("step_with_dt needs dt > 0");
    solve_poisson();

    // explicit advection, limited upwind along each direction; wall and
    // symmetry faces carry no flux
    std::vector<double> adv(nr_ * nz_, 0.0);
    for (std::size_t j = 0; j < nz_; ++j) {
        for (std::size_t f = 1; f < nr_; ++f) {
            const double rf = r_center(f) - 0.5 * hr_;
            const double v = (phi_[f * nz_ + j] - phi_[(f - 1) * nz_ + j]) / hr_;
            const std::size_t c = v > 0.0 ? f - 1 : f;
            const double sgn = v > 0.0 ? 1.0 : -1.0;
            const double um = c == 0 ? u_[j] : u_[(c - 1) * nz_ + j];
            const double up = c + 1 < nr_ ? u_[(c + 1) * nz_ + j] : u_[c * nz_ + j];
            const double ut =
                u_[c * nz_ + j] + sgn * 0.5 * hr_ * mc_slope(um, u_[c * nz_ + j], up, hr_);
            const double flux = rf * v * ut * hz_;
            adv[(f - 1) * nz_ + j] -= flux;
            adv[f * nz_ + j] += flux;
        }
    }
    for (std::size_t i = 0; i < nr_; ++i) {
        const double ri = r_center(i);
        for (std::size_t f = 1; f < nz_; ++f) {
            const double v = (phi_[i * nz_ + f] - phi_[i * nz_ + f - 1]) / hz_;
            const std::size_t c = v > 0.0 ? f - 1 : f;
            const double sgn = v > 0.0 ? 1.0 : -1.0;
            // even reflection across z = 0 for the axis-side neighbour
            const double um = c == 0 ? u_[i * nz_] : u_[i * nz_ + c - 1];
            const double up = c + 1 < nz_ ? u_[i * nz_ + c + 1] : u_[i * nz_ + c];
            const double ut =
                u_[i * nz_ + c] + sgn * 0.5 * hz_ * mc_slope(um, u_[i * nz_ + c], up, hz_);
            const double flux = ri * v * ut * hr_;
            adv[i * nz_ + f - 1] -= flux;
            adv[i * nz_ + f] += flux;
        }
    }

    // implicit diffusion: (M + dt A) u^{n+1} = M u^n + dt adv, all outer
    // faces no-flux, M = diag(r hr hz)
    BandedSPD A(nr_ * nz_, nz_);
    std::vector<double> rhs(nr_ * nz_);
    for (std::size_t i = 0; i < nr_; ++i) {
        const double ri = r_center(i);
        for (std::size_t j = 0; j < nz_; ++j) {
            const std::size_t k = i * nz_ + j;
            const double vol = ri * hr_ * hz_;
            double d = vol;
            if (i + 1 < nr_) {
                const double c = dt * (ri + 0.5 * hr_) * hz_ / hr_;
                d += c;
                A.add(k, k + nz_, -c);
            }
            if (i > 0) d += dt * (ri - 0.5 * hr_) * hz_ / hr_;
            if (j + 1 < nz_) {
                const double c = dt * ri * hr_ / hz_;
                d += c;
                A.add(k, k + 1, -c);
            }
            if (j > 0) d += dt * ri * hr_ / hz_;
            A.add(k, k, d);
            rhs[k] = vol * u_[k] + dt * adv[k];
        }
    }
    A.factor();
    A.solve(rhs);
    u_ = std::move(rhs);
    t_ += dt;
    for (double v : u_)
        if (!std::isfinite(v)) throw RuntimeError("axisym3d state not finite");
}

AxisymField Axisym3dSolver::field() const {
    AxisymField f;
    f.r_nodes.resize(nr_);
    f.z_nodes.resize(nz_);
    for (std::size_t i = 0; i < nr_; ++i) f.r_nodes[i] = r_center(i);
    for (std::size_t j = 0; j < nz_; ++j) f.z_nodes[j] = z_center(j);
    f.values = u_;
    f.even_in_z = true;
    return f;
}

// ---------------------------------------------------------------------------
// bootstrap remainder norms on a tensor grid

namespace {

// 4th-order first derivative along a uniformly spaced line of samples
double d1_line(const std::function<double(std::ptrdiff_t)>& f, std::ptrdiff_t i,
               std::ptrdiff_t n, double h) {
    if (i >= 2 && i + 2 < n)
        return (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
    if (i + 4 < n && i < 2)
        return (-25.0 * f(i) + 48.0 * f(i + 1) - 36.0 * f(i + 2) + 16.0 * f(i + 3) -
                3.0 * f(i + 4)) /
               (12.0 * h);
    if (i >= 4)
        return (25.0 * f(i) - 48.0 * f(i - 1) + 36.0 * f(i - 2) - 16.0 * f(i - 3) +
                3.0 * f(i - 4)) /
               (12.0 * h);
    if (i + 1 < n && i >= 1) return (f(i + 1) - f(i - 1)) / (2.0 * h);
    return i + 1 < n ? (f(i + 1) - f(i)) / h : (f(i) - f(i - 1)) / h;
}

double d2_line(const std::function<double(std::ptrdiff_t)>& f, std::ptrdiff_t i,
               std::ptrdiff_t n, double h) {
    if (i >= 2 && i + 2 < n)
        return (-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) - f(i + 2)) /
               (12.0 * h * h);
    if (i >= 1 && i + 1 < n) return (f(i - 1) - 2.0 * f(i) + f(i + 1)) / (h * h);
    if (i == 0 && n > 2) return (f(0) - 2.0 * f(1) + f(2)) / (h * h);
    return (f(n - 1) - 2.0 * f(n - 2) + f(n - 3)) / (h * h);
}

} // namespace

std::array<double, 4> evaluate_bootstrap_norms(const AxisymField& eps, double nu,
                                               const CutoffConfig& cutoffs, double beta,
                                               double ring_center) {
    const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(eps.nr());
    const std::ptrdiff_t nz = static_cast<std::ptrdiff_t>(eps.nz());
    if (nr < 5 || nz < 5) throw ConfigError("bootstrap norms need at least a 5x5 grid");
    const double hr = eps.r_nodes[1] - eps.r_nodes[0];
    const double hz = eps.z_nodes[1] - eps.z_nodes[0];
    for (std::ptrdiff_t i = 1; i + 1 < nr; ++i)
        if (std::abs(eps.r_nodes[i + 1] - eps.r_nodes[i] - hr) > 1e-9 * hr)
            throw ConfigError("bootstrap norms need a uniform grid");
    const double zs = cutoffs.zeta_star_big;
    const double mirror = eps.even_in_z && eps.z_nodes.front() >= 0.0 ? 2.0 : 1.0;

    std::array<double, 4> out{};
    out[0] = bootstrap_norm_in(eps, nu, cutoffs, beta, ring_center);

    auto zeta_at = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
        return std::hypot(eps.r_nodes[i] - ring_center, eps.z_nodes[j]);
    };
    // cut field eps* = eps chi_star_big(zeta); the product is differenced as a
    // whole, its support zeta <= 2 zeta* keeps the stencils inside the grid
    std::vector<double> star(static_cast<std::size_t>(nr * nz));
    for (std::ptrdiff_t i = 0; i < nr; ++i)
        for (std::ptrdiff_t j = 0; j < nz; ++j)
            star[i * nz + j] = eps.at(i, j) * cutoffs.chi_star_big(zeta_at(i, j));

    double grad2 = 0.0, h2 = 0.0;
    double wsup = 0.0;
    for (std::ptrdiff_t i = 0; i < nr; ++i) {
        for (std::ptrdiff_t j = 0; j < nz; ++j) {
            const double zt = zeta_at(i, j);
            auto row = [&](std::ptrdiff_t ii) { return star[ii * nz + j]; };
            auto col = [&](std::ptrdiff_t jj) { return star[i * nz + jj]; };
            if (zt <= 2.0 * zs + 2.0 * std::max(hr, hz)) {
                const double gr = d1_line(row, i, nr, hr);
                const double gz = d1_line(col, j, nz, hz);
                grad2 += (gr * gr + gz * gz) * profile::U_nu(zt, nu) * hr * hz;
            }
            // sub-cell coverage weight sharpens the annulus boundary to O(h^2)
            const double hm = std::max(hr, hz);
            const double cov =
                std::clamp(0.5 + (zt - 0.5 * zs) / hm, 0.0, 1.0) *
                std::clamp(0.5 + (4.0 * zs - zt) / hm, 0.0, 1.0);
            if (cov > 0.0) {
                auto rowe = [&](std::ptrdiff_t ii) { return eps.at(ii, j); };
                auto cole = [&](std::ptrdiff_t jj) { return eps.at(i, jj); };
                const double v = eps.at(i, j);
                const double gr = d1_line(rowe, i, nr, hr);
                const double gz = d1_line(cole, j, nz, hz);
                const double grr = d2_line(rowe, i, nr, hr);
                const double gzz = d2_line(cole, j, nz, hz);
                // mixed derivative from the cross stencil of first derivatives
                auto cross = [&](std::ptrdiff_t jj) {
                    auto rw = [&](std::ptrdiff_t ii) { return eps.at(ii, jj); };
                    return d1_line(rw, i, nr, hr);
                };
                const double grz = d1_line(cross, j, nz, hz);
                h2 += cov *
                      (v * v + gr * gr + gz * gz + grr * grr + 2.0 * grz * grz +
                       gzz * gzz) *
                      hr * hz;
            }
            if (zt >= zs)
                wsup = std::max(wsup,
                                std::abs(eps.at(i, j)) * std::pow(1.0 + zt, 1.5));
        }
    }
    // for decaying eps the weighted sup is often attained on zeta = zeta*
    // itself; sample that circle through the interpolant as well
    for (int k = 0; k < 2048; ++k) {
        const double th = M_PI * (k + 0.5) / 2048.0;
        const double r = ring_center + zs * std::cos(th);
        const double z = std::abs(zs * std::sin(th));
        if (r < eps.r_nodes.front() || r > eps.r_nodes.back() || z < eps.z_nodes.front() ||
            z > eps.z_nodes.back())
            continue;
        wsup = std::max(wsup, std::abs(eps.eval(r, z)) * std::pow(1.0 + zs, 1.5));
    }
    out[1] = std::sqrt(mirror * grad2);
    out[2] = std::sqrt(mirror * h2);
    out[3] = wsup;
    return out;
}

} // namespace kslab
