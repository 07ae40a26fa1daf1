#include "kslab/modulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <boost/numeric/odeint.hpp>

#include "kslab/errors.hpp"

namespace kslab {

namespace ode = boost::numeric::odeint;

double ModulationState::log2nu() const {
    const double l = std::log(nu);
    return l * l;
}

void Trajectory::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw OutputUnwritable("cannot open " + path);
    out << "tau,nu,a,drift,log2nu,atilde\n";
    char buf[256];
    for (const auto& s : states) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.tau,
                      s.nu, s.a, s.drift, s.log2nu(), s.atilde());
        out << buf;
    }
}

std::pair<double, double> modulation_residuals(const ModulationState& s, double a_tau,
                                               double nu_tau, double beta) {
    const double ln = std::log(s.nu);
    const double mod0 = a_tau - 2.0 * s.a * beta * (1.0 + 1.0 / (2.0 * ln)) -
                        16.0 * s.nu * s.nu * (nu_tau / s.nu - beta);
    const double mod1 = -a_tau + s.a * beta / ln;
    return {mod0, mod1};
}

namespace {

double nu_exact(double tau, double M0, double beta) {
    return std::exp(-std::sqrt(beta * tau + M0));
}

std::vector<double> output_times(double tau_end, double dtau) {
    std::vector<double> ts;
    for (double t = 0.0; t < tau_end; t += dtau) ts.push_back(t);
    ts.push_back(tau_end);
    return ts;
}

} // namespace

ReducedLawResult integrate_reduced_law(double M0, double beta, double tau_end,
                                       double dtau_out) {
    if (!(M0 > 0.0)) throw ConfigError("integrate_reduced_law requires M0 > 0");
    ReducedLawResult res;
    const auto ts = output_times(tau_end, dtau_out);

    for (double t : ts) {
        const double nu = nu_exact(t, M0, beta);
        res.exact.states.push_back({t, nu, 8.0 * nu * nu, 0.0});
    }

    // mod1 = 0 with a pinned to 8 nu^2 reduces to nu_tau = nu beta/(2 log nu),
    // i.e. d(log^2 nu)/dtau = beta; integrated in nu to keep the test honest.
    {
        using St = std::array<double, 1>;
        St y{nu_exact(0.0, M0, beta)};
        auto rhs = [beta](const St& s, St& d, double) {
            d[0] = s[0] * beta / (2.0 * std::log(s[0]));
        };
        std::size_t k = 0;
        auto obs = [&](const St& s, double t) {
            res.numeric.states.push_back({t, s[0], 8.0 * s[0] * s[0], 0.0});
            ++k;
        };
        auto st = ode::make_dense_output(1e-14, 1e-13, ode::runge_kutta_dopri5<St>());
        ode::integrate_times(st, rhs, y, ts.begin(), ts.end(), 1e-3, obs);
    }

    // literal system: a_tau = a beta/log nu, nu_tau = nu beta (1 - a/(8 nu^2)),
    // started on the quasi-steady branch a = 8 nu^2 (1 - 1/(2 log nu)).
    {
        using St = std::array<double, 2>;
        const double nu0 = nu_exact(0.0, M0, beta);
        St y{nu0, 8.0 * nu0 * nu0 * (1.0 - 1.0 / (2.0 * std::log(nu0)))};
        auto rhs = [beta](const St& s, St& d, double) {
            const double ln = std::log(s[0]);
            d[1] = s[1] * beta / ln;
            d[0] = s[0] * beta * (1.0 - s[1] / (8.0 * s[0] * s[0]));
        };
        auto on_branch = [](const St& s) {
            return s[0] > 0.0 && s[0] < 1.0 &&
                   std::abs(s[1] / (8.0 * s[0] * s[0]) - 1.0) <= 0.5;
        };
        auto st = ode::make_dense_output(1e-14, 1e-13, ode::runge_kutta_dopri5<St>());
        st.initialize(y, 0.0, 1e-3);
        res.full.states.push_back({0.0, y[0], y[1], 0.0});
        std::size_t next = 1;
        while (next < ts.size()) {
            st.do_step(rhs);
            // the a-direction is unstable; stop once it leaves the branch
            if (!on_branch(st.current_state())) break;
            while (next < ts.size() && ts[next] <= st.current_time()) {
                St s;
                st.calc_state(ts[next], s);
                res.full.states.push_back({ts[next], s[0], s[1], 0.0});
                ++next;
            }
        }
    }
    return res;
}

double blowup_scale(double t, double T, double M0, double beta) {
    if (!(t < T) || t < 0.0) throw ConfigError("blowup_scale requires 0 <= t < T");
    const double tau = std::log(T / (T - t));
    return std::sqrt(T - t) * std::exp(-std::sqrt(beta * tau + M0));
}

std::function<double(double)> reduced_band(double K2, double M0, double beta) {
    return [=](double tau) {
        const double s = std::sqrt(beta * tau + M0);
        return K2 * std::exp(-2.0 * s) / s;
    };
}

void ShootResult::save_json(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw OutputUnwritable("cannot open " + path);
    char buf[128];
    out << "{\n";
    std::snprintf(buf, sizeof buf, "  \"a0\": %.17g,\n", a0);
    out << buf;
    out << "  \"iterations\": " << iterations << ",\n";
    out << "  \"exit_signs\": [" << exit_signs[0] << ", " << exit_signs[1] << "],\n";
    out << "  \"bracket_history\": [";
    for (std::size_t i = 0; i < bracket_history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s[%.17g, %.17g]", i ? ", " : "",
                      bracket_history[i][0], bracket_history[i][1]);
        out << buf;
    }
    out << "]\n}\n";
}

namespace {

// integrate atilde_tau = 2 beta atilde + f; return +1/-1 for band exit sign,
// 0 when trapped through the horizon. Fills traj when requested.
int classify(double a0, const std::function<double(double)>& f,
             const std::function<double(double)>& band, double beta, double horizon,
             Trajectory* traj) {
    using St = std::array<double, 1>;
    St y{a0};
    auto rhs = [&](const St& s, St& d, double t) { d[0] = 2.0 * beta * s[0] + f(t); };
    auto st = ode::make_dense_output(1e-16, 1e-12, ode::runge_kutta_dopri5<St>());
    st.initialize(y, 0.0, 1e-3);
    int sign = 0;
    while (st.current_time() < horizon) {
        if (st.current_time() + st.current_time_step() > horizon)
            st.initialize(st.current_state(), st.current_time(),
                          horizon - st.current_time() + 1e-30);
        st.do_step(rhs);
        const double t = std::min(st.current_time(), horizon);
        const double v = st.current_state()[0];
        if (traj) traj->states.push_back({t, 0.0, v, 0.0});
        const double b = band(t);
        if (std::abs(v) > b * (1.0 + 1e-6)) {
            sign = v > 0.0 ? 1 : -1;
            break;
        }
    }
    return sign;
}

} // namespace

ShootResult shoot_trapped_a(const std::function<double(double)>& forcing, double beta,
                            const std::function<double(double)>& band,
                            std::optional<double> horizon) {
    const double b0 = band(0.0);
    if (!(b0 > 0.0)) throw ConfigError("shooting band must be positive at tau = 0");

    double H;
    if (horizon) {
        H = *horizon;
    } else {
        // default: first tau with band < 1e-3 band(0)
        double t = 1.0;
        while (band(t) >= 1e-3 * b0 && t < 1e6) t *= 1.5;
        H = t;
    }

    ShootResult res;
    double lo = -b0, hi = b0;
    const int slo = classify(lo, forcing, band, beta, H, nullptr);
    const int shi = classify(hi, forcing, band, beta, H, nullptr);
    res.exit_signs = {slo, shi};
    if (slo == 0 || shi == 0) {
        res.a0 = slo == 0 ? lo : hi;
        classify(res.a0, forcing, band, beta, H, &res.trapped);
        return res;
    }
    if (slo == shi) throw NoSignChange("both band endpoints exit with the same sign");

    res.bracket_history.push_back({lo, hi});
    double mid = 0.0;
    for (int it = 0; it < 60; ++it) {
        mid = 0.5 * (lo + hi);
        ++res.iterations;
        const int sm = classify(mid, forcing, band, beta, H, nullptr);
        if (sm == 0) break;
        if (sm == slo)
            lo = mid;
        else
            hi = mid;
        res.bracket_history.push_back({lo, hi});
        if (hi - lo < 1e-15 * b0) {
            mid = 0.5 * (lo + hi);
            break;
        }
    }
    res.a0 = mid;
    classify(res.a0, forcing, band, beta, H, &res.trapped);
    return res;
}

bool BootstrapReport::pass() const {
    return std::all_of(first_violation.begin(), first_violation.end(),
                       [](const auto& v) { return !v.has_value(); });
}

BootstrapReport bootstrap_check(const Trajectory& traj, const BootstrapParams& p) {
    BootstrapReport rep;
    auto flag = [&](int k, double tau) {
        if (!rep.first_violation[static_cast<std::size_t>(k)])
            rep.first_violation[static_cast<std::size_t>(k)] = tau;
    };
    for (std::size_t idx = 0; idx < traj.states.size(); ++idx) {
        const auto& s = traj.states[idx];
        const double root = std::sqrt(p.beta * s.tau + p.M0);
        const double env = std::exp(-root);
        const double lg = std::abs(std::log(s.nu));
        const double n2l = s.nu * s.nu / lg;
        if (!(env / p.K[0] <= s.nu && s.nu <= p.K[0] * env)) flag(0, s.tau);
        if (!(std::abs(s.atilde()) <= p.K[1] * n2l)) flag(1, s.tau);
        if (!(std::abs(s.drift) <= p.K[2] * s.nu / lg)) flag(2, s.tau);
        if (idx < traj.norms.size()) {
            const auto& n = traj.norms[idx];
            if (!(n[0] <= p.K[3] * n2l)) flag(3, s.tau);
            if (!(n[1] <= p.K[4] * n2l)) flag(4, s.tau);
            if (!(n[2] <= p.K[5] * n2l)) flag(5, s.tau);
            if (!(n[3] <= p.K[6] * std::exp(-2.0 * root) / root)) flag(6, s.tau);
        }
    }
    return rep;
}

} // namespace kslab
