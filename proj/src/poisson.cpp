#include "kslab/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "kslab/errors.hpp"
#include "kslab/quad.hpp"

namespace kslab {

namespace {

RadialPoisson radial_poisson_impl(const std::function<double(double)>& S, const RadialGrid& grid,
                                  const std::optional<DecaySpec>& decay) {
    grid.validate();
    const auto& x = grid.nodes;
    RadialPoisson out;

    auto integrand = [&](double s) { return s * S(s); };
    out.partial_mass = quad::cumulative(integrand, x);
    // Contribution of (0, x0]: fit a local power S ~ S0 (s/x0)^p from the
    // first two nodes instead of extrapolating the interpolant below the grid.
    double head = 0.0;
    {
        const double s0 = S(x[0]), s1 = S(x[1]);
        double p = 0.0;
        if (s0 != 0.0 && s1 / s0 > 0.0) p = std::log(s1 / s0) / std::log(x[1] / x[0]);
        if (!(p > -2.0)) p = 0.0;
        head = s0 * x[0] * x[0] / (p + 2.0);
    }
    for (double& m : out.partial_mass) m += head;

    std::vector<double> dpsi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dpsi[i] = -out.partial_mass[i] / x[i];
    out.dpsi = RadialField(grid, std::move(dpsi));

    // Psi(g) = int_g^edge m(s)/s ds (+ tail when the mass vanishes at infinity).
    // Per-interval potential drop via
    //   int_a^b m(s)/s ds = m(a) log(b/a) + int_a^b t S(t) log(b/t) dt,
    // which avoids re-interpolating the partial mass between nodes (the
    // interpolation error is non-smooth node to node and gets amplified by
    // second differences downstream).
    out.psi_segments.resize(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i], b = x[i + 1];
        auto ig = [&](double t) { return t * S(t) * std::log(b / t); };
        out.psi_segments[i] = out.partial_mass[i] * std::log(b / a) + quad::gauss(ig, a, b);
    }
    std::vector<double> cum(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) cum[i] = cum[i - 1] + out.psi_segments[i - 1];
    const double total = cum.back();
    double tail = 0.0;
    if (decay && decay->mass_zero) {
        // m ~ C s^{2-q} beyond the edge, so int m/s ds = m(edge)/(q-2).
        if (!(decay->q > 2.0)) throw TailDivergence("potential tail needs decay q > 2");
        tail = out.partial_mass.back() / (decay->q - 2.0);
    } else {
        out.psi_normalized_at_edge = true;
    }
    std::vector<double> psi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) psi[i] = total - cum[i] + tail;
    out.psi = RadialField(grid, std::move(psi));
    return out;
}

} // namespace

double total_mass(const RadialField& f, std::optional<DecaySpec> decay) {
    f.check_finite();
    const auto& x = f.grid.nodes;
    double m = quad::over_grid([&](double s) { return s * f(s); }, x, x.front(), x.back());
    // head: local power fit as in the Poisson partial mass
    {
        const double s0 = f.values.front(), s1 = f.values[1];
        double p = 0.0;
        if (s0 != 0.0 && s1 / s0 > 0.0) p = std::log(s1 / s0) / std::log(x[1] / x[0]);
        if (!(p > -2.0)) p = 0.0;
        m += s0 * x[0] * x[0] / (p + 2.0);
    }
    if (decay) {
        if (!(decay->q > 2.0)) throw TailDivergence("total mass needs decay q > 2");
        m += f.values.back() * x.back() * x.back() / (decay->q - 2.0);
    }
    return 2.0 * M_PI * m;
}

RadialPoisson radial_poisson(const RadialField& S, std::optional<DecaySpec> decay) {
    S.check_finite();
    return radial_poisson_impl([&](double s) { return S(s); }, S.grid, decay);
}

RadialField radial_poisson_gradient(const RadialField& S) {
    return radial_poisson(S).dpsi;
}

RadialPoisson radial_poisson_fn(const std::function<double(double)>& S, const RadialGrid& grid,
                                std::optional<DecaySpec> decay) {
    return radial_poisson_impl(S, grid, decay);
}

FourierModePoisson fourier_mode_poisson(int j, const RadialField& u, DecaySpec decay) {
    if (j < 1) throw ConfigError("fourier_mode_poisson requires j >= 1");
    if (!(decay.q + j > 2.0))
        throw ModeDivergence("outer quadrature diverges: decay q + mode j <= 2");
    u.check_finite();
    const auto& x = u.grid.nodes;
    const double jd = j;

    auto inner_ig = [&](double y) { return u(y) * std::pow(y, 1.0 + jd); };
    auto outer_ig = [&](double y) { return u(y) * std::pow(y, 1.0 - jd); };

    std::vector<double> inner = quad::cumulative(inner_ig, x);
    const double head = quad::gauss(inner_ig, 0.0, x.front());
    for (double& v : inner) v += head;

    std::vector<double> outer_cum = quad::cumulative(outer_ig, x);
    const double outer_total = outer_cum.back();
    // Declared-decay tail of the outer integral beyond the last node.
    const double edge = x.back();
    const double tail = u.values.back() * std::pow(edge, 2.0 - jd) / (decay.q + jd - 2.0);

    std::vector<double> psi(x.size()), dpsi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double g = x[i];
        const double I_out = outer_total - outer_cum[i] + tail; // int_g^inf u y^{1-j}
        const double I_in = inner[i];                           // int_0^g u y^{1+j}
        const double gj = std::pow(g, jd);
        psi[i] = gj / (2.0 * jd) * I_out + 1.0 / (gj * 2.0 * jd) * I_in;
        dpsi[i] = 0.5 * gj / g * I_out - 0.5 / (gj * g) * I_in;
    }
    FourierModePoisson out;
    out.j = j;
    out.psi = RadialField(u.grid, std::move(psi));
    out.dpsi = RadialField(u.grid, std::move(dpsi));
    return out;
}

double ring_kernel_E3(double r, double z, double rt, double zt, double rel_tol) {
    auto f = [&](double th) {
        const double d2 = r * r - 2.0 * r * rt * std::cos(th) + rt * rt + (z - zt) * (z - zt);
        return 1.0 / std::sqrt(d2);
    };
    const double pi = 3.14159265358979323846;
    return rt / (2.0 * pi) * quad::adaptive(f, 0.0, pi, rel_tol);
}

std::array<double, 2> ring_kernel_grad_E3(double r, double z, double rt, double zt,
                                          double rel_tol) {
    const double pi = 3.14159265358979323846;
    auto fr = [&](double th) {
        const double c = std::cos(th);
        const double d2 = r * r - 2.0 * r * rt * c + rt * rt + (z - zt) * (z - zt);
        return (r - rt * c) / (d2 * std::sqrt(d2));
    };
    auto fz = [&](double th) {
        const double c = std::cos(th);
        const double d2 = r * r - 2.0 * r * rt * c + rt * rt + (z - zt) * (z - zt);
        return (z - zt) / (d2 * std::sqrt(d2));
    };
    return {-rt / (2.0 * pi) * quad::adaptive(fr, 0.0, pi, rel_tol),
            -rt / (2.0 * pi) * quad::adaptive(fz, 0.0, pi, rel_tol)};
}

namespace {
std::vector<double> cell_widths(const std::vector<double>& x) {
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lo = i == 0 ? x[0] : 0.5 * (x[i - 1] + x[i]);
        const double hi = i + 1 == x.size() ? x.back() : 0.5 * (x[i] + x[i + 1]);
        w[i] = hi - lo;
    }
    return w;
}
} // namespace

std::vector<std::array<double, 2>> axisym_poisson_3d_gradient_at(
    const AxisymField& u, const std::vector<std::array<double, 2>>& targets,
    bool desingularize, double rel_tol) {
    const auto wr = cell_widths(u.r_nodes);
    const auto wz = cell_widths(u.z_nodes);
    std::vector<std::array<double, 2>> out(targets.size(), {0.0, 0.0});

    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double r = targets[t][0], z = targets[t][1];
        double gr = 0.0, gz = 0.0;
        for (std::size_t i = 0; i < u.nr(); ++i) {
            const double rt = u.r_nodes[i];
            for (std::size_t j = 0; j < u.nz(); ++j) {
                const double zt = u.z_nodes[j];
                const double w = u.at(i, j) * wr[i] * wz[j];
                if (w == 0.0) continue;
                const double dr = r - rt, dz = z - zt;
                const double sep2 = dr * dr + dz * dz;
                const double cell2 = 0.25 * (wr[i] * wr[i] + wz[j] * wz[j]);
                if (sep2 < 1e-12 * cell2) {
                    if (!desingularize)
                        throw SingularEvaluation("target coincides with source node");
                    // Local 2D limit of the ring kernel: the dipole kernel has
                    // zero cell average; the first moment yields a gradient term.
                    const double hr = wr[i], hz = wz[j];
                    double dudr = 0.0, dudz = 0.0;
                    if (i > 0 && i + 1 < u.nr())
                        dudr = (u.at(i + 1, j) - u.at(i - 1, j)) /
                               (u.r_nodes[i + 1] - u.r_nodes[i - 1]);
                    if (j > 0 && j + 1 < u.nz())
                        dudz = (u.at(i, j + 1) - u.at(i, j - 1)) /
                               (u.z_nodes[j + 1] - u.z_nodes[j - 1]);
                    const double pi = 3.14159265358979323846;
                    gr += -hr * hz / (4.0 * pi) * dudr;
                    gz += -hr * hz / (4.0 * pi) * dudz;
                    continue;
                }
                const auto g = ring_kernel_grad_E3(r, z, rt, zt, rel_tol);
                gr += w * g[0];
                gz += w * g[1];
            }
        }
        out[t] = {gr, gz};
    }
    return out;
}

std::pair<AxisymField, AxisymField> axisym_poisson_3d_gradient(const AxisymField& u,
                                                               double /*ring_offset*/) {
    std::vector<std::array<double, 2>> targets;
    targets.reserve(u.nr() * u.nz());
    for (double r : u.r_nodes)
        for (double z : u.z_nodes) targets.push_back({r, z});
    const auto g = axisym_poisson_3d_gradient_at(u, targets);
    AxisymField gr(u.r_nodes, u.z_nodes, false), gz(u.r_nodes, u.z_nodes, false);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        gr.values[k] = g[k][0];
        gz.values[k] = g[k][1];
    }
    return {std::move(gr), std::move(gz)};
}

Diff2d3dReport poisson_2d_3d_difference(const RadialField& u_zeta, double ring_offset,
                                        double probe_radius, double s, double zeta_star_big) {
    Diff2d3dReport rep;
    rep.mu = 1.0 / ring_offset;
    rep.s = s;
    if (!(s > 6.0 / 7.0 && s < 1.0)) throw ConfigError("exponent s must lie in (6/7, 1)");

    // Constants of the decay hypothesis, estimated from the data.
    const auto& x = u_zeta.grid.nodes;
    double li = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= zeta_star_big)
            li = std::max(li, std::abs(u_zeta.values[i]) * std::pow(1.0 + x[i], 1.5));
    auto sq = [&](double z) { return u_zeta(z) * u_zeta(z) * z; };
    auto dsq = [&](double z) {
        const double d = u_zeta.deriv(z);
        return d * d * z;
    };
    const double pi = 3.14159265358979323846;
    const double inner_hi = std::min(x.back(), zeta_star_big);
    rep.L_inf = li;
    rep.L_2 = std::sqrt(2.0 * pi * quad::over_grid(sq, x, x.front(), inner_hi));
    rep.L_2p = std::sqrt(2.0 * pi * quad::over_grid(dsq, x, x.front(), inner_hi));
    if (!std::isfinite(rep.L_inf) || !std::isfinite(rep.L_2) || !std::isfinite(rep.L_2p))
        throw DecayHypothesisViolated("non-finite decay constants");

    // 2D gradient of the planar field (radial in zeta).
    const auto pois2d = radial_poisson(u_zeta, DecaySpec{4.0, false});

    // 3D gradient: sample the bump on a tensor grid centered on the ring.
    const double a = std::min(x.back(), 4.0 * zeta_star_big);
    const int n = 96;
    std::vector<double> rn(n), zn(n);
    for (int i = 0; i < n; ++i) {
        rn[i] = ring_offset - a + 2.0 * a * i / (n - 1);
        zn[i] = -a + 2.0 * a * i / (n - 1);
    }
    AxisymField u3(rn, zn, true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double zr = rn[i] - ring_offset;
            const double zeta = std::hypot(zr, zn[j]);
            u3.at(i, j) = (zeta <= x.back() && zeta >= 0.0)
                              ? (zeta < x.front() ? u_zeta.values.front() : u_zeta(zeta))
                              : 0.0;
        }

    // Probe targets inside the ball and on an exterior shell.
    std::vector<std::array<double, 2>> near_t, far_t;
    const int m = 12;
    for (int k = 0; k < m; ++k) {
        const double th = 2.0 * pi * k / m;
        const double rad = probe_radius * (0.25 + 0.7 * (k % 3) / 2.0);
        near_t.push_back({ring_offset + rad * std::cos(th), rad * std::sin(th)});
        const double frad = std::pow(rep.mu, -s);
        far_t.push_back({ring_offset + 1.5 * frad * std::cos(th), 1.5 * frad * std::sin(th)});
    }
    const auto g_near = axisym_poisson_3d_gradient_at(u3, near_t);
    const auto g_far = axisym_poisson_3d_gradient_at(u3, far_t);

    for (std::size_t k = 0; k < near_t.size(); ++k) {
        const double zr = near_t[k][0] - ring_offset, zz = near_t[k][1];
        const double zeta = std::hypot(zr, zz);
        const double dp = pois2d.dpsi(zeta);
        const double gx = dp * zr / zeta, gy = dp * zz / zeta;
        const double diff = std::hypot(g_near[k][0] - gx, g_near[k][1] - gy);
        rep.sup_near_diff = std::max(rep.sup_near_diff, diff);
    }
    for (const auto& g : g_far)
        rep.sup_far_grad = std::max(rep.sup_far_grad, std::hypot(g[0], g[1]));

    rep.predicted_scale = (rep.L_inf + rep.L_2 + rep.L_2p) * std::pow(rep.mu, 7.0 * s - 6.0);
    return rep;
}

} // namespace kslab
