#include "kslab/operators.hpp"

#include <cmath>
#include <vector>

#include "kslab/errors.hpp"
#include "kslab/profile.hpp"

namespace kslab {

namespace {

double U_for(const RadialGrid& g, double nu, double x) {
    return g.tag == Variable::soliton ? profile::U(x) : profile::U_nu(x, nu);
}

} // namespace

RadialField apply_M(const RadialField& f, double nu, std::optional<DecaySpec> decay) {
    if (decay && !(decay->q > 2.0) && decay->mass_zero)
        throw PoissonUndefined("declared decay too slow for the Poisson field");
    const auto pois = radial_poisson(f, decay);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.grid.nodes[i];
        out[i] = f.values[i] / U_for(f.grid, nu, x) - pois.psi.values[i];
    }
    return RadialField(f.grid, std::move(out));
}

std::vector<double> grid_deriv(const RadialGrid& grid, const std::vector<double>& v) {
    const auto& g = grid.nodes;
    const std::size_t n = g.size();
    std::vector<double> x(n), d(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::log(g[i]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
        const double dfdx = -h2 / (h1 * (h1 + h2)) * v[i - 1] +
                            (h2 - h1) / (h1 * h2) * v[i] +
                            h1 / (h2 * (h1 + h2)) * v[i + 1];
        d[i] = dfdx / g[i];
    }
    {
        const double h1 = x[1] - x[0], h2 = x[2] - x[1];
        const double dfdx = -(2 * h1 + h2) / (h1 * (h1 + h2)) * v[0] +
                            (h1 + h2) / (h1 * h2) * v[1] - h1 / (h2 * (h1 + h2)) * v[2];
        d[0] = dfdx / g[0];
    }
    {
        const std::size_t i = n - 1;
        const double h1 = x[i - 1] - x[i - 2], h2 = x[i] - x[i - 1];
        const double dfdx = h2 / (h1 * (h1 + h2)) * v[i - 2] -
                            (h1 + h2) / (h1 * h2) * v[i - 1] +
                            (h1 + 2 * h2) / (h2 * (h1 + h2)) * v[i];
        d[i] = dfdx / g[i];
    }
    return d;
}

RadialField apply_M_mode(const RadialField& h, int j, double nu, DecaySpec decay) {
    const auto pois = fourier_mode_poisson(j, h, decay);
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        out[i] = h.values[i] / U_for(h.grid, nu, h.grid.nodes[i]) - pois.psi.values[i];
    return RadialField(h.grid, std::move(out));
}

RadialField apply_L_mode(const RadialField& h, int j, double nu, double beta,
                         LVariant variant, DecaySpec decay) {
    const RadialField M = apply_M_mode(h, j, nu, decay);
    const auto& gn = h.grid.nodes;
    const std::size_t n = gn.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::log(gn[i]);

    // Mode psi carries no large constant offset, so the flux may difference
    // the M values directly.
    std::vector<double> flux(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double xm = 0.5 * (x[i] + x[i + 1]);
        const double Um = U_for(h.grid, nu, std::exp(xm));
        flux[i] = Um * (M.values[i + 1] - M.values[i]) / (x[i + 1] - x[i]);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double div = (flux[i] - flux[i - 1]) / (0.5 * (x[i + 1] - x[i - 1]));
        const double U = U_for(h.grid, nu, gn[i]);
        out[i] = div / (gn[i] * gn[i]) - U * j * j * M.values[i] / (gn[i] * gn[i]);
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];

    if (variant == LVariant::L_zeta_parabolic) {
        const RadialField lam = lambda_op(h);
        for (std::size_t i = 0; i < n; ++i) out[i] -= beta * lam.values[i];
    }
    return RadialField(h.grid, std::move(out));
}

AxisymField apply_M(const AxisymField& f, double nu, double ring_center, int n_modes,
                    double ppd) {
    // Cosine-mode decomposition of f about (ring_center, 0); even-in-z data
    // has no sine modes. Sample radius covers the farthest grid corner.
    double smax = 0.0;
    for (double r : {f.r_nodes.front(), f.r_nodes.back()})
        for (double z : {f.z_nodes.front(), f.z_nodes.back()})
            smax = std::max(smax, std::hypot(r - ring_center, z));
    const double smin = 1e-4;
    RadialGrid sg = RadialGrid::geometric(smin, 1.05 * smax, ppd, Variable::parabolic);

    // Cell-centered data: clamp within half a cell of the first/last node so
    // the band around the symmetry plane (|z| < z_nodes.front()) is not
    // zeroed out; even data is flat there to O(h^2).
    const double rpad = f.nr() > 1 ? 0.5 * (f.r_nodes[1] - f.r_nodes[0]) : 0.0;
    const double zpad = f.nz() > 1 ? 0.5 * (f.z_nodes[1] - f.z_nodes[0]) : 0.0;
    auto sample = [&](double r, double z) -> double {
        double zz = f.even_in_z && z < 0.0 ? -z : z;
        if (r < f.r_nodes.front() - rpad || r > f.r_nodes.back() + rpad ||
            zz < f.z_nodes.front() - (f.even_in_z ? f.z_nodes.front() : zpad) ||
            zz > f.z_nodes.back() + zpad)
            return 0.0;
        r = std::clamp(r, f.r_nodes.front(), f.r_nodes.back());
        zz = std::clamp(zz, f.z_nodes.front(), f.z_nodes.back());
        return f.eval(r, zz);
    };

    const int nth = 64;
    std::vector<std::vector<double>> coef(static_cast<std::size_t>(n_modes) + 1,
                                          std::vector<double>(sg.size(), 0.0));
    for (std::size_t i = 0; i < sg.size(); ++i) {
        const double s = sg.nodes[i];
        for (int k = 0; k < nth; ++k) {
            const double th = (k + 0.5) * 2.0 * M_PI / nth;
            const double v = sample(ring_center + s * std::cos(th), s * std::sin(th));
            coef[0][i] += v / nth;
            for (int m = 1; m <= n_modes; ++m)
                coef[static_cast<std::size_t>(m)][i] += 2.0 * v * std::cos(m * th) / nth;
        }
    }

    // Mode potentials on the sample grid.
    std::vector<RadialField> psi;
    psi.reserve(static_cast<std::size_t>(n_modes) + 1);
    {
        RadialField u0(sg, coef[0]);
        psi.push_back(radial_poisson(u0, DecaySpec{4.0, false}).psi);
        for (int m = 1; m <= n_modes; ++m) {
            RadialField um(sg, coef[static_cast<std::size_t>(m)]);
            psi.push_back(fourier_mode_poisson(m, um, DecaySpec{4.0, false}).psi);
        }
    }

    AxisymField out(f.r_nodes, f.z_nodes, f.even_in_z);
    for (std::size_t i = 0; i < f.nr(); ++i)
        for (std::size_t k = 0; k < f.nz(); ++k) {
            const double dr = f.r_nodes[i] - ring_center, dz = f.z_nodes[k];
            const double s = std::max(std::hypot(dr, dz), sg.front());
            const double th = std::atan2(dz, dr);
            double p = psi[0](s);
            for (int m = 1; m <= n_modes; ++m)
                p += psi[static_cast<std::size_t>(m)](s) * std::cos(m * th);
            out.at(i, k) = f.at(i, k) / profile::U_nu(s, nu) - p;
        }
    return out;
}

RadialField lambda_op(const RadialField& f) {
    const auto d = grid_deriv(f.grid, f.values);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = 2.0 * f.values[i] + f.grid.nodes[i] * d[i];
    return RadialField(f.grid, std::move(out));
}

RadialField apply_L(const RadialField& f, double nu, double beta, LVariant variant,
                    std::optional<DecaySpec> decay) {
    if (decay && !(decay->q > 2.0) && decay->mass_zero)
        throw PoissonUndefined("declared decay too slow for the Poisson field");
    const auto pois = radial_poisson(f, decay);
    const auto& gn = f.grid.nodes;
    const std::size_t n = gn.size();
    std::vector<double> x(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(gn[i]);
        q[i] = f.values[i] / U_for(f.grid, nu, gn[i]);
    }

    // Flux form in the log coordinate: L0 f = (1/g^2) d/dx (U dg/dx) with
    // g = M f. The node-to-node increment of g is assembled from the ratio
    // f/U and the exact per-interval potential drop, avoiding the rounding
    // of Psi against its constant part near the origin.
    std::vector<double> flux(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double xm = 0.5 * (x[i] + x[i + 1]);
        const double Um = U_for(f.grid, nu, std::exp(xm));
        const double dg = (q[i + 1] - q[i]) + pois.psi_segments[i];
        flux[i] = Um * dg / (x[i + 1] - x[i]);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double div = (flux[i] - flux[i - 1]) / (0.5 * (x[i + 1] - x[i - 1]));
        out[i] = div / (gn[i] * gn[i]);
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];

    if (variant == LVariant::L_zeta_parabolic) {
        const RadialField lam = lambda_op(f);
        for (std::size_t i = 0; i < n; ++i) out[i] -= beta * lam.values[i];
    }
    return RadialField(f.grid, std::move(out));
}

} // namespace kslab
