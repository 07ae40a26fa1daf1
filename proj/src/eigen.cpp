#include "kslab/eigen.hpp"

#include <algorithm>
#include <cmath>

#include "kslab/errors.hpp"
#include "kslab/operators.hpp"
#include "kslab/poisson.hpp"
#include "kslab/profile.hpp"
#include "kslab/quad.hpp"

#ifdef KSLAB_HAVE_FLOAT128
#include <quadmath.h>
#endif

namespace kslab {

namespace {

constexpr double kEuler = 0.57721566490153286060651209008240243;

// G_i in the variable z = beta zeta^2 / 2, after removal of the spurious
// homogeneous-mode admixture so that the small-z expansions are exactly
//   G0 = (beta/8) [ -1/z + 1/4 - (E + log z)/2 + O(z log z) ],
//   G1 = (beta/8) [ -1/z - 3/4 + (E + log z)/2 + O(z log z) ].
// Closed forms (F = e^z E1(z)):
//   G0 = (beta/8) [ (z-1) F - log z - E ] / z^2
//   G1 = -(beta/8) [ F + (1+z)(log z + E) ] / z^2
struct Gz {
    double G, dGdz, G_plus; // G_plus = G + beta/(8z) = G + 1/(4 zeta^2)
};

Gz eval_G(int i, double z, double beta) {
#ifdef KSLAB_HAVE_FLOAT128
    if (z < 4.0) {
        // The bracket cancels to O(z) at small z; assemble in quad precision.
        const __float128 E = 0.577215664901532860606512090082402431Q;
        const __float128 zq = z;
        const __float128 F = expE1_scaled_q(zq);
        const __float128 L = logq(zq);
        const __float128 b8 = static_cast<__float128>(beta) / 8.0Q;
        __float128 N, Np, Nplus;
        if (i == 0) {
            N = (zq - 1.0Q) * F - L - E;
            Np = F * (zq * zq - 2.0Q * zq + 2.0Q) - zq + 2.0Q * (L + E);
            Nplus = N + zq; // removes the -1/z pole
            return {static_cast<double>(b8 * N / (zq * zq)),
                    static_cast<double>(b8 * Np / (zq * zq * zq)),
                    static_cast<double>(b8 * Nplus / (zq * zq))};
        }
        N = -(F + (1.0Q + zq) * (L + E));
        Np = -((zq - 2.0Q) * F + zq - (2.0Q + zq) * (L + E));
        Nplus = N + zq;
        return {static_cast<double>(b8 * N / (zq * zq)),
                static_cast<double>(b8 * Np / (zq * zq * zq)),
                static_cast<double>(b8 * Nplus / (zq * zq))};
    }
#endif
    const double F = expE1_scaled(z);
    const double L = std::log(z);
    const double b8 = beta / 8.0;
    double N, Np;
    if (i == 0) {
        N = (z - 1.0) * F - L - kEuler;
        Np = F * (z * z - 2.0 * z + 2.0) - z + 2.0 * (L + kEuler);
    } else {
        N = -(F + (1.0 + z) * (L + kEuler));
        Np = -((z - 2.0) * F + z - (2.0 + z) * (L + kEuler));
    }
    return {b8 * N / (z * z), b8 * Np / (z * z * z), b8 * (N + z) / (z * z)};
}

} // namespace

OuterPoint outer_point(int i, double zeta, double alpha_tilde, double beta) {
    if (i != 0 && i != 1) throw ConfigError("eigenfunction index must be 0 or 1");
    if (!(zeta > 0.0)) throw ConfigError("outer eigenfunction needs zeta > 0");
    OuterPoint p;
    const double z2 = zeta * zeta;
    p.Omega = 1.0 / (z2 * z2);
    p.dOmega = -4.0 / (z2 * z2 * zeta);
    if (i == 1) {
        p.Omega += 0.5 * beta / z2;
        p.dOmega += -beta / (z2 * zeta);
    }
    const double z = 0.5 * beta * z2;
    const Gz g = eval_G(i, z, beta);
    p.G = g.G;
    p.dG = g.dGdz * beta * zeta; // dz/dzeta = beta zeta
    p.G_reg = g.G_plus;
    const double a = 2.0 * beta * alpha_tilde;
    p.phi = p.Omega + a * p.G;
    p.dphi = p.dOmega + a * p.dG;
    return p;
}

double outer_eigenfunction(int i, double zeta, double alpha_tilde, double beta) {
    return outer_point(i, zeta, alpha_tilde, beta).phi;
}

InnerCoeffs inner_coeffs(int i, double nu, double beta) {
    if (i != 0 && i != 1) throw ConfigError("eigenfunction index must be 0 or 1");
    if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("inner coefficients need nu in (0,1)");
    InnerCoeffs c;
    c.alpha_tilde = 1.0 / (2.0 * std::log(nu));
    c.A = 1.0 - i + c.alpha_tilde;
    c.c2 = 2.0 * beta * c.A;
    c.c2t = beta;
    c.d4 = 2.0 * beta * beta * c.A;
    c.d4t = beta * beta;
    c.c4 = 4.0 * beta * beta * c.A * c.A;
    c.c4t = 2.0 * beta * beta * c.A;
    return c;
}

InnerEigen::InnerEigen(int i, double nu, double beta, const BuildingBlockSet& blocks)
    : i_(i), nu_(nu), beta_(beta), c_(inner_coeffs(i, nu, beta)), blocks_(&blocks) {}

double InnerEigen::phi(double g) const {
    const double n2 = nu_ * nu_, n4 = n2 * n2;
    const auto& b = *blocks_;
    return profile::LamU(g) + n2 * (c_.c2 * b.V2.V(g) + c_.c2t * b.V2t.V(g)) +
           n4 * (c_.d4 * b.V4sharp.V(g) + c_.d4t * b.V4sharpt.V(g) + c_.c4 * b.V4.V(g) +
                 c_.c4t * b.V4t.V(g));
}

double InnerEigen::dphi(double g) const {
    const double n2 = nu_ * nu_, n4 = n2 * n2;
    const auto& b = *blocks_;
    return profile::dLamU(g) + n2 * (c_.c2 * b.V2.dV(g) + c_.c2t * b.V2t.dV(g)) +
           n4 * (c_.d4 * b.V4sharp.dV(g) + c_.d4t * b.V4sharpt.dV(g) + c_.c4 * b.V4.dV(g) +
                 c_.c4t * b.V4t.dV(g));
}

double InnerEigen::d2phi(double g) const {
    const double n2 = nu_ * nu_, n4 = n2 * n2;
    const auto& b = *blocks_;
    return profile::d2LamU(g) + n2 * (c_.c2 * b.V2.d2V(g) + c_.c2t * b.V2t.d2V(g)) +
           n4 * (c_.d4 * b.V4sharp.d2V(g) + c_.d4t * b.V4sharpt.d2V(g) + c_.c4 * b.V4.d2V(g) +
                 c_.c4t * b.V4t.d2V(g));
}

double InnerEigen::partial_mass(double g) const {
    const double n2 = nu_ * nu_, n4 = n2 * n2;
    const auto& b = *blocks_;
    return g * g * profile::U(g) + n2 * (c_.c2 * b.V2.m(g) + c_.c2t * b.V2t.m(g)) +
           n4 * (c_.d4 * b.V4sharp.m(g) + c_.d4t * b.V4sharpt.m(g) + c_.c4 * b.V4.m(g) +
                 c_.c4t * b.V4t.m(g));
}

double InnerEigen::residual(double g) const {
    const auto& b = *blocks_;
    auto lam = [&](const Block& blk) { return 2.0 * blk.V(g) + g * blk.dV(g); };
    const double A = c_.A;
    const double b3n6 = beta_ * beta_ * beta_ * std::pow(nu_, 6);
    const double lam_part = lam(b.V4sharpt) + 2.0 * A * lam(b.V4sharp) +
                            2.0 * A * lam(b.V4t) + 4.0 * A * A * lam(b.V4);
    const double val_part = b.V4sharpt.V(g) + 2.0 * A * b.V4sharp.V(g) +
                            2.0 * A * b.V4t.V(g) + 4.0 * A * A * b.V4.V(g);
    return -b3n6 * lam_part - 2.0 * b3n6 * A * val_part;
}

RadialField inner_eigenfunction(int i, double nu, const BuildingBlockSet& blocks,
                                double beta) {
    InnerEigen in(i, nu, beta, blocks);
    return RadialField::sample(blocks.grid, [&](double g) { return in.phi(g); });
}

EigenPair glue_eigenfunction(int i, double nu, const CutoffConfig& cutoffs,
                             const BuildingBlockSet& blocks, double beta, double ppd,
                             double zeta_match) {
    cutoffs.validate();
    if (!(nu == cutoffs.nu)) throw ConfigError("cutoff config nu mismatch");
    const double lognu = cutoffs.log_nu_abs();
    const double zm = cutoffs.zeta_m;
    // disjoint supports of chi_m' ([zm, 2 zm]) and chi_nu' ([|log nu|, 2|log nu|])
    if (!(2.0 * zm < lognu)) throw CutoffOverlap("cutoff derivative supports overlap");
    if (std::max(2.0 * zm, 4.0 * zeta_match) / nu > blocks.grid.back())
        throw ConfigError("block grid too short for the matching window");

    InnerEigen inner(i, nu, beta, blocks);
    const InnerCoeffs& c = inner.coeffs();
    const double lambda = 2.0 * beta * c.A;
    const double scale = -1.0 / (16.0 * std::pow(nu, 4));

    auto P = [&](double zeta) { return scale * inner.phi(zeta / nu); };
    auto dP = [&](double zeta) { return scale / nu * inner.dphi(zeta / nu); };
    auto mP = [&](double zeta) {
        return -1.0 / (16.0 * nu * nu) * inner.partial_mass(zeta / nu);
    };
    auto Q = [&](double zeta) { return outer_point(i, zeta, c.alpha_tilde, beta); };

    const double lo = nu / 100.0;
    const double hi = 2.2 * lognu;
    RadialGrid grid = RadialGrid::geometric(lo, hi, ppd, Variable::parabolic);
    const std::size_t n = grid.size();

    std::vector<double> phi(n), res(n);
    // glued profile
    std::vector<double> chim(n), dchim(n), d2chim(n), chin(n), dchin(n), d2chin(n);
    std::vector<OuterPoint> op(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double zt = grid.nodes[k];
        chim[k] = cutoffs.chi_m(zt);
        dchim[k] = cutoffs.dchi_m(zt);
        d2chim[k] = cutoffs.d2chi_m(zt);
        chin[k] = cutoffs.chi_nu(zt);
        dchin[k] = cutoffs.dchi_nu(zt);
        d2chin[k] = cutoffs.d2chi_nu(zt);
        if (zt < 2.0 * lognu) op[k] = Q(zt);
        const double Bk = (1.0 - chim[k]) * chin[k];
        phi[k] = chim[k] * P(zt) + Bk * op[k].phi;
        if (zt >= 2.0 * lognu) phi[k] = 0.0;
    }

    // partial mass of the glued profile: analytic below zeta_m, cumulative
    // quadrature above (the integrand is the analytic composition, so the
    // error is smooth).
    std::vector<double> mphi(n);
    auto phi_eval = [&](double zt) {
        const double cm = cutoffs.chi_m(zt);
        const double B = (1.0 - cm) * cutoffs.chi_nu(zt);
        double v = 0.0;
        if (cm > 0.0) v += cm * P(zt);
        if (B > 0.0 && zt < 2.0 * lognu) v += B * Q(zt).phi;
        return v;
    };
    {
        auto ig = [&](double s) { return s * phi_eval(s); };
        double acc = mP(grid.nodes[0]);
        mphi[0] = acc;
        for (std::size_t k = 1; k < n; ++k) {
            const double zt = grid.nodes[k];
            if (zt <= zm) {
                acc = mP(zt);
            } else {
                acc += quad::gauss(ig, grid.nodes[k - 1], zt);
            }
            mphi[k] = acc;
        }
    }

    // residual assembly
    for (std::size_t k = 0; k < n; ++k) {
        const double zt = grid.nodes[k];
        const double g = zt / nu;
        const double Unu = profile::U_nu(zt, nu);
        const double dUnu = profile::dU_nu(zt, nu);
        const double dPsiUnu = profile::dPsiU_nu(zt, nu);
        const double B = (1.0 - chim[k]) * chin[k];
        const double dB = -dchim[k] * chin[k] + (1.0 - chim[k]) * dchin[k];
        const double d2B = -d2chim[k] * chin[k] - 2.0 * dchim[k] * dchin[k] +
                           (1.0 - chim[k]) * d2chin[k];

        double r = 0.0;
        // exact scaling identity on the inner carrier
        if (chim[k] > 0.0)
            r += chim[k] * (-1.0 / (16.0 * std::pow(nu, 6))) * inner.residual(g);
        // Hermite-zone local residual of Q (no nonlocal part)
        double Pv = 0.0, dPv = 0.0, Qv = 0.0, dQv = 0.0;
        if (chim[k] > 0.0 || dchim[k] != 0.0) {
            Pv = P(zt);
            dPv = dP(zt);
        }
        if (B > 0.0 || dB != 0.0) {
            Qv = op[k].phi;
            dQv = op[k].dphi;
            const double phit = op[k].phi - op[k].Omega; // 2 beta alpha G
            const double rq = -2.0 * beta * c.alpha_tilde * phit -
                              dQv * 4.0 * nu * nu / (zt * (nu * nu + zt * zt)) +
                              2.0 * Unu * Qv;
            r += B * rq;
        }
        // commutator terms from both cutoffs (local part)
        const double mul = 1.0 / zt - dPsiUnu - beta * zt;
        if (dchim[k] != 0.0 || d2chim[k] != 0.0)
            r += d2chim[k] * Pv + 2.0 * dchim[k] * dPv + dchim[k] * Pv * mul;
        if (dB != 0.0 || d2B != 0.0) r += d2B * Qv + 2.0 * dB * dQv + dB * Qv * mul;
        // nonlocal bookkeeping: chi_m P carries the analytic inner Poisson
        // field; correct it to the field of the full glued profile.
        r += dUnu * (mphi[k] - chim[k] * mP(zt)) / zt;
        if (zt >= 2.0 * lognu) {
            // outside the support only the nonlocal tail remains
            r = dUnu * mphi[k] / zt;
        }
        res[k] = r;
    }

    EigenPair pair;
    pair.i = i;
    pair.nu = nu;
    pair.beta = beta;
    pair.eigenvalue = lambda;
    pair.phi = RadialField(grid, std::move(phi));
    pair.residual = RadialField(grid, std::move(res));

    // matching gap on [zeta_match/4, 4 zeta_match]
    pair.match.zeta_m = zeta_match;
    pair.match.predicted_scale = 1.0 / lognu;
    {
        double sup = 0.0;
        const int m = 400;
        for (int j = 0; j <= m; ++j) {
            const double zt = 0.25 * zeta_match * std::pow(16.0, static_cast<double>(j) / m);
            sup = std::max(sup, std::abs(P(zt) - Q(zt).phi));
        }
        pair.match.sup_gap = sup;
    }

    // |int_{zeta<1} R zeta dzeta|
    {
        std::vector<double> sr(n);
        for (std::size_t k = 0; k < n; ++k) sr[k] = grid.nodes[k] * pair.residual.values[k];
        Pchip ip(grid.nodes, sr);
        pair.partial_mass_residual = std::abs(ip.integrate(lo, 1.0));
    }
    pair.residual_norm_in = bootstrap_norm_in(pair.residual, nu, cutoffs, beta);
    return pair;
}

AdaptedForm::AdaptedForm(const RadialGrid& grid, double nu, const CutoffConfig& cutoffs,
                         double beta) {
    grid.validate();
    // 7-point Gauss-Legendre per grid interval, clipped to the chi_nu support
    static const double gx[7] = {-0.9491079123427585, -0.7415311855993945,
                                 -0.4058451513773972, 0.0,
                                 0.4058451513773972,  0.7415311855993945,
                                 0.9491079123427585};
    static const double gw[7] = {0.1294849661688697, 0.2797053914892766,
                                 0.3818300505051189, 0.4179591836734694,
                                 0.3818300505051189, 0.2797053914892766,
                                 0.1294849661688697};
    const double support = 2.0 * cutoffs.log_nu_abs();
    WeightSpec w{beta, nu};
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double a = grid.nodes[k];
        if (a >= support) break;
        const double b = std::min(grid.nodes[k + 1], support);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int j = 0; j < 7; ++j) {
            const double zt = mid + half * gx[j];
            pts_.push_back(zt);
            wz_.push_back(gw[j] * half * zt);
            half_.push_back(std::sqrt(w.rho_nu(zt)) * cutoffs.chi_nu(zt));
            inv_unu_.push_back(1.0 / profile::U_nu(zt, nu));
        }
    }
}

double AdaptedForm::operator()(const RadialField& f, const RadialField& g) const {
    const std::size_t m = pts_.size();
    std::vector<double> hf(m), hg(m);
    for (std::size_t p = 0; p < m; ++p) {
        hf[p] = half_[p] * f(pts_[p]);
        hg[p] = half_[p] * g(pts_[p]);
    }
    double local = 0.0;
    for (std::size_t p = 0; p < m; ++p) local += wz_[p] * hf[p] * hg[p] * inv_unu_[p];
    // -int hf Psi_{hg} with Psi(z) = -int ln(max(z,s)) hg(s) s ds
    double kernel = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        double row = 0.0;
        for (std::size_t q = 0; q < m; ++q)
            row += wz_[q] * hg[q] * std::log(std::max(pts_[p], pts_[q]));
        kernel += wz_[p] * hf[p] * row;
    }
    return local + kernel;
}

double adapted_inner_product(const RadialField& f, const RadialField& g, double nu,
                             const CutoffConfig& cutoffs, double beta) {
    AdaptedForm form(f.grid, nu, cutoffs, beta);
    return form(f, g);
}

double bootstrap_norm_in(const RadialField& eps, double nu, const CutoffConfig& cutoffs,
                         double beta) {
    WeightSpec w{beta, nu};
    auto integrand = [&](double zt) {
        const double cn = cutoffs.chi_nu(zt);
        if (cn == 0.0) return 0.0;
        const double e = eps(zt);
        return nu * nu * e * e * cn * cn * w.rho_nu(zt) / profile::U_nu(zt, nu) * zt;
    };
    const double val = quad::over_grid(integrand, eps.grid.nodes, eps.grid.front(),
                                       std::min(eps.grid.back(), 2.0 * cutoffs.log_nu_abs()));
    // full-plane measure, consistent with the axisym overload
    return std::sqrt(std::max(0.0, 2.0 * M_PI * val));
}

double bootstrap_norm_in(const AxisymField& eps, double nu, const CutoffConfig& cutoffs,
                         double beta, double ring_center) {
    WeightSpec w{beta, nu};
    double acc = 0.0;
    // 2x2 tensor Gauss per cell on the bilinear interpolant
    static const double q2[2] = {-0.5773502691896257, 0.5773502691896257};
    for (std::size_t ii = 0; ii + 1 < eps.nr(); ++ii) {
        for (std::size_t jj = 0; jj + 1 < eps.nz(); ++jj) {
            const double hr = eps.r_nodes[ii + 1] - eps.r_nodes[ii];
            const double hz = eps.z_nodes[jj + 1] - eps.z_nodes[jj];
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double r = eps.r_nodes[ii] + 0.5 * hr * (1.0 + q2[a]);
                    const double z = eps.z_nodes[jj] + 0.5 * hz * (1.0 + q2[b]);
                    const double zt = std::hypot(r - ring_center, z);
                    if (zt <= 0.0) continue;
                    const double cn = cutoffs.chi_nu(zt);
                    if (cn == 0.0) continue;
                    const double e = eps.eval(r, z);
                    acc += 0.25 * hr * hz * nu * nu * e * e * cn * cn * w.rho_nu(zt) /
                           profile::U_nu(zt, nu);
                }
            }
        }
    }
    // strip between the symmetry plane and the first node line: eps is even,
    // so the boundary-line value is accurate there to O(z0^2)
    if (eps.even_in_z && eps.z_nodes.front() > 0.0) {
        const double z0 = eps.z_nodes.front();
        for (std::size_t ii = 0; ii + 1 < eps.nr(); ++ii) {
            const double hr = eps.r_nodes[ii + 1] - eps.r_nodes[ii];
            for (int a = 0; a < 2; ++a) {
                const double r = eps.r_nodes[ii] + 0.5 * hr * (1.0 + q2[a]);
                const double zt = std::abs(r - ring_center);
                const double cn = cutoffs.chi_nu(zt);
                if (cn == 0.0 || zt <= 0.0) continue;
                const double e = eps.eval(r, z0);
                acc += 0.5 * hr * z0 * nu * nu * e * e * cn * cn * w.rho_nu(zt) /
                       profile::U_nu(zt, nu);
            }
        }
    }
    if (eps.even_in_z && eps.z_nodes.front() >= 0.0) acc *= 2.0;
    return std::sqrt(std::max(0.0, acc));
}

} // namespace kslab
