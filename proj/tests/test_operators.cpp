#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kslab/operators.hpp"
#include "kslab/profile.hpp"

using namespace kslab;

namespace {
// closed form L0 U = -(1/g)(g U dPsiU)' = 32(2 - 4 g^2)/(1+g^2)^4
double L0U_exact(double g) {
    const double q = 1.0 + g * g;
    return 32.0 * (2.0 - 4.0 * g * g) / (q * q * q * q);
}
} // namespace

TEST_CASE("M of LamU is the constant -2") {
    auto g = RadialGrid::geometric(1e-5, 4000.0, 256.0, Variable::soliton);
    auto f = RadialField::sample(g, profile::LamU);
    auto M = apply_M(f, 0.0, DecaySpec{4.0, true});
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.nodes[i] <= 50.0) sup = std::max(sup, std::abs(M.values[i] + 2.0));
    CHECK(sup <= 1e-6);
}

TEST_CASE("M kills the translation mode") {
    auto g = RadialGrid::geometric(1e-4, 200.0, 256.0, Variable::soliton);
    auto dU = RadialField::sample(g, profile::dU);
    auto M = apply_M_mode(dU, 1, 0.0, DecaySpec{5.0, false});
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.nodes[i] <= 50.0) sup = std::max(sup, std::abs(M.values[i]));
    CHECK(sup <= 1e-6);
}

TEST_CASE("M of zero is zero") {
    auto g = RadialGrid::geometric(1e-4, 100.0, 64.0, Variable::soliton);
    auto Z = RadialField::sample(g, [](double) { return 0.0; });
    auto M = apply_M(Z, 0.0, DecaySpec{4.0, true});
    for (double v : M.values) CHECK(v == 0.0);
    auto Mm = apply_M_mode(Z, 1, 0.0, DecaySpec{4.0, false});
    for (double v : Mm.values) CHECK(v == 0.0);
}

TEST_CASE("L0 annihilates the kernel modes at second order") {
    auto residual_at = [](double ppd, auto&& fn, auto&& apply) {
        auto g = RadialGrid::geometric(1e-5, 4000.0, ppd, Variable::soliton);
        auto f = RadialField::sample(g, fn);
        auto L = apply(f, g);
        double sup = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.nodes[i] >= 0.05 && g.nodes[i] <= 10.0)
                sup = std::max(sup, std::abs(L.values[i]));
        return sup;
    };
    auto L0 = [](const RadialField& f, const RadialGrid&) {
        return apply_L(f, 0.0, 0.5, LVariant::L0_soliton, DecaySpec{4.0, true});
    };
    auto L0m = [](const RadialField& f, const RadialGrid&) {
        return apply_L_mode(f, 1, 0.0, 0.5, LVariant::L0_soliton, DecaySpec{5.0, false});
    };
    double e1 = residual_at(64.0, profile::LamU, L0);
    double e2 = residual_at(128.0, profile::LamU, L0);
    CHECK(std::log2(e1 / e2) >= 1.8);
    double m1 = residual_at(64.0, profile::dU, L0m);
    double m2 = residual_at(128.0, profile::dU, L0m);
    CHECK(std::log2(m1 / m2) >= 1.8);
}

TEST_CASE("L0 of the profile matches the closed form") {
    auto g = RadialGrid::geometric(1e-5, 4000.0, 256.0, Variable::soliton);
    auto f = RadialField::sample(g, profile::U);
    auto L = apply_L(f, 0.0, 0.5, LVariant::L0_soliton, DecaySpec{4.0, false});
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.nodes[i] >= 0.01 && g.nodes[i] <= 3.0)
            sup = std::max(sup, std::abs(L.values[i] - L0U_exact(g.nodes[i])));
    CHECK(sup <= 5e-3); // O(h^2) at ppd 256
    auto L128 = apply_L(RadialField::sample(RadialGrid::geometric(1e-5, 4000.0, 128.0,
                                                                  Variable::soliton),
                                            profile::U),
                        0.0, 0.5, LVariant::L0_soliton, DecaySpec{4.0, false});
    double sup128 = 0.0;
    for (std::size_t i = 0; i < L128.grid.size(); ++i)
        if (L128.grid.nodes[i] >= 0.01 && L128.grid.nodes[i] <= 3.0)
            sup128 = std::max(sup128, std::abs(L128.values[i] - L0U_exact(L128.grid.nodes[i])));
    CHECK(std::log2(sup128 / sup) >= 1.8);
}

TEST_CASE("L of zero is zero") {
    auto g = RadialGrid::geometric(1e-4, 100.0, 64.0, Variable::soliton);
    auto Z = RadialField::sample(g, [](double) { return 0.0; });
    auto L = apply_L(Z, 0.0, 0.5, LVariant::L0_soliton, DecaySpec{4.0, true});
    for (double v : L.values) CHECK(v == 0.0);
}

TEST_CASE("lambda operator against the closed form") {
    auto g = RadialGrid::geometric(1e-4, 100.0, 256.0, Variable::soliton);
    auto f = RadialField::sample(g, profile::U);
    auto L = lambda_op(f);
    double sup = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
        sup = std::max(sup, std::abs(L.values[i] - profile::LamU(g.nodes[i])));
    CHECK(sup <= 1e-3);
}

TEST_CASE("grid derivative of a smooth function") {
    auto g = RadialGrid::geometric(1e-4, 50.0, 256.0, Variable::soliton);
    auto f = RadialField::sample(g, profile::U);
    auto d = grid_deriv(g, f.values);
    double sup = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
        sup = std::max(sup, std::abs(d[i] - profile::dU(g.nodes[i])));
    CHECK(sup <= 1e-3);
}

TEST_CASE("axisym M of the soliton slice is near constant inside") {
    // LamU_nu sampled on a clipped (r,z) patch: M is -2 up to truncation and
    // bilinear-peak error, worst near the origin.
    const double nu = 0.5;
    AxisymField f;
    const int n = 160;
    const double L = 8.0, h = 2.0 * L / n;
    f.even_in_z = true;
    f.r_nodes.resize(n);
    f.z_nodes.resize(n / 2);
    for (int i = 0; i < n; ++i) f.r_nodes[i] = -L + (i + 0.5) * h;
    for (int j = 0; j < n / 2; ++j) f.z_nodes[j] = (j + 0.5) * h;
    f.values.resize(std::size_t(n) * (n / 2));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n / 2; ++j) {
            double z = std::hypot(f.r_nodes[i], f.z_nodes[j]);
            f.at(i, j) = profile::LamU(z / nu) / (nu * nu);
        }
    auto M = apply_M(f, nu, 0.0);
    // away from the truncation the Poisson field of the compactly-sampled
    // LamU_nu is accurate and M approaches the constant -2
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n / 2; ++j) {
            double z = std::hypot(f.r_nodes[i], f.z_nodes[j]);
            if (z > 1.5) continue;
            worst = std::max(worst, std::abs(M.at(i, j) + 2.0));
        }
    CHECK(worst <= 0.1);
}
