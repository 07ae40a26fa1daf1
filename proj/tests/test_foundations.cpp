#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>
#include <cmath>

#include "kslab/errors.hpp"
#include "kslab/grid.hpp"
#include "kslab/quad.hpp"
#include "kslab/special.hpp"

using namespace kslab;

TEST_CASE("geometric grid invariants") {
    auto g = RadialGrid::geometric(1e-5, 1e3, 64.0, Variable::soliton);
    g.validate();
    CHECK(g.front() > 0.0);
    CHECK(g.back() >= 1e3);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
    // at least ppd nodes in every decade of the covered range
    for (double lo = 1e-5; lo * 10.0 <= g.back(); lo *= 10.0) {
        std::size_t count = 0;
        for (double x : g.nodes)
            if (x >= lo && x < lo * 10.0) ++count;
        CHECK(count >= 64);
    }
}

TEST_CASE("grid validate rejects bad node sets") {
    RadialGrid g;
    g.nodes = {1.0, 0.5};
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.nodes = {0.0, 1.0};
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("pchip reproduces linear data and stays monotone") {
    std::vector<double> x{0.0, 0.5, 1.0, 2.0, 4.0}, y(5);
    for (int i = 0; i < 5; ++i) y[i] = 3.0 * x[i] - 1.0;
    Pchip p(x, y);
    for (double t = 0.0; t <= 4.0; t += 0.37) {
        CHECK(p(t) == doctest::Approx(3.0 * t - 1.0).epsilon(1e-12));
        CHECK(p.deriv(t) == doctest::Approx(3.0).epsilon(1e-10));
    }
    // monotone data: interpolant has no overshoot
    std::vector<double> ym{0.0, 0.1, 0.9, 1.0, 1.0};
    Pchip pm(x, ym);
    double prev = pm(0.0);
    for (double t = 0.01; t <= 4.0; t += 0.01) {
        double v = pm(t);
        CHECK(v >= prev - 1e-12);
        CHECK(v <= 1.0 + 1e-12);
        prev = v;
    }
}

TEST_CASE("pchip integral against adaptive quadrature") {
    auto f = [](double t) { return std::exp(-t) * (1.0 + t); };
    std::vector<double> x, y;
    for (double t = 0.0; t <= 6.0; t += 0.05) {
        x.push_back(t);
        y.push_back(f(t));
    }
    Pchip p(x, y);
    double ref = quad::adaptive(f, 0.3, 5.1, 1e-12);
    CHECK(p.integrate(0.3, 5.1) == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("gauss rule is exact on polynomials") {
    // 7-point Gauss-Legendre integrates degree <= 13 exactly
    auto f = [](double t) { return std::pow(t, 13) - 2.0 * std::pow(t, 8) + t; };
    double exact = (std::pow(2.0, 14) - 1.0) / 14.0 - 2.0 * (std::pow(2.0, 9) + 1.0) / 9.0 +
                   (4.0 - 1.0) / 2.0;
    CHECK(quad::gauss(f, -1.0, 2.0) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("composite and adaptive quadrature on a smooth integrand") {
    auto g = RadialGrid::geometric(1e-4, 50.0, 64.0, Variable::soliton);
    auto f = [](double t) { return t * std::exp(-t); };
    double exact = 1.0 - 51.0 * std::exp(-50.0);
    CHECK(quad::over_grid(f, g.nodes, 0.0, 50.0) == doctest::Approx(exact).epsilon(1e-10));
    CHECK(quad::adaptive(f, 0.0, 50.0, 1e-12) == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("cumulative integral endpoints") {
    auto g = RadialGrid::geometric(1e-3, 10.0, 64.0, Variable::soliton);
    auto f = [](double t) { return 2.0 * t; };
    auto c = quad::cumulative(f, g.nodes);
    REQUIRE(c.size() == g.size());
    CHECK(c.front() == 0.0);
    double span = g.back() * g.back() - g.front() * g.front();
    CHECK(c.back() == doctest::Approx(span).epsilon(1e-12));
}

TEST_CASE("algebraic tail value and divergence guard") {
    // f ~ A x^-4 with f(10) = 1e-4 => A = 1, tail = 1/(3*10^3)
    CHECK(quad::algebraic_tail(1e-4, 10.0, 4.0) == doctest::Approx(1.0 / 3000.0).epsilon(1e-12));
    CHECK_THROWS_AS(quad::algebraic_tail(1.0, 10.0, 1.0), TailDivergence);
}

TEST_CASE("cutoff plateau and support") {
    CHECK(cutoff::chi(0.0) == 1.0);
    CHECK(cutoff::chi(1.0) == 1.0);
    CHECK(cutoff::chi(-0.7) == 1.0);
    CHECK(cutoff::chi(2.0) == 0.0);
    CHECK(cutoff::chi(5.0) == 0.0);
    CHECK(cutoff::chi(1.5) > 0.0);
    CHECK(cutoff::chi(1.5) < 1.0);
}

TEST_CASE("cutoff derivatives match finite differences") {
    const double h = 1e-5;
    for (double x : {1.1, 1.37, 1.62, 1.9, -1.3, -1.77}) {
        double fd1 = (cutoff::chi(x + h) - cutoff::chi(x - h)) / (2.0 * h);
        double fd2 = (cutoff::chi(x + h) - 2.0 * cutoff::chi(x) + cutoff::chi(x - h)) / (h * h);
        CHECK(cutoff::dchi(x) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(cutoff::d2chi(x) == doctest::Approx(fd2).epsilon(1e-4));
    }
}

TEST_CASE("cutoff config plateaus and validation") {
    CutoffConfig c;
    c.nu = 1e-3;
    c.validate();
    const double l = c.log_nu_abs();
    CHECK(c.chi_nu(0.5 * l) == 1.0);
    CHECK(c.chi_nu(2.0 * l) == 0.0);
    CHECK(c.chi_m(c.zeta_m) == 1.0);
    CHECK(c.chi_m(2.0 * c.zeta_m) == 0.0);
    CHECK(c.chi_star_big(c.zeta_star_big) == 1.0);
    CHECK(c.chi_bar_nu(0.5 * l / c.nu) == 1.0);
    CHECK(c.chi_bar_nu(2.0 * l / c.nu) == 0.0);

    CutoffConfig bad = c;
    bad.nu = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.zeta_star_big = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("weight spec range and consistency") {
    WeightSpec w{0.5, 1e-2};
    CHECK(w.rho_nu(0.0) == 1.0);
    for (double z : {0.1, 1.0, 5.0, 20.0}) {
        CHECK(w.rho_nu(z) > 0.0);
        CHECK(w.rho_nu(z) <= 1.0);
        // rho(gamma) at gamma = z/nu equals rho_nu(z)
        CHECK(w.rho_gamma(z / w.nu) == doctest::Approx(w.rho_nu(z)).epsilon(1e-13));
    }
}

TEST_CASE("scaled exponential integrals against boost across the switch") {
    for (double z : {0.05, 0.5, 1.0, 3.9, 4.1, 10.0, 50.0, 400.0}) {
        double e1 = std::exp(z) * boost::math::expint(1, z);
        double e2 = std::exp(z) * (std::exp(-z) - z * boost::math::expint(1, z)); // E2 = e^-z - z E1
        CHECK(expE1_scaled(z) == doctest::Approx(e1).epsilon(1e-12));
        CHECK(expE2_scaled(z) == doctest::Approx(e2).epsilon(1e-10));
    }
}

TEST_CASE("radial field sampling stays finite and interpolates") {
    auto g = RadialGrid::geometric(1e-3, 100.0, 64.0, Variable::parabolic);
    auto f = RadialField::sample(g, [](double z) { return 1.0 / (1.0 + z * z); });
    f.check_finite();
    CHECK(f(1.0) == doctest::Approx(0.5).epsilon(1e-4));
    auto bad = f;
    bad.values[3] = std::nan("");
    CHECK_THROWS_AS(bad.check_finite(), RuntimeError);
}
