#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kslab/errors.hpp"
#include "kslab/modulation.hpp"
#include "kslab/quad.hpp"

using namespace kslab;

namespace {
const double kBeta = 0.5;
}

TEST_CASE("modulation residuals on the reduced branch") {
    // a = 8 nu^2, a_tau = 8 nu^2 beta/log nu, nu_tau/nu = beta/(2 log nu)
    for (double nu : {1e-1, 1e-2, 1e-4}) {
        ModulationState s;
        s.nu = nu;
        s.a = 8.0 * nu * nu;
        const double ln = std::log(nu);
        const double a_tau = 8.0 * nu * nu * kBeta / ln;
        const double nu_tau = nu * kBeta / (2.0 * ln);
        auto [m0, m1] = modulation_residuals(s, a_tau, nu_tau, kBeta);
        CHECK(std::abs(m1) <= 1e-14 * std::abs(a_tau));
        CHECK(m0 == doctest::Approx(-8.0 * kBeta * nu * nu / ln).epsilon(1e-12));
    }
}

TEST_CASE("modulation residuals at the origin of parameter space") {
    ModulationState s;
    s.nu = 0.1;
    s.a = 0.0;
    auto [m0, m1] = modulation_residuals(s, 0.0, 0.0, kBeta);
    CHECK(m0 == doctest::Approx(16.0 * 0.01 * kBeta).epsilon(1e-14));
    CHECK(m1 == 0.0);
}

TEST_CASE("a_tau cancels in the sum of residuals") {
    ModulationState s;
    s.nu = 0.03;
    s.a = 0.7;
    s.drift = 0.1;
    auto [p0, p1] = modulation_residuals(s, 2.5, 0.01, kBeta);
    auto [q0, q1] = modulation_residuals(s, -9.0, 0.01, kBeta);
    CHECK(p0 + p1 == doctest::Approx(q0 + q1).epsilon(1e-12));
}

TEST_CASE("reduced law matches the closed form") {
    auto r = integrate_reduced_law(100.0, kBeta, 200.0);
    REQUIRE(!r.exact.states.empty());
    REQUIRE(r.exact.states.size() == r.numeric.states.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < r.exact.states.size(); ++i) {
        const auto& e = r.exact.states[i];
        CHECK(e.nu == doctest::Approx(std::exp(-std::sqrt(kBeta * e.tau + 100.0))).epsilon(1e-14));
        // log^2 nu - log^2 nu(0) - beta tau = 0 on the reduced branch
        CHECK(e.log2nu() - 100.0 - kBeta * e.tau == doctest::Approx(0.0).epsilon(1e-9));
        worst = std::max(worst, std::abs(r.numeric.states[i].nu / e.nu - 1.0));
    }
    CHECK(worst <= 1e-8);
    // tau = 56: nu = e^{-sqrt(128)}
    bool seen = false;
    for (const auto& s : r.exact.states)
        if (std::abs(s.tau - 56.0) < 1e-9) {
            CHECK(s.nu == doctest::Approx(std::exp(-std::sqrt(128.0))).epsilon(1e-13));
            seen = true;
        }
    CHECK(seen);
}

TEST_CASE("full two-equation branch tracks the law over moderate horizons") {
    auto r = integrate_reduced_law(100.0, kBeta, 3.0, 0.25);
    REQUIRE(r.full.states.size() == r.exact.states.size());
    for (std::size_t i = 0; i < r.full.states.size(); ++i)
        CHECK(r.full.states[i].nu == doctest::Approx(r.exact.states[i].nu).epsilon(1e-4));
}

TEST_CASE("blowup scale converter") {
    const double M0 = 1.0;
    CHECK(blowup_scale(0.0, 1.0, M0, kBeta) ==
          doctest::Approx(std::exp(-std::sqrt(M0))).epsilon(1e-13));
    // t -> T: log(lambda/sqrt(T-t)) / sqrt(|log(T-t)|/2) -> -1
    const double Tmt = 1e-12;
    double lam = blowup_scale(1.0 - Tmt, 1.0, M0, kBeta);
    double ratio = std::log(lam / std::sqrt(Tmt)) / std::sqrt(std::abs(std::log(Tmt)) / 2.0);
    CHECK(ratio == doctest::Approx(-1.0).epsilon(0.05));
    // monotone decrease in t
    double prev = blowup_scale(0.0, 1.0, 4.0, kBeta);
    for (double t : {0.2, 0.5, 0.9, 0.99, 0.9999}) {
        double v = blowup_scale(t, 1.0, 4.0, kBeta);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(blowup_scale(1.0, 1.0, M0, kBeta), ConfigError);
}

TEST_CASE("shooting returns zero for zero forcing") {
    auto r = shoot_trapped_a([](double) { return 0.0; }, kBeta, reduced_band(10.0, 100.0, kBeta));
    CHECK(std::abs(r.a0) <= 1e-12);
}

TEST_CASE("shooting matches the variation-of-constants oracle") {
    const double M0 = 100.0;
    auto f = [=](double tau) {
        const double s = std::sqrt(kBeta * tau + M0);
        return std::exp(-2.0 * s) / s;
    };
    auto r = shoot_trapped_a(f, kBeta, reduced_band(10.0, M0, kBeta));
    double oracle =
        -quad::adaptive([&](double s) { return std::exp(-2.0 * kBeta * s) * f(s); }, 0.0, 400.0,
                        1e-13);
    CHECK(r.a0 == doctest::Approx(oracle).epsilon(1e-6));
    // opposite exit signs at the band endpoints
    CHECK(r.exit_signs[0] * r.exit_signs[1] == -1);
    CHECK(r.iterations <= 70);
}

TEST_CASE("shooting is antisymmetric in the forcing") {
    const double M0 = 100.0;
    auto f = [=](double tau) {
        const double s = std::sqrt(kBeta * tau + M0);
        return 0.5 * std::exp(-2.0 * s) / s;
    };
    auto fp = shoot_trapped_a(f, kBeta, reduced_band(10.0, M0, kBeta));
    auto fm = shoot_trapped_a([&](double t) { return -f(t); }, kBeta,
                              reduced_band(10.0, M0, kBeta));
    CHECK(fp.a0 == doctest::Approx(-fm.a0).epsilon(1e-9));
}

TEST_CASE("shooting flags a forcing that violates the dichotomy") {
    const double M0 = 100.0;
    // forcing far above the band: both endpoints blow out on the same side
    auto band = reduced_band(1.0, M0, kBeta);
    auto f = [&](double tau) { return 100.0 * band(tau); };
    CHECK_THROWS_AS(shoot_trapped_a(f, kBeta, band), NoSignChange);
}

TEST_CASE("bootstrap check passes on the reduced law") {
    auto r = integrate_reduced_law(100.0, kBeta, 50.0);
    auto& t = r.exact;
    t.norms.assign(t.states.size(), {0.0, 0.0, 0.0, 0.0});
    BootstrapParams p;
    auto rep = bootstrap_check(t, p);
    CHECK(rep.pass());
}

TEST_CASE("bootstrap check flags a frozen scale at the predicted time") {
    const double M0 = 100.0, K1 = 1.5;
    auto r = integrate_reduced_law(M0, kBeta, 200.0, 0.01);
    Trajectory t = r.exact;
    const double nu0 = std::exp(-std::sqrt(M0));
    for (auto& s : t.states) {
        s.nu = nu0; // frozen
        s.a = 8.0 * nu0 * nu0;
    }
    BootstrapParams p;
    p.M0 = M0;
    auto rep = bootstrap_check(t, p);
    REQUIRE(rep.first_violation[0].has_value());
    // crossing time: K1 e^{-sqrt(beta tau + M0)} = nu0
    const double tau_pred =
        (std::pow(std::log(K1) + std::sqrt(M0), 2.0) - M0) / kBeta;
    CHECK(*rep.first_violation[0] == doctest::Approx(tau_pred).epsilon(0.02));
}

TEST_CASE("bootstrap check flags a vanishing modulation parameter immediately") {
    auto r = integrate_reduced_law(100.0, kBeta, 10.0);
    Trajectory t = r.exact;
    for (auto& s : t.states) s.a = 0.0;
    BootstrapParams p; // K2 = 10 < 8 |log nu(0)| = 80
    auto rep = bootstrap_check(t, p);
    REQUIRE(rep.first_violation[1].has_value());
    CHECK(*rep.first_violation[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("trajectory csv round trip of the header and values") {
    auto r = integrate_reduced_law(100.0, kBeta, 5.0);
    const std::string path = "traj_test.csv";
    r.exact.save_csv(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "tau,nu,a,drift,log2nu,atilde");
    double tau, nu, a, drift, l2, at;
    char c;
    in >> tau >> c >> nu >> c >> a >> c >> drift >> c >> l2 >> c >> at;
    CHECK(tau == r.exact.states[0].tau);
    CHECK(nu == r.exact.states[0].nu);
    CHECK(l2 == doctest::Approx(r.exact.states[0].log2nu()).epsilon(1e-15));
    in.close();
    std::filesystem::remove(path);
}

TEST_CASE("shoot result json export") {
    auto r = shoot_trapped_a([](double) { return 0.0; }, kBeta, reduced_band(10.0, 100.0, kBeta));
    const std::string path = "shoot_test.json";
    r.save_json(path);
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("a0") != std::string::npos);
    CHECK(all.find("exit_signs") != std::string::npos);
    in.close();
    std::filesystem::remove(path);
}
