// kslab command line: field exports, eigenfunction builds and scans,
// modulation studies, PDE runs and fits, plot-data emission.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kslab/errors.hpp"
#include "kslab/harness.hpp"
#include "kslab/io.hpp"
#include "kslab/sim.hpp"

using namespace kslab;

namespace {

int finish(const RunManifest& man) {
    for (const auto& p : man.probes)
        std::printf("%-32s %s  value=%.6g bound=%.6g\n", p.name.c_str(),
                    p.pass ? "PASS" : "FAIL", p.value, p.bound);
    std::printf("manifest: %s\n", man.pass() ? "pass" : "fail");
    return man.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for ring blowup in 3D Keller-Segel"};
    app.require_subcommand(0, 1);
    // global flags remain valid after any subcommand
    std::function<void(CLI::App*)> allow_global = [&](CLI::App* a) {
        a->fallthrough();
        for (auto* s : a->get_subcommands([](const CLI::App*) { return true; }))
            allow_global(s);
    };

    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    double tol_scale = 1.0;
    app.add_option("--config", config_path, "experiment config JSON");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for randomized probes");
    app.add_option("--tol-scale", tol_scale, "probe tolerance multiplier");

    // fields
    auto* fields = app.add_subcommand("fields", "export profile and building-block fields");
    double ppd = 64.0, gamma_max = 2e3;
    fields->add_option("--ppd", ppd);
    fields->add_option("--gamma-max", gamma_max);

    // spectral build | scan
    auto* spectral = app.add_subcommand("spectral", "approximate eigenfunctions");
    auto* sbuild = spectral->add_subcommand("build", "one (i, nu) eigen pair");
    auto* sscan = spectral->add_subcommand("scan", "scan over a nu list");
    double nu = 1e-2, zeta_match = 4.0, sppd = 128.0;
    int eig_i = 0;
    std::string nu_list = "1e-2,1e-3,1e-4";
    sbuild->add_option("--nu", nu);
    sbuild->add_option("--i", eig_i);
    sbuild->add_option("--ppd", sppd);
    sbuild->add_option("--zeta-match", zeta_match);
    sscan->add_option("--nu-list", nu_list);
    sscan->add_option("--i", eig_i);
    sscan->add_option("--ppd", sppd);
    sscan->add_option("--zeta-match", zeta_match);

    // modulation reduced | shoot | check
    auto* modulation = app.add_subcommand("modulation", "modulation ODE studies");
    auto* mreduced = modulation->add_subcommand("reduced", "reduced blowup law");
    auto* mshoot = modulation->add_subcommand("shoot", "unstable-direction shooting");
    auto* mcheck = modulation->add_subcommand("check", "bootstrap-regime check");
    double M0 = 100.0, tau_end = 200.0, beta = 0.5, K2 = 10.0, fc = 1.0;
    mreduced->add_option("--M0", M0);
    mreduced->add_option("--tau-end", tau_end);
    mreduced->add_option("--beta", beta);
    mshoot->add_option("--M0", M0);
    mshoot->add_option("--K2", K2);
    mshoot->add_option("--c", fc);
    mcheck->add_option("--M0", M0);
    mcheck->add_option("--tau-end", tau_end);

    // sim run | fit
    auto* sim = app.add_subcommand("sim", "direct PDE simulation");
    auto* srun = sim->add_subcommand("run", "radial2d run");
    auto* sfit = sim->add_subcommand("fit", "scale fit of a saved snapshot");
    int cells = 256;
    double extent = 30.0, t_end = 1.0, amp = 1.0;
    std::string init = "profile", stepper = "euler", snapshot_path;
    srun->add_option("--n", cells);
    srun->add_option("--extent", extent);
    srun->add_option("--t-end", t_end);
    srun->add_option("--init", init);
    srun->add_option("--amp", amp);
    srun->add_option("--stepper", stepper);
    sfit->add_option("--snapshot", snapshot_path)->required();

    // report
    auto* report = app.add_subcommand("report", "emit plot data from a manifest");
    std::string manifest_path;
    report->add_option("--manifest", manifest_path)->required();

    allow_global(&app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*report) {
            auto man = RunManifest::load(manifest_path);
            man.verify();
            for (const auto& p : emit_plot_data(man, out_dir))
                std::printf("wrote %s\n", p.c_str());
            return 0;
        }
        if (*sfit) {
            const auto f = io::load_field(snapshot_path);
            const double lam = fit_scale(f);
            const auto d = profile_distance(f, lam);
            std::printf("lambda_fit=%.17g sup_local=%.17g e_norm=%.17g\n", lam,
                        d.sup_local, d.e_norm);
            return 0;
        }

        ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = ExperimentConfig::load(config_path);
        } else if (*fields) {
            cfg.kind = "fields";
            cfg.params = {{"ppd", ppd}, {"gamma_max", gamma_max}};
        } else if (*sbuild) {
            cfg.kind = "spectral_build";
            cfg.params = {{"nu", nu}, {"i", eig_i}, {"ppd", sppd}, {"zeta_match", zeta_match}};
        } else if (*sscan) {
            cfg.kind = "eigen_scan";
            nlohmann::json list = nlohmann::json::array();
            std::istringstream ls(nu_list);
            std::string tok;
            while (std::getline(ls, tok, ',')) list.push_back(std::stod(tok));
            cfg.params = {{"nu_list", list}, {"i", eig_i}, {"ppd", sppd},
                          {"zeta_match", zeta_match}};
        } else if (*mreduced) {
            cfg.kind = "modulation_reduced";
            cfg.params = {{"M0", M0}, {"tau_end", tau_end}, {"beta", beta}};
        } else if (*mshoot) {
            cfg.kind = "modulation_shoot";
            cfg.params = {{"M0", M0}, {"K2", K2}, {"c", fc}};
        } else if (*mcheck) {
            cfg.kind = "modulation_check";
            cfg.params = {{"M0", M0}, {"tau_end", tau_end}};
        } else if (*srun) {
            cfg.kind = "sim_radial";
            cfg.params = {{"n", cells},   {"extent", extent},   {"t_end", t_end},
                          {"init", init}, {"amp", amp},         {"stepper", stepper}};
        } else {
            std::cerr << app.help();
            return 2;
        }
        cfg.out_dir = out_dir;
        cfg.seed = seed;
        cfg.tol_scale = tol_scale;
        return finish(run_experiment(cfg));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}
