#include "kslab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kslab/blocks.hpp"
#include "kslab/eigen.hpp"
#include "kslab/errors.hpp"
#include "kslab/io.hpp"
#include "kslab/modulation.hpp"
#include "kslab/profile.hpp"
#include "kslab/quad.hpp"
#include "kslab/sim.hpp"

namespace kslab {

namespace fs = std::filesystem;
using nlohmann::json;

static const char* kArtifactVersion = "kslab 0.1.0";

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigInvalid("experiment config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (k != "kind" && k != "params" && k != "out_dir" && k != "seed" &&
            k != "tol_scale")
            throw ConfigInvalid("unknown config key: " + k);
    }
    ExperimentConfig c;
    if (!j.contains("kind") || !j["kind"].is_string() || j["kind"].get<std::string>().empty())
        throw ConfigInvalid("config needs a non-empty kind");
    c.kind = j["kind"].get<std::string>();
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ConfigInvalid("params must be an object");
        c.params = j["params"];
    }
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tol_scale")) {
        c.tol_scale = j["tol_scale"].get<double>();
        if (!(c.tol_scale > 0.0)) throw ConfigInvalid("tol_scale must be positive");
    }
    return c;
}

json ExperimentConfig::to_json() const {
    json j;
    j["kind"] = kind;
    j["params"] = params;
    j["out_dir"] = out_dir;
    j["seed"] = seed;
    j["tol_scale"] = tol_scale;
    return j;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

void ExperimentConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw OutputUnwritable("cannot open " + path);
    out << to_json().dump(2) << "\n";
}

std::uint64_t ExperimentConfig::hash() const { return io::fnv1a(to_json().dump()); }

bool RunManifest::pass() const {
    return std::all_of(probes.begin(), probes.end(),
                       [](const ProbeResult& p) { return p.pass; });
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t from_hex64(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

} // namespace

void RunManifest::save(const std::string& path) const {
    json j;
    j["config_hash"] = hex64(config_hash);
    j["artifact_version"] = artifact_version;
    j["started"] = started;
    j["finished"] = finished;
    j["files"] = json::array();
    for (const auto& f : files)
        j["files"].push_back({{"path", f.path}, {"checksum", hex64(f.checksum)}});
    j["probes"] = json::array();
    for (const auto& p : probes)
        j["probes"].push_back(
            {{"name", p.name}, {"pass", p.pass}, {"value", p.value}, {"bound", p.bound}});
    std::ofstream out(path);
    if (!out) throw OutputUnwritable("cannot open " + path);
    out << j.dump(2) << "\n";
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeError("cannot open manifest " + path);
    json j;
    in >> j;
    RunManifest m;
    m.config_hash = from_hex64(j.at("config_hash").get<std::string>());
    m.artifact_version = j.at("artifact_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    for (const auto& f : j.at("files"))
        m.files.push_back({f.at("path").get<std::string>(),
                           from_hex64(f.at("checksum").get<std::string>())});
    for (const auto& p : j.at("probes"))
        m.probes.push_back({p.at("name").get<std::string>(), p.at("pass").get<bool>(),
                            p.at("value").get<double>(), p.at("bound").get<double>()});
    return m;
}

void RunManifest::verify() const {
    for (const auto& f : files) {
        if (!fs::exists(f.path)) throw RuntimeError("manifest file missing: " + f.path);
        if (io::fnv1a_file(f.path) != f.checksum)
            throw RuntimeError("manifest checksum mismatch: " + f.path);
    }
}

namespace {

double pnum(const json& p, const char* key, double def) {
    if (!p.contains(key)) return def;
    if (!p[key].is_number()) throw ConfigInvalid(std::string("param ") + key + " must be numeric");
    return p[key].get<double>();
}

struct Collector {
    RunManifest& m;
    std::string dir;
    void file(const std::string& path) { m.files.push_back({path, io::fnv1a_file(path)}); }
    void probe(const std::string& name, double value, double bound) {
        m.probes.push_back({name, value <= bound, value, bound});
    }
};

BuildingBlockSet blocks_for(double nu, double zeta_match, double ppd) {
    const double hi = std::max(2.0e3, 4.2 * zeta_match / nu);
    return BuildingBlockSet::build(
        RadialGrid::geometric(1e-5, hi, ppd, Variable::soliton));
}

EigenPair build_pair(int i, double nu, double ppd, double zeta_match,
                     const BuildingBlockSet& blocks) {
    CutoffConfig cut;
    cut.nu = nu;
    cut.zeta_m = 1.0;
    return glue_eigenfunction(i, nu, cut, blocks, 0.5, ppd, zeta_match);
}

void run_fields(const ExperimentConfig& cfg, Collector& col) {
    const double ppd = pnum(cfg.params, "ppd", 64.0);
    const auto grid = RadialGrid::geometric(1e-5, pnum(cfg.params, "gamma_max", 2e3),
                                            ppd, Variable::soliton);
    const auto blocks = BuildingBlockSet::build(grid);
    auto put = [&](const char* name, const RadialField& f) {
        const std::string p = col.dir + "/" + name + ".dat";
        io::save_field(f, p);
        col.file(p);
    };
    put("U", RadialField::sample(grid, profile::U));
    put("LamU", RadialField::sample(grid, profile::LamU));
    put("PsiU", RadialField::sample(grid, profile::PsiU));
    put("V2", blocks.V2.field());
    put("V2t", blocks.V2t.field());
    put("V4sharp", blocks.V4sharp.field());
    put("V4sharpt", blocks.V4sharpt.field());
    put("V4", blocks.V4.field());
    put("V4t", blocks.V4t.field());
    const double g = 1e3;
    col.probe("V2_far_asymptotic", std::abs(g * g * blocks.V2.Wv(g) * profile::U(g) / 4.0 - 1.0),
              0.05);
}

void run_spectral(const ExperimentConfig& cfg, Collector& col, bool scan) {
    const int i = static_cast<int>(pnum(cfg.params, "i", 0.0));
    const double ppd = pnum(cfg.params, "ppd", 128.0);
    const double zm = pnum(cfg.params, "zeta_match", 4.0);
    std::vector<double> nus;
    if (scan) {
        if (cfg.params.contains("nu_list"))
            for (const auto& v : cfg.params["nu_list"]) nus.push_back(v.get<double>());
        else
            nus = {1e-2, 1e-3, 1e-4};
    } else {
        nus = {pnum(cfg.params, "nu", 1e-2)};
    }
    std::string table = "nu,inv_log_nu,sup_gap,partial_mass_residual\n";
    for (double nu : nus) {
        const auto blocks = blocks_for(nu, zm, ppd);
        const auto pair = build_pair(i, nu, ppd, zm, blocks);
        char stem[64];
        std::snprintf(stem, sizeof stem, "eigen_i%d_nu%g", i, nu);
        for (const auto& p : io::save_eigenpair(pair, col.dir, stem)) col.file(p);
        char row[160];
        std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g,%.17g\n", nu,
                      1.0 / std::abs(std::log(nu)), pair.match.sup_gap,
                      pair.partial_mass_residual);
        table += row;
        char pname[64];
        std::snprintf(pname, sizeof pname, "partial_mass_nu%g", nu);
        col.probe(pname, pair.partial_mass_residual * std::abs(std::log(nu)),
                  10.0 * cfg.tol_scale);
    }
    const std::string tp = col.dir + "/match_gap.csv";
    std::ofstream out(tp);
    if (!out) throw OutputUnwritable("cannot open " + tp);
    out << table;
    out.close();
    col.file(tp);
}

void run_modulation_reduced(const ExperimentConfig& cfg, Collector& col) {
    const double M0 = pnum(cfg.params, "M0", 100.0);
    const double beta = pnum(cfg.params, "beta", 0.5);
    const double tau_end = pnum(cfg.params, "tau_end", 200.0);
    const auto res = integrate_reduced_law(M0, beta, tau_end,
                                           pnum(cfg.params, "dtau_out", 0.25));
    const std::string tp = col.dir + "/modulation_trajectory.csv";
    res.numeric.save_csv(tp);
    col.file(tp);
    const std::string fp = col.dir + "/modulation_full_branch.csv";
    res.full.save_csv(fp);
    col.file(fp);
    double rel = 0.0;
    for (std::size_t k = 0; k < res.numeric.states.size(); ++k)
        rel = std::max(rel, std::abs(res.numeric.states[k].nu / res.exact.states[k].nu - 1.0));
    col.probe("reduced_law_rel_err", rel, 1e-8 * cfg.tol_scale);
}

void run_modulation_shoot(const ExperimentConfig& cfg, Collector& col) {
    const double M0 = pnum(cfg.params, "M0", 100.0);
    const double beta = pnum(cfg.params, "beta", 0.5);
    const double K2 = pnum(cfg.params, "K2", 10.0);
    const double c = pnum(cfg.params, "c", 1.0);
    auto f = [=](double tau) {
        const double s = std::sqrt(beta * tau + M0);
        return c * std::exp(-2.0 * s) / s;
    };
    const auto res = shoot_trapped_a(f, beta, reduced_band(K2, M0, beta));
    const std::string jp = col.dir + "/shoot.json";
    res.save_json(jp);
    col.file(jp);
    const std::string tp = col.dir + "/shoot_trapped.csv";
    res.trapped.save_csv(tp);
    col.file(tp);
    col.probe("shoot_sign_dichotomy",
              res.exit_signs[0] * res.exit_signs[1] < 0 ? 0.0 : 1.0, 0.5);
    // variation-of-constants cross check
    const double oracle = -quad::adaptive(
        [&](double s) { return std::exp(-2.0 * beta * s) * f(s); }, 0.0, 400.0, 1e-13);
    col.probe("shoot_vs_quadrature", std::abs(res.a0 / oracle - 1.0), 1e-6 * cfg.tol_scale);
}

void run_modulation_check(const ExperimentConfig& cfg, Collector& col) {
    BootstrapParams p;
    p.M0 = pnum(cfg.params, "M0", 100.0);
    p.beta = pnum(cfg.params, "beta", 0.5);
    const auto res = integrate_reduced_law(p.M0, p.beta,
                                           pnum(cfg.params, "tau_end", 200.0), 0.25);
    const auto rep = bootstrap_check(res.numeric, p);
    json j;
    j["families"] = json::array();
    for (const auto& v : rep.first_violation)
        j["families"].push_back(v ? json(*v) : json(nullptr));
    j["pass"] = rep.pass();
    const std::string jp = col.dir + "/bootstrap_report.json";
    std::ofstream out(jp);
    if (!out) throw OutputUnwritable("cannot open " + jp);
    out << j.dump(2) << "\n";
    out.close();
    col.file(jp);
    col.probe("bootstrap_families", rep.pass() ? 0.0 : 1.0, 0.5);
}

void run_sim_radial(const ExperimentConfig& cfg, Collector& col) {
    SimConfig sc;
    sc.geometry = Geometry::radial2d;
    sc.n = static_cast<int>(pnum(cfg.params, "n", 256.0));
    sc.extent = pnum(cfg.params, "extent", 30.0);
    sc.t_end = pnum(cfg.params, "t_end", 1.0);
    sc.dt_max = pnum(cfg.params, "dt_max", 0.05);
    sc.max_sup = pnum(cfg.params, "max_sup", 1e12);
    sc.min_lambda_cells = pnum(cfg.params, "min_lambda_cells", 10.0);
    if (cfg.params.contains("stepper") &&
        cfg.params["stepper"].get<std::string>() == "bdf2")
        sc.stepper = Stepper::imex_bdf2;
    const std::string init =
        cfg.params.contains("init") ? cfg.params["init"].get<std::string>() : "profile";
    const double amp = pnum(cfg.params, "amp", 1.0);
    std::function<double(double)> u0;
    if (init == "profile") {
        u0 = [amp](double r) { return amp * profile::U(r); };
    } else if (init == "gaussian") {
        const double mass = pnum(cfg.params, "mass", 4.0 * M_PI);
        const double sig = pnum(cfg.params, "sigma", 1.0);
        u0 = [=](double r) {
            return mass / (2.0 * M_PI * sig * sig) * std::exp(-0.5 * r * r / (sig * sig));
        };
    } else {
        throw ConfigInvalid("unknown init: " + init);
    }
    const auto run = run_radial2d(sc, u0);
    const std::string lp = col.dir + "/ledger.csv";
    run.save_ledger_csv(lp);
    col.file(lp);
    const std::string sp = col.dir + "/final_snapshot.dat";
    io::save_field(run.snapshots.back().second, sp);
    col.file(sp);
    const double m0 = run.ledger.front().mass;
    const double drift = std::abs(run.ledger.back().mass / m0 - 1.0);
    col.probe("mass_drift", drift,
              1e-6 * std::max<double>(1, run.steps / 1000) * cfg.tol_scale);
}

} // namespace

RunManifest run_experiment(const ExperimentConfig& cfg) {
    if (cfg.kind.empty()) throw ConfigInvalid("empty experiment kind");
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir))
        throw OutputUnwritable("cannot create output directory " + cfg.out_dir);

    RunManifest m;
    m.config_hash = cfg.hash();
    m.artifact_version = kArtifactVersion;
    m.started = utc_now();
    Collector col{m, cfg.out_dir};

    cfg.save(cfg.out_dir + "/config.json");
    col.file(cfg.out_dir + "/config.json");

    if (cfg.kind == "fields")
        run_fields(cfg, col);
    else if (cfg.kind == "spectral_build")
        run_spectral(cfg, col, false);
    else if (cfg.kind == "eigen_scan")
        run_spectral(cfg, col, true);
    else if (cfg.kind == "modulation_reduced")
        run_modulation_reduced(cfg, col);
    else if (cfg.kind == "modulation_shoot")
        run_modulation_shoot(cfg, col);
    else if (cfg.kind == "modulation_check")
        run_modulation_check(cfg, col);
    else if (cfg.kind == "sim_radial")
        run_sim_radial(cfg, col);
    else
        throw ConfigInvalid("unknown experiment kind: " + cfg.kind);

    m.finished = utc_now();
    m.save(cfg.out_dir + "/manifest.json");
    return m;
}

namespace {

std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeError("cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<std::string> emit_plot_data(const RunManifest& m, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw OutputUnwritable("cannot create plot directory " + dir);
    std::vector<std::string> made;
    auto has = [&](const std::string& needle) -> const ManifestFile* {
        for (const auto& f : m.files)
            if (f.path.find(needle) != std::string::npos) return &f;
        return nullptr;
    };
    char buf[160];

    if (const auto* f = has("trajectory.csv")) {
        // columns (T - t, lambda, sqrt(T - t) e^{-sqrt(|log(T-t)|/2)}) with T = 1
        const auto rows = read_csv(f->path);
        const std::string p = dir + "/lambda_vs_time.dat";
        std::ofstream out(p);
        if (!out) throw OutputUnwritable("cannot open " + p);
        for (const auto& r : rows) {
            const double Tmt = std::exp(-r[0]);
            const double lam = std::sqrt(Tmt) * r[1];
            const double ref =
                std::sqrt(Tmt) * std::exp(-std::sqrt(std::abs(std::log(Tmt)) / 2.0));
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", Tmt, lam, ref);
            out << buf;
        }
        made.push_back(p);
    }
    if (const auto* f = has("match_gap.csv")) {
        const auto rows = read_csv(f->path);
        const std::string p = dir + "/match_gap.dat";
        const std::string p2 = dir + "/residual_vs_nu.dat";
        std::ofstream out(p), out2(p2);
        if (!out || !out2) throw OutputUnwritable("cannot open plot outputs in " + dir);
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", r[1], r[2]);
            out << buf;
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", r[0], r[3]);
            out2 << buf;
        }
        made.push_back(p);
        made.push_back(p2);
    }
    if (const auto* f = has("ledger.csv")) {
        const auto rows = read_csv(f->path);
        const std::string p = dir + "/mass_drift.dat";
        std::ofstream out(p);
        if (!out) throw OutputUnwritable("cannot open " + p);
        const double m0 = rows.empty() ? 0.0 : rows.front()[1];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", r[0], r[1] - m0);
            out << buf;
        }
        made.push_back(p);
    }
    if (made.empty()) throw SeriesMissing("no plottable series in manifest");
    return made;
}

} // namespace kslab
