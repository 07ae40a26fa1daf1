#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kslab/axisym.hpp"
#include "kslab/errors.hpp"
#include "kslab/harness.hpp"
#include "kslab/io.hpp"
#include "kslab/profile.hpp"

using namespace kslab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path p;
    explicit TempDir(const std::string& name) : p(fs::temp_directory_path() / name) {
        fs::remove_all(p);
        fs::create_directories(p);
    }
    ~TempDir() { fs::remove_all(p); }
    std::string s() const { return p.string(); }
    std::string operator/(const std::string& f) const { return (p / f).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(KSLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("radial field text round trip is exact") {
    TempDir d("kslab_io_field");
    for (auto tag : {Variable::soliton, Variable::parabolic}) {
        auto g = RadialGrid::geometric(1e-3, 50.0, 48.0, tag);
        auto f = RadialField::sample(g, profile::U);
        const std::string p = d / "f.dat";
        io::save_field(f, p);
        auto f2 = io::load_field(p);
        REQUIRE(f2.size() == f.size());
        CHECK(f2.grid.tag == tag);
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(f2.grid.nodes[i] == f.grid.nodes[i]);
            CHECK(f2.values[i] == f.values[i]);
        }
    }
}

TEST_CASE("field loader rejects a corrupted header") {
    TempDir d("kslab_io_badhdr");
    const std::string p = d / "bad.dat";
    std::ofstream(p) << "# variable=theta n=2\n0,1\n1,2\n";
    CHECK_THROWS_AS(io::load_field(p), RuntimeError);
    std::ofstream(p) << "# variable=gamma n=3\n0,1\n1,2\n";
    CHECK_THROWS_AS(io::load_field(p), RuntimeError);
}

TEST_CASE("fnv1a known vectors") {
    CHECK(io::fnv1a(std::string{}) == 14695981039346656037ull);
    CHECK(io::fnv1a(std::string{"a"}) == 0xaf63dc4c8601ec8cull);
    CHECK(io::fnv1a(std::string{"foobar"}) == 0x85944171f73967e8ull);
    TempDir d("kslab_io_fnv");
    const std::string p = d / "h.bin";
    std::ofstream(p, std::ios::binary) << "foobar";
    CHECK(io::fnv1a_file(p) == 0x85944171f73967e8ull);
}

TEST_CASE("axisym binary container round trip") {
    TempDir d("kslab_io_ksax");
    AxisymField e({1.0, 2.0, 3.5}, {0.25, 0.75}, true);
    for (std::size_t i = 0; i < e.nr(); ++i)
        for (std::size_t j = 0; j < e.nz(); ++j) e.at(i, j) = 10.0 * i + j + 0.125;
    const std::string p = d / "e.ksax";
    e.save(p);
    auto e2 = AxisymField::load(p);
    CHECK(e2.even_in_z == e.even_in_z);
    CHECK(e2.r_nodes == e.r_nodes);
    CHECK(e2.z_nodes == e.z_nodes);
    CHECK(e2.values == e.values);
    // corrupt the magic
    std::fstream fix(p, std::ios::in | std::ios::out | std::ios::binary);
    fix.write("XXXX", 4);
    fix.close();
    CHECK_THROWS_AS(AxisymField::load(p), RuntimeError);
}

TEST_CASE("experiment config round trip and validation") {
    ExperimentConfig c;
    c.kind = "modulation_reduced";
    c.params = {{"M0", 64.0}, {"tau_end", 10.0}};
    c.out_dir = "somewhere";
    c.seed = 42;
    c.tol_scale = 2.5;
    auto c2 = ExperimentConfig::from_json(c.to_json());
    CHECK(c2.to_json() == c.to_json());
    CHECK(c2.hash() == c.hash());

    auto j = c.to_json();
    j["extra"] = 1;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigInvalid);
    j = c.to_json();
    j["kind"] = "";
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigInvalid);
    j = c.to_json();
    j["tol_scale"] = 0.0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigInvalid);

    TempDir d("kslab_cfg");
    c.save(d / "c.json");
    auto c3 = ExperimentConfig::load(d / "c.json");
    CHECK(c3.hash() == c.hash());
    std::ofstream(d / "junk.json") << "{ not json";
    CHECK_THROWS_AS(ExperimentConfig::load(d / "junk.json"), ConfigInvalid);
}

TEST_CASE("manifest round trip, verification and tamper detection") {
    TempDir d("kslab_manifest");
    const std::string data = d / "data.csv";
    std::ofstream(data) << "t,mass\n0,1\n";
    RunManifest m;
    m.config_hash = 0xdeadbeefull;
    m.artifact_version = "kslab 0.1.0";
    m.started = "2026-01-01T00:00:00Z";
    m.finished = "2026-01-01T00:00:01Z";
    m.files.push_back({data, io::fnv1a_file(data)});
    m.probes.push_back({"p", true, 0.5, 1.0});
    const std::string mp = d / "manifest.json";
    m.save(mp);
    auto m2 = RunManifest::load(mp);
    CHECK(m2.config_hash == m.config_hash);
    CHECK(m2.files.size() == 1);
    CHECK(m2.files[0].checksum == m.files[0].checksum);
    CHECK(m2.probes[0].pass);
    CHECK(m2.pass());
    m2.verify();
    // tamper with the tracked file
    std::ofstream(data, std::ios::app) << "1,2\n";
    CHECK_THROWS_AS(m2.verify(), RuntimeError);
    fs::remove(data);
    CHECK_THROWS_AS(m2.verify(), RuntimeError);
}

TEST_CASE("reduced-law experiment runs, passes and reproduces bytewise") {
    TempDir d1("kslab_run_a"), d2("kslab_run_b");
    ExperimentConfig c;
    c.kind = "modulation_reduced";
    c.params = {{"M0", 100.0}, {"tau_end", 20.0}};
    c.out_dir = d1.s();
    auto m1 = run_experiment(c);
    CHECK(m1.pass());
    m1.verify();
    CHECK(fs::exists(d1 / "modulation_trajectory.csv"));
    CHECK(fs::exists(d1 / "manifest.json"));
    c.out_dir = d2.s();
    auto m2 = run_experiment(c);
    CHECK(slurp(d1 / "modulation_trajectory.csv") == slurp(d2 / "modulation_trajectory.csv"));
    CHECK(slurp(d1 / "modulation_full_branch.csv") == slurp(d2 / "modulation_full_branch.csv"));

    // plot data from the manifest
    auto made = emit_plot_data(m1, d1 / "plots");
    REQUIRE(!made.empty());
    CHECK(fs::exists(d1 / "plots/lambda_vs_time.dat"));

    RunManifest empty;
    CHECK_THROWS_AS(emit_plot_data(empty, d1 / "plots2"), SeriesMissing);
}

TEST_CASE("fields experiment exports the block library") {
    TempDir d("kslab_run_fields");
    ExperimentConfig c;
    c.kind = "fields";
    c.params = {{"ppd", 48.0}, {"gamma_max", 2e3}};
    c.out_dir = d.s();
    auto m = run_experiment(c);
    CHECK(m.pass());
    for (const char* f : {"U.dat", "LamU.dat", "PsiU.dat", "V2.dat", "V4t.dat"})
        CHECK(fs::exists(d / f));
    // exported profile reloads to the sampled values
    auto U = io::load_field(d / "U.dat");
    CHECK(U.values[0] == profile::U(U.grid.nodes[0]));
}

TEST_CASE("spectral build experiment saves an eigen pair") {
    TempDir d("kslab_run_spec");
    ExperimentConfig c;
    c.kind = "spectral_build";
    c.params = {{"nu", 1e-2}, {"i", 0.0}, {"ppd", 64.0}, {"zeta_match", 4.0}};
    c.out_dir = d.s();
    auto m = run_experiment(c);
    CHECK(m.pass());
    CHECK(fs::exists(d / "eigen_i0_nu0.01.json"));
    CHECK(fs::exists(d / "eigen_i0_nu0.01_phi.dat"));
    CHECK(fs::exists(d / "eigen_i0_nu0.01_residual.dat"));
    CHECK(fs::exists(d / "match_gap.csv"));
    auto phi = io::load_field(d / "eigen_i0_nu0.01_phi.dat");
    CHECK(phi.grid.tag == Variable::parabolic);
}

TEST_CASE("unknown experiment kind is a config error") {
    ExperimentConfig c;
    c.kind = "warp_drive";
    c.out_dir = fs::temp_directory_path() / "kslab_badkind";
    CHECK_THROWS_AS(run_experiment(c), ConfigInvalid);
    fs::remove_all(c.out_dir);
}

TEST_CASE("cli exit codes") {
    TempDir d("kslab_cli");
    // no subcommand: usage error
    CHECK(run_cli("") == 2);
    // successful reduced-law run
    CHECK(run_cli("modulation reduced --tau-end 20 --out " + (d / "ok")) == 0);
    // probe failure when the tolerance scale is squeezed
    CHECK(run_cli("modulation reduced --tau-end 20 --tol-scale 1e-12 --out " +
                  (d / "fail")) == 1);
    // malformed config file
    std::ofstream(d / "bad.json") << "{\"kind\":\"modulation_reduced\",\"bogus\":1}";
    CHECK(run_cli("--config " + (d / "bad.json") + " --out " + (d / "cfg")) == 2);
    // runtime error: report on a missing manifest
    CHECK(run_cli("report --manifest " + (d / "missing.json")) == 3);
    // report on the successful run emits plot data
    CHECK(run_cli("report --manifest " + (d / "ok/manifest.json") + " --out " +
                  (d / "plots")) == 0);
    CHECK(fs::exists(d / "plots/lambda_vs_time.dat"));
}
