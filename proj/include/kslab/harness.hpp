#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kslab {

// Experiment registry: eigen_scan, spectral_build, modulation_reduced,
// modulation_shoot, modulation_check, sim_radial, fields.
struct ExperimentConfig {
    std::string kind;
    nlohmann::json params = nlohmann::json::object();
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    double tol_scale = 1.0;

    // Lossless round trip; unknown keys rejected with ConfigInvalid.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static ExperimentConfig load(const std::string& path);
    void save(const std::string& path) const;

    std::uint64_t hash() const;
};

struct ManifestFile {
    std::string path;
    std::uint64_t checksum = 0;
};

struct ProbeResult {
    std::string name;
    bool pass = false;
    double value = 0.0, bound = 0.0;
};

struct RunManifest {
    std::uint64_t config_hash = 0;
    std::string artifact_version;
    std::string started, finished; // UTC timestamps
    std::vector<ManifestFile> files;
    std::vector<ProbeResult> probes;

    bool pass() const;
    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
    void verify() const; // recompute checksums; throws RuntimeError on mismatch
};

RunManifest run_experiment(const ExperimentConfig& cfg);

// Gnuplot-friendly series derived from the run outputs listed in the
// manifest: lambda_vs_time.dat, match_gap.dat, residual_vs_nu.dat,
// mass_drift.dat. Throws SeriesMissing when no series applies.
std::vector<std::string> emit_plot_data(const RunManifest& m, const std::string& dir);

} // namespace kslab
