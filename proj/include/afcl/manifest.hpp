#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "afcl/data.hpp"
#include "afcl/orchestrator.hpp"

namespace afcl {

class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SynthSource {
    std::size_t blobs = 4;
    std::size_t n = 2300;
    std::size_t d = 2;
    double stddev = 0.02;
    double min_gap = 0.3;
    std::optional<std::uint64_t> seed;  // falls back to the manifest seed
    bool per_trial = false;  // fresh draw per trial from the trial seed; excludes `seed`
};

struct DatasetSource {
    std::optional<std::filesystem::path> path;  // exactly one of path / synth
    std::optional<SynthSource> synth;
    bool has_header = true;
    std::optional<std::size_t> label_column;
    bool normalize = true;
};

// Either fixed per-client probabilities, or a range each trial draws from.
struct ParticipationSource {
    std::vector<double> probabilities;
    double low = 0.2;
    double high = 1.0;
};

struct ExperimentManifest {
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::filesystem::path output_dir = "out";
    DatasetSource dataset;
    std::size_t clients = 3;
    std::optional<std::uint64_t> partition_seed;  // fixed split across trials when set
    ParticipationSource participation;
    std::optional<std::size_t> k_star;  // when set, k0 is drawn from [k*, 2k*] per trial
    RunConfig run;                      // schedule and rng_seed are filled per trial

    void validate() const;
};

// Relative dataset paths resolve against `base_dir`.
ExperimentManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentManifest load_manifest(const std::filesystem::path& path);

struct TrialPlan {
    std::uint64_t seed = 0;
    std::uint64_t partition_seed = 0;
    std::uint64_t data_seed = 0;  // used only by per-trial synthetic data
    RunConfig config;
};

// trial seed = derive_seed(manifest seed, trial stream, t); the partition,
// participation draws and k0 draw all derive from it.
TrialPlan plan_trial(const ExperimentManifest& m, std::size_t trial);

// Per-trial synthetic data needs the plan; everything else ignores it.
DataMatrix load_dataset(const ExperimentManifest& m, const TrialPlan* plan = nullptr);

std::string to_string(WinnerAnchor a);
std::string to_string(GammaMode g);
std::string to_string(ServerConfig::ObjectiveSource s);

}  // namespace afcl
