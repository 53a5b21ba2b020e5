#pragma once

// Experiment runner: config documents, multi-seed orchestration and the
// artifacts written for each run.
//
// Output directory layout:
//
//   manifest.json                  config, seeds, code version, artifact list
//   runs/<algorithm>_seed<N>.csv   per-episode metrics
//   aggregate_<algorithm>.csv      mean/std of moving success across seeds
//   cats/cat_seed<N>.json|.dot     final tree per dar_rl run
//   compare.csv                    side-by-side aggregate (compare only)

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "darrl/abstract_rl.hpp"
#include "darrl/environment.hpp"
#include "darrl/stats.hpp"

namespace darrl {

enum class Algorithm { dar_rl, q_learning };

std::string to_string(Algorithm a);

struct EnvSpec {
    std::string name = "wumpus";  // wumpus | example | office | taxi | waterworld
    int size = 8;
    double slip = 0.1;
    std::uint64_t layout_seed = 1;
    /// Grid worlds only. Unset keeps the environment's own convention:
    /// fixed north-west start for wumpus, random start for example.
    std::optional<bool> random_start;
};

struct ExperimentConfig {
    EnvSpec env;
    Algorithm algorithm = Algorithm::dar_rl;
    AgentConfig agent;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir;
    int workers = 0;  // 0 = OpenMP default
};

/// Command-line values; each one replaces the document field it names.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;  // replaces the seed list
    std::optional<std::string> env;
    std::optional<int> size;
    std::optional<int> episodes;
    std::optional<std::filesystem::path> out;
};

/// Builds a config from a JSON document. Precedence, lowest first: built-in
/// defaults, per-environment defaults (gamma, horizon, epsilon_start), the
/// document, then `overrides`. Throws ConfigError listing every problem.
ExperimentConfig parse_experiment_config(const nlohmann::json& document, const ConfigOverrides& overrides = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& file, const ConfigOverrides& overrides = {});

/// Normalized document; parsing it back yields the same config.
nlohmann::json to_json(const ExperimentConfig& config);

/// Throws ConfigError listing every problem.
void validate(const ExperimentConfig& config);

std::unique_ptr<Environment> make_environment(const EnvSpec& spec);

struct RunResult {
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::dar_rl;
    TrainStats stats;
    std::optional<Cat> cat;  // dar_rl only
};

/// Runs one seed; the run owns its environment and engine.
RunResult run_seed(const ExperimentConfig& config, std::uint64_t seed);

/// Runs every seed, `workers` at a time (serially when workers == 1).
std::vector<RunResult> run_all(const ExperimentConfig& config);

struct ArtifactSet {
    std::filesystem::path root;
    std::vector<std::filesystem::path> files;  // relative to root, write order
    std::vector<RunResult> runs;
};

/// Validates, runs every seed and writes the artifacts. Nothing is written
/// when the config is invalid.
ArtifactSet run_experiment(const ExperimentConfig& config);

struct AlgorithmSummary {
    Algorithm algorithm = Algorithm::dar_rl;
    int runs = 0;
    int reached = 0;              // runs whose moving success reached the level
    std::optional<double> median_episodes;  // over runs that reached it
    double final_mean = 0.0;      // mean final moving success
};

struct CompareResult {
    ArtifactSet artifacts;
    double level = 0.9;
    AlgorithmSummary dar_rl;
    AlgorithmSummary q_learning;
};

/// Runs dar_rl and q_learning on the same seeds into one directory and adds
/// compare.csv. The config's algorithm field is ignored.
CompareResult run_compare(const ExperimentConfig& config, double level = 0.9);

AlgorithmSummary summarize(Algorithm algorithm, const std::vector<RunResult>& runs, double level);

/// Per-episode metrics table: episode, return, steps, success,
/// moving_success_100, leaf_count, epsilon.
std::string metrics_csv(const TrainStats& stats);

/// episode, runs, mean_moving_success, std_moving_success (population).
std::string aggregate_csv(const std::vector<const TrainStats*>& runs);

/// Shortest round-trip decimal text.
std::string format_number(double v);

}  // namespace darrl
