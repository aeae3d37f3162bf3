#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hwy/common/config.hpp"
#include "hwy/data/synth.hpp"
#include "hwy/data/track.hpp"
#include "hwy/env/highway_env.hpp"
#include "hwy/intent/intention.hpp"
#include "hwy/nn/network.hpp"
#include "hwy/rl/agent.hpp"
#include "hwy/rl/training.hpp"

namespace hwy::harness {

using TrackList = std::vector<std::shared_ptr<const data::TrackSet>>;

// An experiment arm fixes what the agent observes about its neighbours.
struct ArmSpec {
    std::string name;
    env::ObsMode obs_mode = env::ObsMode::base;
    intent::IntentionMode intention = intent::IntentionMode::none;
};

/// base | ttlc | ttlc_degraded
ArmSpec arm_from_name(const std::string& name);

class LayoutMismatch : public Error {
public:
    using Error::Error;
};

struct ExperimentConfig {
    std::vector<rl::Variant> variants{rl::Variant::dqn};
    std::vector<ArmSpec> arms{arm_from_name("base"), arm_from_name("ttlc")};
    std::vector<int> train_tracks;  // indices into the corpus manifest
    std::vector<int> test_tracks;
    int episodes = 7000;
    int eval_runs = 45;
    std::vector<std::uint64_t> seeds{1};
    std::filesystem::path data_dir = "data";
    std::filesystem::path out_dir = "runs";
    int track_count = 30;
    std::uint64_t data_seed = 1;
    int inject_nan_at_episode = -1;

    data::SynthConfig synth;
    env::EnvConfig env;
    env::SpawnConfig spawn;
    rl::AgentConfig agent;
    intent::NoiseConfig noise;

    Config source;  // the parsed file, echoed into metrics and manifests

    void check() const;
    static ExperimentConfig from_config(const Config& cfg);
};

/// Seed of corpus track i.
std::uint64_t track_seed(std::uint64_t data_seed, int index);
std::string track_file_name(int index);

/// Generates the corpus in memory, track i from track_seed(data_seed, i).
TrackList generate_corpus(const ExperimentConfig& cfg);
/// Writes the corpus CSVs and manifest.json into dir.
void write_corpus(const ExperimentConfig& cfg, const TrackList& tracks, const std::filesystem::path& dir);
/// Loads every track listed in dir/manifest.json, in manifest order.
TrackList load_corpus(const ExperimentConfig& cfg, const std::filesystem::path& dir);

TrackList select_tracks(const TrackList& corpus, const std::vector<int>& indices);

/// Environment for one arm: observation mode and intention provider set.
std::unique_ptr<env::HighwayEnv> make_env(const ExperimentConfig& cfg, const ArmSpec& arm);

struct TrainedPolicy {
    nn::Network policy;  // noise disabled
    rl::TrainingSummary summary;
};

/// Trains one (variant, arm, seed) combination over the training tracks,
/// sampled round-robin.
TrainedPolicy train_arm(const ExperimentConfig& cfg, rl::Variant variant, const ArmSpec& arm, std::uint64_t seed,
                        const TrackList& train, rl::MetricsSink& sink);

/// Seed of evaluation run `run` for a policy trained with `seed`.
std::uint64_t eval_run_seed(std::uint64_t seed, int run);

/// Base names of the per-combination output files.
std::string run_stem(rl::Variant variant, const ArmSpec& arm, std::uint64_t seed);

/// Comment lines echoed at the top of metrics CSVs.
std::vector<std::string> config_echo(const ExperimentConfig& cfg, rl::Variant variant, const ArmSpec& arm,
                                     std::uint64_t seed);

}  // namespace hwy::harness
