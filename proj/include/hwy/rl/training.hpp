#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "hwy/env/types.hpp"
#include "hwy/rl/agent.hpp"

namespace hwy::rl {

inline constexpr const char* kMetricsHeader = "episode,score,mean_loss,epsilon,collision,steps";

struct EpisodeMetrics {
    int episode = 0;
    double score = 0.0;
    double mean_loss = 0.0;
    bool has_loss = false;  // false until the first gradient step
    double epsilon = 0.0;
    bool collision = false;
    int steps = 0;
    int lane_changes = 0;
    env::Outcome outcome = env::Outcome::running;
};

class MetricsSink {
public:
    virtual ~MetricsSink() = default;
    virtual void on_episode(const EpisodeMetrics& m) = 0;
};

// Metrics CSV: '#' comment lines, then kMetricsHeader, then one row per
// episode. A row without gradient steps leaves mean_loss empty.
class CsvMetricsSink : public MetricsSink {
public:
    CsvMetricsSink(std::ostream& out, const std::vector<std::string>& comments = {});
    void on_episode(const EpisodeMetrics& m) override;

private:
    std::ostream& out_;
};

class MemoryMetricsSink : public MetricsSink {
public:
    void on_episode(const EpisodeMetrics& m) override { rows.push_back(m); }
    std::vector<EpisodeMetrics> rows;
};

std::string format_metrics_row(const EpisodeMetrics& m);

class TrainingDiverged : public Error {
public:
    using Error::Error;
};

/// Environment for a given episode index (the caller picks the track).
using EnvFactory = std::function<env::Environment&(int episode)>;

struct TrainingOptions {
    int episodes = 7000;
    std::uint64_t seed = 0;
    /// Test hook: report a NaN loss at the end of this episode (-1 = off).
    int inject_nan_at_episode = -1;
};

struct TrainingSummary {
    int episodes = 0;
    std::uint64_t env_steps = 0;
    double final_epsilon = 0.0;
};

/// Episode seed fed to Environment::reset during training.
std::uint64_t training_episode_seed(std::uint64_t seed, int episode);

/// Experience-replay training loop. Transitions that end by truncation are
/// stored as non-terminal so their value is bootstrapped.
TrainingSummary run_training(const EnvFactory& make_env, Agent& agent, const TrainingOptions& opts,
                             MetricsSink& sink);

}  // namespace hwy::rl
