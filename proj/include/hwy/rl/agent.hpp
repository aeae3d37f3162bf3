#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hwy/common/config.hpp"
#include "hwy/common/random.hpp"
#include "hwy/env/types.hpp"
#include "hwy/nn/adam.hpp"
#include "hwy/nn/network.hpp"
#include "hwy/rl/replay_buffer.hpp"

namespace hwy::rl {

enum class Variant { dqn, double_dqn, averaged, duelling, noisy };

Variant parse_variant(const std::string& s);
std::string to_string(Variant v);

struct AgentConfig {
    Variant variant = Variant::dqn;
    double gamma = 0.95;
    double alpha = 1e-5;
    double eps_start = 1.0;
    double eps_min = 0.01;
    double eps_decay = 0.9995;
    int batch_size = 32;
    int target_sync_interval = 1000;
    int averaged_k = 5;
    std::size_t replay_capacity = 10000;
    std::vector<int> hidden{128, 128};
    nn::Activation activation = nn::Activation::relu;
    double sigma0 = 0.5;
    bool noisy_all_layers = false;

    void check() const;
    /// Keys under agent.* plus noisy.all_layers.
    static AgentConfig from_config(const Config& cfg);
    nn::NetworkSpec network_spec(int input_dim) const;
};

class EmptyBank : public Error {
public:
    EmptyBank() : Error("target bank is empty") {}
};

class BufferTooSmall : public Error {
public:
    using Error::Error;
};

// Frozen copies of the online network, newest first.
class TargetBank {
public:
    explicit TargetBank(int capacity = 1);

    void push(const nn::Network& net);
    std::size_t size() const { return snapshots_.size(); }
    bool empty() const { return snapshots_.empty(); }
    int capacity() const { return capacity_; }
    const nn::Network& newest() const;
    const nn::Network& at(std::size_t i) const { return snapshots_.at(i); }

private:
    int capacity_;
    std::deque<nn::Network> snapshots_;
};

/// max(eps_min, eps_start * eps_decay^episode)
double epsilon_schedule(int episode, const AgentConfig& cfg);

/// Index of the largest value; ties resolve to the lowest index.
int greedy_index(std::span<const double> q);

/// Epsilon-greedy choice over net's Q-values.
env::Action select_action(std::span<const double> obs, double eps, const nn::Network& net, Rng& rng);

/// Regression targets y for each transition of the batch.
std::vector<double> compute_targets(std::span<const Transition* const> batch, Variant variant,
                                    const nn::Network& online, const TargetBank& bank, double gamma);

/// Same, against an explicit list of target networks (newest first).
std::vector<double> compute_targets(std::span<const Transition* const> batch, Variant variant,
                                    const nn::Network& online, std::span<const nn::Network* const> targets,
                                    double gamma);

// Online network, target bank, replay memory and optimizer for one variant.
class Agent {
public:
    Agent(const AgentConfig& cfg, int input_dim, std::uint64_t seed);

    const AgentConfig& config() const { return cfg_; }
    const nn::Network& online() const { return online_; }
    nn::Network& online() { return online_; }
    const TargetBank& bank() const { return bank_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    const nn::AdamState& optimizer() const { return adam_; }
    std::uint64_t env_steps() const { return env_steps_; }
    int input_dim() const { return online_.input_dim(); }

    /// Exploration action. The noisy variant ignores eps and resamples noise.
    env::Action act(std::span<const double> obs, double eps);
    /// Greedy action on mean weights; never touches the agent's generators.
    env::Action act_greedy(std::span<const double> obs);

    /// Stores t, runs one gradient step once enough data is held and syncs
    /// the target every target_sync_interval calls. Returns the loss if a
    /// gradient step ran.
    std::optional<double> observe(Transition t);

    /// One gradient step on the given batch; returns the mean squared error.
    double train_step(std::span<const Transition* const> batch);
    /// Samples batch_size transitions from the buffer and trains on them.
    double train_step();

    void sync_target();

private:
    AgentConfig cfg_;
    nn::Network online_;
    TargetBank bank_;
    std::optional<nn::Network> noisy_target_;
    ReplayBuffer buffer_;
    nn::AdamState adam_;
    Rng explore_rng_;
    Rng replay_rng_;
    Rng noise_rng_;
    std::uint64_t env_steps_ = 0;
};

/// Online network with noise disabled, for evaluation and checkpoints.
nn::Network frozen_policy(const Agent& agent);

}  // namespace hwy::rl
