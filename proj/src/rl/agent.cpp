#include "hwy/rl/agent.hpp"

#include <cmath>

#include "hwy/common/seed.hpp"

namespace hwy::rl {

Variant parse_variant(const std::string& s) {
    if (s == "dqn") return Variant::dqn;
    if (s == "double") return Variant::double_dqn;
    if (s == "averaged") return Variant::averaged;
    if (s == "duelling" || s == "dueling") return Variant::duelling;
    if (s == "noisy") return Variant::noisy;
    throw ConfigError("unknown variant '" + s + "'");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::dqn: return "dqn";
        case Variant::double_dqn: return "double";
        case Variant::averaged: return "averaged";
        case Variant::duelling: return "duelling";
        case Variant::noisy: return "noisy";
    }
    return "dqn";
}

void AgentConfig::check() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent.gamma must lie in [0, 1]");
    if (!(alpha > 0.0)) throw ConfigError("agent.alpha must be positive");
    if (!(eps_min >= 0.0 && eps_min <= eps_start && eps_start <= 1.0)) {
        throw ConfigError("agent epsilon bounds must satisfy 0 <= eps_min <= eps_start <= 1");
    }
    if (!(eps_decay > 0.0 && eps_decay <= 1.0)) throw ConfigError("agent.eps_decay must lie in (0, 1]");
    if (batch_size < 1) throw ConfigError("agent.batch_size must be >= 1");
    if (target_sync_interval < 1) throw ConfigError("agent.target_sync_interval must be >= 1");
    if (averaged_k < 1) throw ConfigError("agent.averaged_k must be >= 1");
    if (replay_capacity < static_cast<std::size_t>(batch_size)) {
        throw ConfigError("agent.replay_capacity must be >= agent.batch_size");
    }
    if (hidden.empty()) throw ConfigError("agent.hidden needs at least one layer");
    for (int h : hidden) {
        if (h < 1) throw ConfigError("agent.hidden sizes must be positive");
    }
    if (!(sigma0 >= 0.0)) throw ConfigError("agent.sigma0 must be >= 0");
}

AgentConfig AgentConfig::from_config(const Config& cfg) {
    AgentConfig a;
    a.variant = parse_variant(cfg.get_string("agent.variant", to_string(a.variant)));
    a.gamma = cfg.get_double("agent.gamma", a.gamma);
    a.alpha = cfg.get_double("agent.alpha", a.alpha);
    a.eps_start = cfg.get_double("agent.eps_start", a.eps_start);
    a.eps_min = cfg.get_double("agent.eps_min", a.eps_min);
    a.eps_decay = cfg.get_double("agent.eps_decay", a.eps_decay);
    a.batch_size = static_cast<int>(cfg.get_int("agent.batch_size", a.batch_size));
    a.target_sync_interval = static_cast<int>(cfg.get_int("agent.target_sync_interval", a.target_sync_interval));
    a.averaged_k = static_cast<int>(cfg.get_int("agent.averaged_k", a.averaged_k));
    a.replay_capacity = cfg.get_u64("agent.replay_capacity", a.replay_capacity);
    if (cfg.has("agent.hidden")) a.hidden = cfg.get_int_list("agent.hidden");
    a.activation = nn::parse_activation(cfg.get_string("agent.activation", nn::to_string(a.activation)));
    a.sigma0 = cfg.get_double("agent.sigma0", a.sigma0);
    a.noisy_all_layers = cfg.get_bool("noisy.all_layers", a.noisy_all_layers);
    a.check();
    return a;
}

nn::NetworkSpec AgentConfig::network_spec(int input_dim) const {
    nn::NetworkSpec spec;
    spec.input_dim = input_dim;
    spec.hidden = hidden;
    spec.output_dim = env::kActionCount;
    spec.head = variant == Variant::duelling ? nn::HeadKind::duelling : nn::HeadKind::plain;
    spec.activation = activation;
    if (variant == Variant::noisy) {
        spec.noisy = noisy_all_layers ? nn::NoisyPlacement::all : nn::NoisyPlacement::final_two;
    }
    spec.sigma0 = sigma0;
    return spec;
}

TargetBank::TargetBank(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw ConfigError("target bank capacity must be >= 1");
}

void TargetBank::push(const nn::Network& net) {
    snapshots_.push_front(net);
    while (snapshots_.size() > static_cast<std::size_t>(capacity_)) snapshots_.pop_back();
}

const nn::Network& TargetBank::newest() const {
    if (snapshots_.empty()) throw EmptyBank();
    return snapshots_.front();
}

double epsilon_schedule(int episode, const AgentConfig& cfg) {
    if (episode < 0) throw Error("episode index must be >= 0");
    return std::max(cfg.eps_min, cfg.eps_start * std::pow(cfg.eps_decay, static_cast<double>(episode)));
}

int greedy_index(std::span<const double> q) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i) {
        if (q[static_cast<std::size_t>(i)] > q[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

env::Action select_action(std::span<const double> obs, double eps, const nn::Network& net, Rng& rng) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error("epsilon must lie in [0, 1]");
    if (eps > 0.0 && rng.uniform() < eps) {
        return env::action_from_index(static_cast<int>(rng.uniform_int(env::kActionCount)));
    }
    const Eigen::VectorXd q = net.forward(obs);
    return env::action_from_index(greedy_index(std::span<const double>(q.data(), static_cast<std::size_t>(q.size()))));
}

namespace {

Eigen::MatrixXd stack(std::span<const Transition* const> batch, bool next, int dim) {
    Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t c = 0; c < batch.size(); ++c) {
        const auto& f = next ? batch[c]->s_next.features : batch[c]->s.features;
        if (static_cast<int>(f.size()) != dim) throw nn::DimensionMismatch("observation size does not match network");
        for (int r = 0; r < dim; ++r) m(r, static_cast<Eigen::Index>(c)) = f[static_cast<std::size_t>(r)];
    }
    return m;
}

int column_argmax(const Eigen::MatrixXd& q, Eigen::Index c) {
    int best = 0;
    for (Eigen::Index r = 1; r < q.rows(); ++r) {
        if (q(r, c) > q(best, c)) best = static_cast<int>(r);
    }
    return best;
}

}  // namespace

std::vector<double> compute_targets(std::span<const Transition* const> batch, Variant variant,
                                    const nn::Network& online, std::span<const nn::Network* const> targets,
                                    double gamma) {
    if (targets.empty()) throw EmptyBank();
    std::vector<double> y(batch.size());
    if (batch.empty()) return y;
    const Eigen::MatrixXd next = stack(batch, true, online.input_dim());

    Eigen::MatrixXd q_target;
    Eigen::MatrixXd q_online;
    if (variant == Variant::averaged) {
        q_target = targets[0]->forward_batch(next);
        for (std::size_t k = 1; k < targets.size(); ++k) q_target += targets[k]->forward_batch(next);
        q_target /= static_cast<double>(targets.size());
    } else {
        q_target = targets[0]->forward_batch(next);
    }
    if (variant == Variant::double_dqn) q_online = online.forward_batch(next);

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = *batch[i];
        if (t.terminal) {
            y[i] = t.r;
            continue;
        }
        const auto c = static_cast<Eigen::Index>(i);
        const int a_star = variant == Variant::double_dqn ? column_argmax(q_online, c) : column_argmax(q_target, c);
        y[i] = t.r + gamma * q_target(a_star, c);
    }
    return y;
}

std::vector<double> compute_targets(std::span<const Transition* const> batch, Variant variant,
                                    const nn::Network& online, const TargetBank& bank, double gamma) {
    if (bank.empty()) throw EmptyBank();
    std::vector<const nn::Network*> targets;
    const std::size_t used = variant == Variant::averaged ? bank.size() : 1;
    for (std::size_t k = 0; k < used; ++k) targets.push_back(&bank.at(k));
    return compute_targets(batch, variant, online, std::span<const nn::Network* const>(targets), gamma);
}

Agent::Agent(const AgentConfig& cfg, int input_dim, std::uint64_t seed)
    : cfg_(cfg),
      online_(cfg.network_spec(input_dim), derive_seed(seed, "agent-init")),
      bank_(cfg.averaged_k),
      buffer_(cfg.replay_capacity),
      explore_rng_(derive_seed(seed, "agent-explore")),
      replay_rng_(derive_seed(seed, "agent-replay")),
      noise_rng_(derive_seed(seed, "agent-noise")) {
    cfg_.check();
    adam_.alpha = cfg_.alpha;
    if (online_.has_noisy_layers()) online_.sample_noise(noise_rng_);
}

env::Action Agent::act(std::span<const double> obs, double eps) {
    if (cfg_.variant == Variant::noisy) {
        online_.sample_noise(noise_rng_);
        return select_action(obs, 0.0, online_, explore_rng_);
    }
    return select_action(obs, eps, online_, explore_rng_);
}

env::Action Agent::act_greedy(std::span<const double> obs) {
    const bool noisy = online_.has_noisy_layers();
    if (noisy) online_.set_noise_enabled(false);
    const Eigen::VectorXd q = online_.forward(obs);
    if (noisy) online_.set_noise_enabled(true);
    return env::action_from_index(greedy_index(std::span<const double>(q.data(), static_cast<std::size_t>(q.size()))));
}

std::optional<double> Agent::observe(Transition t) {
    if (bank_.empty()) sync_target();
    buffer_.push(std::move(t));
    ++env_steps_;
    std::optional<double> loss;
    if (buffer_.size() >= static_cast<std::size_t>(cfg_.batch_size)) loss = train_step();
    if (env_steps_ % static_cast<std::uint64_t>(cfg_.target_sync_interval) == 0) sync_target();
    return loss;
}

double Agent::train_step() {
    if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) {
        throw BufferTooSmall("replay buffer holds " + std::to_string(buffer_.size()) + " transitions, need " +
                             std::to_string(cfg_.batch_size));
    }
    const auto batch = buffer_.sample(static_cast<std::size_t>(cfg_.batch_size), replay_rng_);
    return train_step(batch);
}

double Agent::train_step(std::span<const Transition* const> batch) {
    if (batch.empty()) throw BufferTooSmall("empty batch");
    if (bank_.empty()) sync_target();

    std::vector<double> y;
    if (noisy_target_) {
        noisy_target_->sample_noise(noise_rng_);
        const nn::Network* target = &*noisy_target_;
        y = compute_targets(batch, cfg_.variant, online_, std::span<const nn::Network* const>(&target, 1),
                            cfg_.gamma);
    } else {
        y = compute_targets(batch, cfg_.variant, online_, bank_, cfg_.gamma);
    }

    const Eigen::MatrixXd states = stack(batch, false, online_.input_dim());
    nn::ForwardCache cache;
    const Eigen::MatrixXd q = online_.forward_batch(states, &cache);
    const auto n = static_cast<double>(batch.size());
    Eigen::MatrixXd grad_out = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        const double diff = q(batch[i]->a, c) - y[i];
        loss += diff * diff;
        grad_out(batch[i]->a, c) = 2.0 * diff / n;
    }
    loss /= n;
    const nn::Gradients grads = online_.backward(cache, grad_out);
    const auto params = online_.parameters();
    nn::adam_step(params, grads, adam_);
    return loss;
}

void Agent::sync_target() {
    bank_.push(online_);
    if (cfg_.variant == Variant::noisy) noisy_target_ = online_;
}

nn::Network frozen_policy(const Agent& agent) {
    nn::Network net = agent.online();
    net.set_noise_enabled(false);
    return net;
}

}  // namespace hwy::rl
