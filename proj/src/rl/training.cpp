#include "hwy/rl/training.hpp"

#include <cmath>
#include <cstdio>

#include "hwy/common/seed.hpp"

namespace hwy::rl {

CsvMetricsSink::CsvMetricsSink(std::ostream& out, const std::vector<std::string>& comments) : out_(out) {
    for (const auto& c : comments) out_ << "# " << c << '\n';
    out_ << kMetricsHeader << '\n';
}

std::string format_metrics_row(const EpisodeMetrics& m) {
    char buf[160];
    char loss[40] = "";
    if (m.has_loss) std::snprintf(loss, sizeof loss, "%.9g", m.mean_loss);
    std::snprintf(buf, sizeof buf, "%d,%.6f,%s,%.6f,%d,%d", m.episode, m.score, loss, m.epsilon,
                  m.collision ? 1 : 0, m.steps);
    return buf;
}

void CsvMetricsSink::on_episode(const EpisodeMetrics& m) { out_ << format_metrics_row(m) << '\n'; }

std::uint64_t training_episode_seed(std::uint64_t seed, int episode) {
    return derive_seed(seed, "train-episode", static_cast<std::uint64_t>(episode));
}

TrainingSummary run_training(const EnvFactory& make_env, Agent& agent, const TrainingOptions& opts,
                             MetricsSink& sink) {
    if (opts.episodes < 1) throw ConfigError("training needs at least one episode");
    const bool noisy = agent.config().variant == Variant::noisy;
    TrainingSummary summary;
    for (int ep = 0; ep < opts.episodes; ++ep) {
        env::Environment& env = make_env(ep);
        const double eps = noisy ? 0.0 : epsilon_schedule(ep, agent.config());
        env::Observation obs = env.reset(training_episode_seed(opts.seed, ep));

        EpisodeMetrics m;
        m.episode = ep;
        m.epsilon = eps;
        double loss_sum = 0.0;
        int loss_count = 0;
        for (;;) {
            const env::Action a = agent.act(obs.features, eps);
            env::StepResult res = env.step(a);
            m.score += res.reward;
            ++m.steps;
            if (res.events.initiated_lane_change) ++m.lane_changes;
            Transition t;
            t.s = obs;
            t.a = env::to_index(a);
            t.r = res.reward;
            t.s_next = res.observation;
            t.terminal = res.done && res.outcome != env::Outcome::truncated;
            if (auto loss = agent.observe(std::move(t))) {
                loss_sum += *loss;
                ++loss_count;
            }
            obs = std::move(res.observation);
            if (res.done) {
                m.collision = res.outcome == env::Outcome::collision;
                m.outcome = res.outcome;
                break;
            }
        }
        if (loss_count > 0) {
            m.has_loss = true;
            m.mean_loss = loss_sum / loss_count;
        }
        if (ep == opts.inject_nan_at_episode) {
            m.has_loss = true;
            m.mean_loss = std::nan("");
        }
        sink.on_episode(m);
        if (m.has_loss && !std::isfinite(m.mean_loss)) {
            throw TrainingDiverged("non-finite training loss in episode " + std::to_string(ep));
        }
        summary.episodes = ep + 1;
        summary.final_epsilon = eps;
    }
    summary.env_steps = agent.env_steps();
    return summary;
}

}  // namespace hwy::rl
