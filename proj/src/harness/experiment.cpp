#include "hwy/harness/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "hwy/common/seed.hpp"
#include "hwy/data/track_io.hpp"

namespace hwy::harness {

ArmSpec arm_from_name(const std::string& name) {
    if (name == "base") return {name, env::ObsMode::base, intent::IntentionMode::none};
    if (name == "ttlc") return {name, env::ObsMode::ttlc, intent::IntentionMode::ground_truth};
    if (name == "ttlc_degraded") return {name, env::ObsMode::ttlc, intent::IntentionMode::degraded};
    throw ConfigError("unknown arm '" + name + "' (expected base, ttlc or ttlc_degraded)");
}

namespace {

std::vector<int> default_range(int lo, int hi) {
    std::vector<int> v;
    for (int i = lo; i < hi; ++i) v.push_back(i);
    return v;
}

}  // namespace

void ExperimentConfig::check() const {
    if (variants.empty()) throw ConfigError("experiment.variants is empty");
    if (arms.empty()) throw ConfigError("experiment.arms is empty");
    if (seeds.empty()) throw ConfigError("experiment.seeds is empty");
    if (episodes < 1) throw ConfigError("experiment.episodes must be >= 1");
    if (eval_runs < 1) throw ConfigError("experiment.eval_runs must be >= 1");
    if (track_count < 0) throw ConfigError("data.track_count must be >= 0");
    std::set<int> train(train_tracks.begin(), train_tracks.end());
    for (int t : test_tracks) {
        if (train.count(t)) throw ConfigError("track " + std::to_string(t) + " is in both train and test splits");
    }
    for (const auto* split : {&train_tracks, &test_tracks}) {
        for (int t : *split) {
            if (t < 0) throw ConfigError("track indices must be >= 0");
        }
    }
    if (!(noise.class_flip_rate >= 0.0 && noise.class_flip_rate <= 1.0)) {
        throw ConfigError("intention.class_flip_rate must lie in [0, 1]");
    }
    if (!(noise.ttlc_sigma >= 0.0)) throw ConfigError("intention.ttlc_sigma must be >= 0");
    env.check();
    agent.check();
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    ExperimentConfig e;
    e.source = cfg;
    if (cfg.has("experiment.variants")) {
        e.variants.clear();
        for (const auto& v : cfg.get_list("experiment.variants")) e.variants.push_back(rl::parse_variant(v));
    }
    if (cfg.has("experiment.arms")) {
        e.arms.clear();
        for (const auto& a : cfg.get_list("experiment.arms")) e.arms.push_back(arm_from_name(a));
    }
    e.track_count = static_cast<int>(cfg.get_int("data.track_count", e.track_count));
    e.data_seed = cfg.get_u64("data.seed", e.data_seed);
    e.data_dir = cfg.get_string("data.dir", e.data_dir.string());
    e.out_dir = cfg.get_string("experiment.out_dir", e.out_dir.string());
    const int half = e.track_count / 2;
    e.train_tracks = cfg.has("experiment.train_tracks") ? cfg.get_int_list("experiment.train_tracks")
                                                        : default_range(0, half);
    e.test_tracks = cfg.has("experiment.test_tracks") ? cfg.get_int_list("experiment.test_tracks")
                                                      : default_range(half, e.track_count);
    e.episodes = static_cast<int>(cfg.get_int("experiment.episodes", e.episodes));
    e.eval_runs = static_cast<int>(cfg.get_int("experiment.eval_runs", e.eval_runs));
    if (cfg.has("experiment.seeds")) {
        e.seeds.clear();
        for (const auto& s : cfg.get_list("experiment.seeds")) {
            try {
                std::size_t used = 0;
                e.seeds.push_back(std::stoull(s, &used));
                if (used != s.size()) throw std::invalid_argument(s);
            } catch (const std::exception&) {
                throw ConfigError("experiment.seeds: '" + s + "' is not an unsigned integer");
            }
        }
    }
    e.inject_nan_at_episode = static_cast<int>(cfg.get_int("debug.inject_nan_at_episode", -1));
    e.synth = data::SynthConfig::from_config(cfg);
    e.env = env::EnvConfig::from_config(cfg);
    e.spawn = env::SpawnConfig::from_config(cfg);
    e.agent = rl::AgentConfig::from_config(cfg);
    e.noise.class_flip_rate = cfg.get_double("intention.class_flip_rate", 0.1);
    e.noise.ttlc_sigma = cfg.get_double("intention.ttlc_sigma", 0.5);
    e.noise.seed = cfg.get_u64("intention.noise_seed", 0);
    e.check();
    return e;
}

std::uint64_t track_seed(std::uint64_t data_seed, int index) {
    return derive_seed(data_seed, "track", static_cast<std::uint64_t>(index));
}

std::string track_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "track_%03d.csv", index);
    return buf;
}

TrackList generate_corpus(const ExperimentConfig& cfg) {
    TrackList out;
    for (int i = 0; i < cfg.track_count; ++i) {
        auto ts = data::generate_synthetic(cfg.synth, track_seed(cfg.data_seed, i));
        ts.track_id = std::filesystem::path(track_file_name(i)).stem().string();
        out.push_back(std::make_shared<const data::TrackSet>(std::move(ts)));
    }
    return out;
}

void write_corpus(const ExperimentConfig& cfg, const TrackList& tracks, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    nlohmann::json manifest;
    manifest["format"] = "hwy-track-corpus";
    manifest["version"] = 1;
    manifest["data_seed"] = cfg.data_seed;
    manifest["seed_scheme"] = "track i uses derive_seed(data_seed, \"track\", i)";
    manifest["dt"] = cfg.synth.dt;
    manifest["lane_width"] = cfg.synth.geometry.lane_width;
    manifest["track_length"] = cfg.synth.geometry.track_length;
    manifest["tracks"] = nlohmann::json::array();
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const auto name = track_file_name(static_cast<int>(i));
        data::save_tracks(*tracks[i], dir / name);
        manifest["tracks"].push_back({{"index", i},
                                      {"id", tracks[i]->track_id},
                                      {"file", name},
                                      {"seed", track_seed(cfg.data_seed, static_cast<int>(i))},
                                      {"vehicles", tracks[i]->vehicles.size()}});
    }
    std::ofstream f(dir / "manifest.json", std::ios::trunc);
    if (!f) throw IoError("cannot write " + (dir / "manifest.json").string());
    f << manifest.dump(2) << '\n';
    if (!f) throw IoError("failed writing " + (dir / "manifest.json").string());
}

TrackList load_corpus(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const auto path = dir / "manifest.json";
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    nlohmann::json manifest;
    try {
        f >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad manifest " + path.string() + ": " + e.what());
    }
    TrackList out;
    try {
        for (const auto& t : manifest.at("tracks")) {
            auto ts = data::load_tracks(dir / t.at("file").get<std::string>(), cfg.synth.geometry, cfg.synth.dt);
            out.push_back(std::make_shared<const data::TrackSet>(std::move(ts)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad manifest " + path.string() + ": " + e.what());
    }
    return out;
}

TrackList select_tracks(const TrackList& corpus, const std::vector<int>& indices) {
    TrackList out;
    for (int i : indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= corpus.size()) {
            throw ConfigError("track index " + std::to_string(i) + " is outside the corpus of " +
                              std::to_string(corpus.size()));
        }
        out.push_back(corpus[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::unique_ptr<env::HighwayEnv> make_env(const ExperimentConfig& cfg, const ArmSpec& arm) {
    env::EnvConfig ec = cfg.env;
    ec.obs_mode = arm.obs_mode;
    auto provider = intent::make_provider(arm.intention, ec.intention_horizon, cfg.noise);
    auto e = std::make_unique<env::HighwayEnv>(ec, std::move(provider));
    e->set_spawn(cfg.spawn);
    return e;
}

TrainedPolicy train_arm(const ExperimentConfig& cfg, rl::Variant variant, const ArmSpec& arm, std::uint64_t seed,
                        const TrackList& train, rl::MetricsSink& sink) {
    if (train.empty()) throw ConfigError("training split is empty");
    auto env = make_env(cfg, arm);
    rl::AgentConfig ac = cfg.agent;
    ac.variant = variant;
    rl::Agent agent(ac, env->observation_size(), seed);
    rl::EnvFactory factory = [&](int episode) -> env::Environment& {
        env->set_track(train[static_cast<std::size_t>(episode) % train.size()]);
        return *env;
    };
    rl::TrainingOptions opts;
    opts.episodes = cfg.episodes;
    opts.seed = seed;
    opts.inject_nan_at_episode = cfg.inject_nan_at_episode;
    TrainedPolicy out{rl::frozen_policy(agent), {}};
    out.summary = rl::run_training(factory, agent, opts, sink);
    out.policy = rl::frozen_policy(agent);
    return out;
}

std::uint64_t eval_run_seed(std::uint64_t seed, int run) {
    return derive_seed(seed, "eval-run", static_cast<std::uint64_t>(run));
}

std::string run_stem(rl::Variant variant, const ArmSpec& arm, std::uint64_t seed) {
    return rl::to_string(variant) + "-" + arm.name + "-s" + std::to_string(seed);
}

std::vector<std::string> config_echo(const ExperimentConfig& cfg, rl::Variant variant, const ArmSpec& arm,
                                     std::uint64_t seed) {
    std::vector<std::string> lines;
    lines.push_back("variant=" + rl::to_string(variant));
    lines.push_back("arm=" + arm.name);
    lines.push_back("obs_mode=" + env::to_string(arm.obs_mode));
    lines.push_back("obs_dim=" + std::to_string(env::observation_length(arm.obs_mode)));
    lines.push_back("intention_mode=" + intent::to_string(arm.intention));
    lines.push_back("seed=" + std::to_string(seed));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", cfg.agent.eps_decay);
    lines.push_back(std::string("agent.eps_decay=") + buf);
    lines.push_back("agent.target_sync_interval=" + std::to_string(cfg.agent.target_sync_interval));
    for (const auto& [k, v] : cfg.source.entries()) lines.push_back("config " + k + "=" + v);
    return lines;
}

}  // namespace hwy::harness
