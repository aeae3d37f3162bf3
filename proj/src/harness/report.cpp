#include "hwy/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hwy/rl/agent.hpp"

namespace hwy::harness {

int EvalReport::collisions() const {
    int n = 0;
    for (const auto& r : runs) n += r.outcome == env::Outcome::collision ? 1 : 0;
    return n;
}

double EvalReport::mean_score() const {
    if (runs.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : runs) s += r.score;
    return s / static_cast<double>(runs.size());
}

std::map<std::string, int> EvalReport::outcome_histogram() const {
    std::map<std::string, int> h{{"collision", 0}, {"end_of_track", 0}, {"truncated", 0}};
    for (const auto& r : runs) ++h[env::to_string(r.outcome)];
    return h;
}

EvalReport evaluate_policy(const ExperimentConfig& cfg, const nn::Network& policy, rl::Variant variant,
                           const ArmSpec& arm, std::uint64_t seed, const TrackList& test) {
    if (test.empty()) throw ConfigError("test split is empty");
    auto env = make_env(cfg, arm);
    if (policy.input_dim() != env->observation_size()) {
        throw LayoutMismatch("checkpoint expects " + std::to_string(policy.input_dim()) +
                             " inputs but arm '" + arm.name + "' observes " +
                             std::to_string(env->observation_size()));
    }
    nn::Network net = policy;
    net.set_noise_enabled(false);
    EvalReport rep;
    rep.variant = rl::to_string(variant);
    rep.arm = arm.name;
    rep.train_seed = seed;
    rep.obs_mode = env::to_string(arm.obs_mode);
    rep.obs_dim = env->observation_size();
    for (int run = 0; run < cfg.eval_runs; ++run) {
        const auto& track = test[static_cast<std::size_t>(run) % test.size()];
        env->set_track(track);
        RunRecord rec;
        rec.run = run;
        rec.track_id = track->track_id;
        rec.seed = eval_run_seed(seed, run);
        env::Observation obs = env->reset(rec.seed);
        for (;;) {
            const Eigen::VectorXd q = net.forward(obs.features);
            const int a = rl::greedy_index(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
            auto res = env->step(env::action_from_index(a));
            obs = std::move(res.observation);
            if (res.done) {
                rec.outcome = res.outcome;
                break;
            }
        }
        rec.score = env->score();
        rec.steps = env->steps();
        rec.lane_changes = env->lane_changes();
        rep.runs.push_back(rec);
    }
    return rep;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["variant"] = r.variant;
    j["arm"] = r.arm;
    j["train_seed"] = r.train_seed;
    j["obs_mode"] = r.obs_mode;
    j["obs_dim"] = r.obs_dim;
    j["eval_runs"] = r.runs.size();
    j["collisions"] = r.collisions();
    j["mean_score"] = r.mean_score();
    j["outcomes"] = r.outcome_histogram();
    j["runs"] = nlohmann::json::array();
    for (const auto& run : r.runs) {
        j["runs"].push_back({{"run", run.run},
                             {"track_id", run.track_id},
                             {"seed", run.seed},
                             {"outcome", env::to_string(run.outcome)},
                             {"collision", run.outcome == env::Outcome::collision},
                             {"score", run.score},
                             {"steps", run.steps},
                             {"lane_changes", run.lane_changes}});
    }
    return j;
}

namespace {

env::Outcome parse_outcome(const std::string& s) {
    for (auto o : {env::Outcome::running, env::Outcome::collision, env::Outcome::end_of_track,
                   env::Outcome::truncated}) {
        if (env::to_string(o) == s) return o;
    }
    throw IoError("unknown outcome '" + s + "' in report");
}

}  // namespace

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    try {
        r.variant = j.at("variant").get<std::string>();
        r.arm = j.at("arm").get<std::string>();
        r.train_seed = j.at("train_seed").get<std::uint64_t>();
        r.obs_mode = j.at("obs_mode").get<std::string>();
        r.obs_dim = j.at("obs_dim").get<int>();
        for (const auto& run : j.at("runs")) {
            RunRecord rec;
            rec.run = run.at("run").get<int>();
            rec.track_id = run.at("track_id").get<std::string>();
            rec.seed = run.at("seed").get<std::uint64_t>();
            rec.outcome = parse_outcome(run.at("outcome").get<std::string>());
            rec.score = run.at("score").get<double>();
            rec.steps = run.at("steps").get<int>();
            rec.lane_changes = run.at("lane_changes").get<int>();
            r.runs.push_back(rec);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string report_csv(const EvalReport& r) {
    std::ostringstream os;
    os << "run,track_id,seed,outcome,collision,score,steps,lane_changes\n";
    char buf[256];
    for (const auto& run : r.runs) {
        std::snprintf(buf, sizeof buf, "%d,%s,%llu,%s,%d,%.6f,%d,%d\n", run.run, run.track_id.c_str(),
                      static_cast<unsigned long long>(run.seed), env::to_string(run.outcome).c_str(),
                      run.outcome == env::Outcome::collision ? 1 : 0, run.score, run.steps, run.lane_changes);
        os << buf;
    }
    return os.str();
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + p.string());
    f << text;
    if (!f) throw IoError("failed writing " + p.string());
}

}  // namespace

void write_report(const EvalReport& r, const std::filesystem::path& dir, const std::string& stem) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_text(dir / (stem + ".report.json"), to_json(r).dump(2) + "\n");
    write_text(dir / (stem + ".report.csv"), report_csv(r));
}

EvalReport read_report(const std::filesystem::path& json_path) {
    std::ifstream f(json_path);
    if (!f) throw IoError("cannot open " + json_path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse " + json_path.string() + ": " + e.what());
    }
    return report_from_json(j);
}

std::optional<double> improvement_percent(double base_mean, double arm_mean) {
    if (base_mean == 0.0) return std::nullopt;
    return (base_mean - arm_mean) / base_mean * 100.0;
}

Comparison compare_reports(const std::vector<EvalReport>& reports) {
    // variant -> arm -> reports, arms in first-seen order
    std::map<std::string, std::vector<std::string>> arm_order;
    std::map<std::string, std::map<std::string, std::vector<const EvalReport*>>> groups;
    std::vector<std::string> variant_order;
    for (const auto& r : reports) {
        if (!groups.count(r.variant)) variant_order.push_back(r.variant);
        auto& by_arm = groups[r.variant];
        if (!by_arm.count(r.arm)) arm_order[r.variant].push_back(r.arm);
        by_arm[r.arm].push_back(&r);
    }
    Comparison c;
    for (const auto& variant : variant_order) {
        const auto& by_arm = groups[variant];
        if (!by_arm.count("base")) throw MissingBase();
        auto summarize = [&](const std::string& arm) {
            ArmSummary s;
            s.arm = arm;
            for (const auto* r : by_arm.at(arm)) {
                s.mean_collisions += r->collisions();
                s.mean_score += r->mean_score();
            }
            s.reports = by_arm.at(arm).size();
            s.mean_collisions /= static_cast<double>(s.reports);
            s.mean_score /= static_cast<double>(s.reports);
            return s;
        };
        VariantComparison vc;
        vc.variant = variant;
        vc.base = summarize("base");
        for (const auto& arm : arm_order[variant]) {
            if (arm == "base") continue;
            ArmSummary s = summarize(arm);
            s.improvement = improvement_percent(vc.base.mean_collisions, s.mean_collisions);
            if (!s.improvement) {
                c.warnings.push_back(variant + "/" + arm + ": base mean collisions is 0, improvement undefined");
            }
            vc.others.push_back(s);
        }
        c.variants.push_back(std::move(vc));
    }
    if (c.variants.empty()) throw MissingBase();
    return c;
}

std::string comparison_csv(const Comparison& c) {
    std::ostringstream os;
    os << "variant,arm,mean_collisions,reports,mean_score,improvement_pct\n";
    char buf[256];
    for (const auto& v : c.variants) {
        std::snprintf(buf, sizeof buf, "%s,base,%.6f,%zu,%.6f,\n", v.variant.c_str(), v.base.mean_collisions,
                      v.base.reports, v.base.mean_score);
        os << buf;
        for (const auto& s : v.others) {
            char imp[32] = "null";
            if (s.improvement) std::snprintf(imp, sizeof imp, "%.2f", *s.improvement);
            std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%zu,%.6f,%s\n", v.variant.c_str(), s.arm.c_str(),
                          s.mean_collisions, s.reports, s.mean_score, imp);
            os << buf;
        }
    }
    return os.str();
}

std::string comparison_table(const Comparison& c) {
    std::ostringstream os;
    char buf[256];
    for (const auto& v : c.variants) {
        std::snprintf(buf, sizeof buf, "%-10s base %8.2f", v.variant.c_str(), v.base.mean_collisions);
        os << buf;
        for (const auto& s : v.others) {
            if (s.improvement) {
                std::snprintf(buf, sizeof buf, " | %s %8.2f (%+.2f%%)", s.arm.c_str(), s.mean_collisions,
                              *s.improvement);
            } else {
                std::snprintf(buf, sizeof buf, " | %s %8.2f (n/a)", s.arm.c_str(), s.mean_collisions);
            }
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace hwy::harness
