#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwy/env/types.hpp"
#include "hwy/harness/experiment.hpp"

namespace hwy::harness {

struct RunRecord {
    int run = 0;
    std::string track_id;
    std::uint64_t seed = 0;
    env::Outcome outcome = env::Outcome::running;
    double score = 0.0;
    int steps = 0;
    int lane_changes = 0;
};

struct EvalReport {
    std::string variant;
    std::string arm;
    std::uint64_t train_seed = 0;
    std::string obs_mode;
    int obs_dim = 0;
    std::vector<RunRecord> runs;

    int collisions() const;
    double mean_score() const;
    std::map<std::string, int> outcome_histogram() const;
};

/// Greedy (argmax, lowest index on ties) rollouts of `policy` on the test
/// tracks, round-robin, run r seeded by eval_run_seed(seed, r).
EvalReport evaluate_policy(const ExperimentConfig& cfg, const nn::Network& policy, rl::Variant variant,
                           const ArmSpec& arm, std::uint64_t seed, const TrackList& test);

nlohmann::json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);
/// `run,track_id,seed,outcome,collision,score,steps,lane_changes`
std::string report_csv(const EvalReport& r);

/// Writes <stem>.report.json and <stem>.report.csv into dir.
void write_report(const EvalReport& r, const std::filesystem::path& dir, const std::string& stem);
EvalReport read_report(const std::filesystem::path& json_path);

class MissingBase : public Error {
public:
    MissingBase() : Error("no report tagged with the base arm") {}
};

/// (base - arm) / base * 100, or nothing when base is 0.
std::optional<double> improvement_percent(double base_mean, double arm_mean);

struct ArmSummary {
    std::string arm;
    double mean_collisions = 0.0;  // averaged over seeds
    std::size_t reports = 0;
    double mean_score = 0.0;
    std::optional<double> improvement;
};

struct VariantComparison {
    std::string variant;
    ArmSummary base;
    std::vector<ArmSummary> others;
};

struct Comparison {
    std::vector<VariantComparison> variants;
    std::vector<std::string> warnings;
};

Comparison compare_reports(const std::vector<EvalReport>& reports);
/// `variant,arm,mean_collisions,reports,mean_score,improvement_pct`
std::string comparison_csv(const Comparison& c);
std::string comparison_table(const Comparison& c);

}  // namespace hwy::harness
