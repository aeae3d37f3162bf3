#include "hwy/env/reward.hpp"

#include <algorithm>

namespace hwy::env {

std::string to_string(Action a) {
    switch (a) {
        case Action::left_change: return "LLC";
        case Action::lane_keep: return "LK";
        case Action::right_change: return "RLC";
    }
    return "?";
}

Action action_from_index(int i) {
    if (i < 0 || i >= kActionCount) throw Error("action index out of range: " + std::to_string(i));
    return static_cast<Action>(i);
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::running: return "running";
        case Outcome::collision: return "collision";
        case Outcome::end_of_track: return "end_of_track";
        case Outcome::truncated: return "truncated";
    }
    return "?";
}

void RewardConfig::check() const {
    if (r_end_of_track < 0 || r_lane_change < 0 || r_collision < 0) {
        throw ConfigError("reward magnitudes must be non-negative");
    }
    if (!(r_lane_change < std::min(r_end_of_track, r_collision))) {
        throw ConfigError("lane change penalty must stay below the terminal rewards");
    }
}

RewardConfig RewardConfig::from_config(const Config& cfg) {
    RewardConfig r;
    r.r_end_of_track = cfg.get_double("reward.end_of_track", r.r_end_of_track);
    r.r_lane_change = cfg.get_double("reward.lane_change", r.r_lane_change);
    r.r_collision = cfg.get_double("reward.collision", r.r_collision);
    r.check();
    return r;
}

double compute_reward(const StepEvents& events, const RewardConfig& cfg) {
    double r = 0.0;
    if (events.reached_end) r += cfg.r_end_of_track;
    if (events.initiated_lane_change) r -= cfg.r_lane_change;
    if (events.collided) r -= cfg.r_collision;
    return r;
}

}  // namespace hwy::env
