#pragma once

#include "hwy/common/config.hpp"
#include "hwy/env/types.hpp"

namespace hwy::env {

struct RewardConfig {
    double r_end_of_track = 10.0;
    double r_lane_change = 0.1;
    double r_collision = 10.0;

    void check() const;
    static RewardConfig from_config(const Config& cfg);
};

/// r_end [reached_end] - r_lane_change [initiated_lane_change] - r_collision [collided]
double compute_reward(const StepEvents& events, const RewardConfig& cfg);

}  // namespace hwy::env
