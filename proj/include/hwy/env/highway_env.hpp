#pragma once

#include <cstdint>
#include <memory>

#include "hwy/common/config.hpp"
#include "hwy/common/random.hpp"
#include "hwy/data/track.hpp"
#include "hwy/env/observation.hpp"
#include "hwy/env/reward.hpp"
#include "hwy/env/types.hpp"
#include "hwy/idm/idm.hpp"
#include "hwy/intent/intention.hpp"

namespace hwy::env {

struct EnvConfig {
    double decision_interval = 1.0;
    double physics_dt = 0.1;
    double lane_change_duration = 1.0;
    double radar_range = 250.0;
    ObsMode obs_mode = ObsMode::base;
    RewardConfig reward;
    idm::IdmParams idm;
    double ego_length = 5.0;
    double ego_width = 2.0;
    bool penalize_masked_actions = false;
    int max_steps = 200;
    double intention_horizon = 5.0;

    void check() const;
    static EnvConfig from_config(const Config& cfg);
};

struct SpawnConfig {
    bool random = false;
    int lane = 1;      // fixed spawn; with random=true, -1 draws the lane too
    double x = 0.0;
    double v = 25.0;
    double x_min = 0.0;
    double x_max = 0.0;
    double v_min = 25.0;
    double v_max = 33.0;
    int max_retries = 100;
    double min_gap = 0.0;  // required bumper gap to same-lane traffic, on top of no overlap

    static SpawnConfig from_config(const Config& cfg);
};

class NoFreeSpawn : public Error {
public:
    using Error::Error;
};

// Replays a TrackSet as non-reactive background traffic around an ego vehicle
// that is driven longitudinally by IDM and laterally by the agent's discrete
// decisions. One decision spans decision_interval / physics_dt substeps;
// collisions are checked at every substep.
class HighwayEnv final : public Environment {
public:
    HighwayEnv(EnvConfig cfg, std::unique_ptr<intent::IntentionProvider> intentions);

    void set_track(std::shared_ptr<const data::TrackSet> ts);
    void set_spawn(const SpawnConfig& spawn) { spawn_ = spawn; }

    Observation reset(std::shared_ptr<const data::TrackSet> ts, const SpawnConfig& spawn, std::uint64_t seed);
    Observation reset(std::uint64_t seed) override;
    StepResult step(Action a) override;
    int observation_size() const override { return observation_length(cfg_.obs_mode); }

    /// Nearest vehicle ahead and behind in the ego, left and right lanes.
    NeighborSlots neighbors() const;
    Observation observe() const;

    const EnvConfig& config() const { return cfg_; }
    const EgoState& ego() const { return ego_; }
    const data::TrackSet& track() const { return *ts_; }
    int frame() const { return frame_; }
    bool done() const { return done_; }
    int steps() const { return steps_; }
    int lane_changes() const { return lane_changes_; }
    double score() const { return score_; }

private:
    bool ego_collides() const;
    double ego_acceleration() const;
    bool spawn_is_free(int lane, double x) const;
    void advance_lateral();

    EnvConfig cfg_;
    std::unique_ptr<intent::IntentionProvider> intentions_;
    std::shared_ptr<const data::TrackSet> ts_;
    SpawnConfig spawn_;
    EgoState ego_;
    int frame_ = 0;
    int last_data_frame_ = -1;
    bool done_ = true;
    int steps_ = 0;
    int lane_changes_ = 0;
    double score_ = 0.0;
};

}  // namespace hwy::env
