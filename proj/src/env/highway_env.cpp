#include "hwy/env/highway_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hwy::env {

void EnvConfig::check() const {
    if (!(physics_dt > 0) || !(decision_interval >= physics_dt) || !(lane_change_duration > 0) ||
        !(radar_range > 0) || !(ego_length > 0) || !(ego_width > 0) || max_steps < 1 ||
        !(intention_horizon > 0)) {
        throw ConfigError("invalid environment configuration");
    }
    double substeps = decision_interval / physics_dt;
    if (std::abs(substeps - std::round(substeps)) > 1e-9) {
        throw ConfigError("env.decision_interval must be a multiple of env.physics_dt");
    }
    reward.check();
    idm.check();
}

EnvConfig EnvConfig::from_config(const Config& cfg) {
    EnvConfig e;
    e.decision_interval = cfg.get_double("env.decision_interval", e.decision_interval);
    e.physics_dt = cfg.get_double("env.physics_dt", e.physics_dt);
    e.lane_change_duration = cfg.get_double("env.lane_change_duration", e.lane_change_duration);
    e.radar_range = cfg.get_double("env.radar_range", e.radar_range);
    e.obs_mode = parse_obs_mode(cfg.get_string("env.obs_mode", "base"));
    e.reward = RewardConfig::from_config(cfg);
    e.idm = idm::IdmParams::from_config(cfg);
    e.ego_length = cfg.get_double("env.ego_length", e.ego_length);
    e.ego_width = cfg.get_double("env.ego_width", e.ego_width);
    e.penalize_masked_actions = cfg.get_bool("env.penalize_masked_actions", e.penalize_masked_actions);
    e.max_steps = static_cast<int>(cfg.get_int("env.max_steps", e.max_steps));
    e.intention_horizon = cfg.get_double("intention.horizon", e.intention_horizon);
    e.check();
    return e;
}

SpawnConfig SpawnConfig::from_config(const Config& cfg) {
    SpawnConfig s;
    s.random = cfg.get_bool("spawn.random", s.random);
    s.lane = static_cast<int>(cfg.get_int("spawn.lane", s.lane));
    s.x = cfg.get_double("spawn.x", s.x);
    s.v = cfg.get_double("spawn.v", s.v);
    s.x_min = cfg.get_double("spawn.x_min", s.x_min);
    s.x_max = cfg.get_double("spawn.x_max", s.x_max);
    s.v_min = cfg.get_double("spawn.v_min", s.v_min);
    s.v_max = cfg.get_double("spawn.v_max", s.v_max);
    s.max_retries = static_cast<int>(cfg.get_int("spawn.max_retries", s.max_retries));
    s.min_gap = cfg.get_double("spawn.min_gap", s.min_gap);
    return s;
}

HighwayEnv::HighwayEnv(EnvConfig cfg, std::unique_ptr<intent::IntentionProvider> intentions)
    : cfg_(std::move(cfg)), intentions_(std::move(intentions)) {
    cfg_.check();
    if (!intentions_) intentions_ = std::make_unique<intent::NoIntentionProvider>(cfg_.intention_horizon);
}

void HighwayEnv::set_track(std::shared_ptr<const data::TrackSet> ts) {
    if (!ts) throw Error("null track set");
    if (std::abs(ts->dt - cfg_.physics_dt) > 1e-12) {
        throw ConfigError("track dt does not match env.physics_dt");
    }
    ts_ = std::move(ts);
    last_data_frame_ = ts_->last_frame();
}

bool HighwayEnv::spawn_is_free(int lane, double x) const {
    const double y = ts_->geometry.center(lane);
    for (const auto& v : ts_->vehicles) {
        const data::TrackPoint* p = v.at(0);
        if (p == nullptr) continue;
        if (data::boxes_overlap(x, y, cfg_.ego_length, cfg_.ego_width, p->x, p->y, v.length, v.width)) return false;
        if (spawn_.min_gap > 0.0 && std::abs(p->y - y) < 0.5 * (v.width + cfg_.ego_width)) {
            double gap = std::abs(p->x - x) - 0.5 * (v.length + cfg_.ego_length);
            if (gap < spawn_.min_gap) return false;
        }
    }
    return true;
}

Observation HighwayEnv::reset(std::shared_ptr<const data::TrackSet> ts, const SpawnConfig& spawn,
                              std::uint64_t seed) {
    set_track(std::move(ts));
    spawn_ = spawn;
    return reset(seed);
}

Observation HighwayEnv::reset(std::uint64_t seed) {
    if (!ts_) throw Error("reset() without a track set");
    const auto& g = ts_->geometry;
    Rng rng(seed);

    int lane = spawn_.lane;
    double x = spawn_.x;
    double v = spawn_.v;
    bool placed = false;
    if (!spawn_.random) {
        if (!g.valid_lane(lane)) throw ConfigError("spawn lane out of range");
        placed = spawn_is_free(lane, x);
    } else {
        for (int attempt = 0; attempt <= spawn_.max_retries && !placed; ++attempt) {
            lane = spawn_.lane >= 0 ? spawn_.lane
                                    : static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(g.lane_count)));
            x = rng.uniform(spawn_.x_min, spawn_.x_max);
            v = rng.uniform(spawn_.v_min, spawn_.v_max);
            placed = spawn_is_free(lane, x);
        }
    }
    if (!placed) throw NoFreeSpawn("no collision-free ego placement on track " + ts_->track_id);

    ego_ = EgoState{};
    ego_.x = x;
    ego_.y = g.center(lane);
    ego_.v = std::max(0.0, v);
    ego_.lane_id = lane;
    frame_ = 0;
    done_ = false;
    steps_ = 0;
    lane_changes_ = 0;
    score_ = 0.0;
    intentions_->reset(*ts_, seed);
    return observe();
}

NeighborSlots HighwayEnv::neighbors() const {
    NeighborSlots slots;
    for (int i = 0; i < kSlotCount; ++i) {
        slots[static_cast<std::size_t>(i)] =
            NeighborSlot::absent(kAllSlots[static_cast<std::size_t>(i)], cfg_.radar_range, cfg_.intention_horizon);
    }
    struct Best {
        const data::VehicleTrack* vehicle = nullptr;
        const data::TrackPoint* point = nullptr;
        double dist = std::numeric_limits<double>::infinity();
    };
    std::array<Best, kSlotCount> best;

    for (const auto& v : ts_->vehicles) {
        const data::TrackPoint* p = v.at(frame_);
        if (p == nullptr) continue;
        const double dx = p->x - ego_.x;
        if (std::abs(dx) > cfg_.radar_range) continue;
        const int rel = p->lane_id - ego_.lane_id;
        int base = 0;
        if (rel == 0) base = 0;
        else if (rel == +1) base = 2;
        else if (rel == -1) base = 4;
        else continue;
        const int idx = base + (dx >= 0.0 ? 0 : 1);
        Best& b = best[static_cast<std::size_t>(idx)];
        const double d = std::abs(dx);
        // Vehicles are stored by ascending id, so strict < keeps the lower id on ties.
        if (d < b.dist) {
            b.vehicle = &v;
            b.point = p;
            b.dist = d;
        }
    }

    for (int i = 0; i < kSlotCount; ++i) {
        const Best& b = best[static_cast<std::size_t>(i)];
        if (b.vehicle == nullptr) continue;
        NeighborSlot& s = slots[static_cast<std::size_t>(i)];
        s.present = true;
        s.dx = b.point->x - ego_.x;
        s.dv = b.point->vx - ego_.v;
        s.vehicle_id = b.vehicle->vehicle_id;
        s.intention = cfg_.obs_mode == ObsMode::ttlc ? intentions_->intention(*ts_, *b.vehicle, frame_)
                                                     : intent::Intention::lane_keep(cfg_.intention_horizon);
    }
    return slots;
}

Observation HighwayEnv::observe() const {
    EncodingScale scale;
    scale.radar_range = cfg_.radar_range;
    scale.speed = cfg_.idm.v_desired;
    scale.horizon = cfg_.intention_horizon;
    return encode_observation(neighbors(), ego_, cfg_.obs_mode, scale);
}

double HighwayEnv::ego_acceleration() const {
    int lane = ego_.lane_id;
    if (ego_.lane_change) {
        lane = ego_.lane_change->progress > 0.5 ? ego_.lane_change->target_lane : ego_.lane_change->source_lane;
    }
    const data::VehicleTrack* lead = nullptr;
    const data::TrackPoint* lead_p = nullptr;
    double best_dx = std::numeric_limits<double>::infinity();
    for (const auto& v : ts_->vehicles) {
        const data::TrackPoint* p = v.at(frame_);
        if (p == nullptr || p->lane_id != lane) continue;
        double dx = p->x - ego_.x;
        if (dx > 0.0 && dx < best_dx) {
            best_dx = dx;
            lead = &v;
            lead_p = p;
        }
    }
    if (lead == nullptr) return idm::free_road_acceleration(ego_.v, cfg_.idm);
    double gap = best_dx - 0.5 * (lead->length + cfg_.ego_length);
    if (gap <= 0.0) return -cfg_.idm.b_max;
    return idm::acceleration(ego_.v, gap, std::max(0.0, lead_p->vx), cfg_.idm);
}

void HighwayEnv::advance_lateral() {
    if (!ego_.lane_change) return;
    auto& lc = *ego_.lane_change;
    const auto& g = ts_->geometry;
    lc.progress = std::min(1.0, lc.progress + cfg_.physics_dt / cfg_.lane_change_duration);
    if (lc.progress >= 1.0 - 1e-9) {
        ego_.lane_id = lc.target_lane;
        ego_.y = g.center(lc.target_lane);
        ego_.lane_change.reset();
        return;
    }
    ego_.y = g.center(lc.source_lane) + (g.center(lc.target_lane) - g.center(lc.source_lane)) * lc.progress;
    ego_.lane_id = lc.progress > 0.5 ? lc.target_lane : lc.source_lane;
}

bool HighwayEnv::ego_collides() const {
    for (const auto& v : ts_->vehicles) {
        const data::TrackPoint* p = v.at(frame_);
        if (p == nullptr) continue;
        if (data::boxes_overlap(ego_.x, ego_.y, cfg_.ego_length, cfg_.ego_width, p->x, p->y, v.length, v.width)) {
            return true;
        }
    }
    return false;
}

StepResult HighwayEnv::step(Action a) {
    if (done_) throw EpisodeDone();
    const auto& g = ts_->geometry;
    StepResult result;
    StepEvents& ev = result.events;

    if (a != Action::lane_keep) {
        const int dir = a == Action::left_change ? +1 : -1;
        const int target = ego_.lane_id + dir;
        if (ego_.lane_change || !g.valid_lane(target)) {
            ev.masked_action = true;
        } else {
            ego_.lane_change = LaneChangeState{ego_.lane_id, target, 0.0};
            ev.initiated_lane_change = true;
            ++lane_changes_;
        }
    }

    const int substeps = static_cast<int>(std::lround(cfg_.decision_interval / cfg_.physics_dt));
    Outcome outcome = Outcome::running;
    for (int k = 0; k < substeps && outcome == Outcome::running; ++k) {
        const double acc = ego_acceleration();
        const double v_next = std::max(0.0, ego_.v + acc * cfg_.physics_dt);
        ego_.x += 0.5 * (ego_.v + v_next) * cfg_.physics_dt;
        ego_.v = v_next;
        advance_lateral();
        ++frame_;

        if (ego_collides()) {
            outcome = Outcome::collision;
            ev.collided = true;
        } else if (ego_.x >= g.track_length) {
            outcome = Outcome::end_of_track;
            ev.reached_end = true;
        } else if (last_data_frame_ >= 0 && frame_ > last_data_frame_) {
            outcome = Outcome::truncated;
        }
    }
    ++steps_;
    if (outcome == Outcome::running && steps_ >= cfg_.max_steps) outcome = Outcome::truncated;

    result.reward = compute_reward(ev, cfg_.reward);
    if (ev.masked_action && cfg_.penalize_masked_actions) result.reward -= cfg_.reward.r_lane_change;
    result.outcome = outcome;
    result.done = outcome != Outcome::running;
    done_ = result.done;
    score_ += result.reward;
    result.observation = observe();
    return result;
}

}  // namespace hwy::env
