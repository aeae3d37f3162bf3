#include "hwy/env/observation.hpp"

#include <algorithm>

namespace hwy::env {

ObsMode parse_obs_mode(const std::string& s) {
    if (s == "base") return ObsMode::base;
    if (s == "ttlc") return ObsMode::ttlc;
    throw ConfigError("unknown observation mode '" + s + "'");
}

std::string to_string(ObsMode m) { return m == ObsMode::base ? "base" : "ttlc"; }

int observation_length(ObsMode m) {
    return m == ObsMode::base ? kBaseObservationLength : kTtlcObservationLength;
}

int layout_version(ObsMode m) { return m == ObsMode::base ? kBaseLayoutVersion : kTtlcLayoutVersion; }

std::string to_string(Slot s) {
    switch (s) {
        case Slot::same_lead: return "same_lead";
        case Slot::same_rear: return "same_rear";
        case Slot::left_lead: return "left_lead";
        case Slot::left_rear: return "left_rear";
        case Slot::right_lead: return "right_lead";
        case Slot::right_rear: return "right_rear";
    }
    return "?";
}

NeighborSlot NeighborSlot::absent(Slot s, double radar_range, double horizon) {
    NeighborSlot n;
    n.slot = s;
    n.present = false;
    n.dx = is_lead(s) ? radar_range : -radar_range;
    n.dv = 0.0;
    n.intention = intent::Intention::lane_keep(horizon);
    return n;
}

Observation encode_observation(const NeighborSlots& slots, const EgoState& ego, ObsMode mode,
                               const EncodingScale& scale) {
    Observation obs;
    obs.layout_version = layout_version(mode);
    auto& f = obs.features;
    f.reserve(static_cast<std::size_t>(observation_length(mode)));
    for (int lane = 0; lane < 3; ++lane) f.push_back(ego.lane_id == lane ? 1.0 : 0.0);
    f.push_back(std::clamp(ego.v / scale.speed, -1.0, 1.0));
    for (const auto& s : slots) {
        f.push_back(s.present ? 1.0 : 0.0);
        f.push_back(std::clamp(s.dx / scale.radar_range, -1.0, 1.0));
        f.push_back(std::clamp(s.dv / scale.speed, -1.0, 1.0));
    }
    if (mode == ObsMode::ttlc) {
        for (const auto& s : slots) {
            f.push_back(s.intention.p_lk);
            f.push_back(s.intention.p_llc);
            f.push_back(s.intention.p_rlc);
            f.push_back(std::clamp(s.intention.ttlc / scale.horizon, 0.0, 1.0));
        }
    }
    return obs;
}

std::vector<std::string> observation_layout(ObsMode mode) {
    std::vector<std::string> names{"ego.lane0", "ego.lane1", "ego.lane2", "ego.speed"};
    for (Slot s : kAllSlots) {
        for (const char* field : {".present", ".dx", ".dv"}) names.push_back(to_string(s) + field);
    }
    if (mode == ObsMode::ttlc) {
        for (Slot s : kAllSlots) {
            for (const char* field : {".p_lk", ".p_llc", ".p_rlc", ".ttlc"}) names.push_back(to_string(s) + field);
        }
    }
    return names;
}

std::string observation_layout_csv(ObsMode mode) {
    std::string out = "index,feature\n";
    auto names = observation_layout(mode);
    for (std::size_t i = 0; i < names.size(); ++i) out += std::to_string(i) + "," + names[i] + "\n";
    return out;
}

}  // namespace hwy::env
