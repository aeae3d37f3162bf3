#pragma once

#include <cstdint>
#include <vector>

#include "hwy/common/config.hpp"
#include "hwy/data/track.hpp"
#include "hwy/idm/idm.hpp"

namespace hwy::data {

struct LaneChangeEvent {
    int vehicle = 0;          // index among the initially placed vehicles
    double start_time = 0.0;  // lateral motion begins here [s]
    int direction = +1;       // +1 toward the left (higher lane index), -1 right
    double duration = 3.0;    // [s]
    int from_lane = -1;       // pins the vehicle's starting lane; -1 leaves it random
};

// Cut-ins aimed at a nominal ego path: a probe that starts at probe_x0 in
// probe_lane at probe_speed and then drives on a free road under IDM. Each cutter is placed so that at its
// start time it sits `offset` metres ahead of the probe in an adjacent lane and
// then merges into the probe lane. Decoys are placed the same way but keep
// their lane.
struct CutInConfig {
    int count = 0;
    int decoys = 0;
    int probe_lane = 1;
    double probe_x0 = 0.0;
    double probe_speed = 33.0;
    double time_min = 4.0;
    double time_max = 10.0;
    double offset_min = -2.0;
    double offset_max = 12.0;
    double speed_min = 20.0;
    double speed_max = 26.0;
    double duration = 3.0;
    bool clear_probe_lane = true;  // no initial background vehicle in the probe lane
};

struct SynthConfig {
    LaneGeometry geometry;
    double dt = 0.1;
    double duration = 40.0;
    int vehicle_count = 0;
    double spawn_rate = 0.0;  // vehicles per second entering at x = 0
    double speed_min = 20.0;
    double speed_max = 30.0;
    double vehicle_length = 5.0;
    double vehicle_width = 2.0;
    std::vector<LaneChangeEvent> lane_change_events;
    int random_lane_changes = 0;
    double lane_change_duration = 3.0;
    CutInConfig cut_in;
    idm::IdmParams idm;  // v_desired is replaced by each vehicle's drawn speed
    int max_attempts = 200;

    /// Reads data.* keys (and idm.* for the car-following parameters).
    static SynthConfig from_config(const Config& cfg);
};

class InfeasibleConfig : public Error {
public:
    using Error::Error;
};

/// Deterministic for a given (cfg, seed). Longitudinal motion is IDM-driven,
/// lane changes are linear lateral ramps. The result is collision-free and
/// passes validate(); attempts that are not are discarded and re-drawn.
TrackSet generate_synthetic(const SynthConfig& cfg, std::uint64_t seed);

/// Parses `v:start:dir:dur[:from_lane]` items separated by ';'.
std::vector<LaneChangeEvent> parse_lane_change_events(const std::string& text);

}  // namespace hwy::data
