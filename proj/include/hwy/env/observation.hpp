#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hwy/env/types.hpp"
#include "hwy/intent/intention.hpp"

namespace hwy::env {

enum class ObsMode { base, ttlc };

ObsMode parse_obs_mode(const std::string& s);
std::string to_string(ObsMode m);

inline constexpr int kBaseObservationLength = 22;
inline constexpr int kTtlcObservationLength = 46;
inline constexpr int kBaseLayoutVersion = 1;
inline constexpr int kTtlcLayoutVersion = 2;

int observation_length(ObsMode m);
int layout_version(ObsMode m);

enum class Slot { same_lead, same_rear, left_lead, left_rear, right_lead, right_rear };
inline constexpr int kSlotCount = 6;
inline constexpr std::array<Slot, kSlotCount> kAllSlots{Slot::same_lead, Slot::same_rear, Slot::left_lead,
                                                        Slot::left_rear, Slot::right_lead, Slot::right_rear};

std::string to_string(Slot s);
inline bool is_lead(Slot s) {
    return s == Slot::same_lead || s == Slot::left_lead || s == Slot::right_lead;
}

struct NeighborSlot {
    Slot slot = Slot::same_lead;
    bool present = false;
    double dx = 0.0;  // neighbour minus ego [m]
    double dv = 0.0;  // neighbour minus ego [m/s]
    intent::Intention intention;
    int vehicle_id = -1;

    /// Sentinel for an empty slot: dx = +-range, dv = 0, lane-keep intention.
    static NeighborSlot absent(Slot s, double radar_range, double horizon);
};

using NeighborSlots = std::array<NeighborSlot, kSlotCount>;

struct LaneChangeState {
    int source_lane = 0;
    int target_lane = 0;
    double progress = 0.0;  // [0, 1]
};

struct EgoState {
    double x = 0.0;
    double y = 0.0;
    double v = 0.0;
    int lane_id = 1;
    std::optional<LaneChangeState> lane_change;
};

struct EncodingScale {
    double radar_range = 250.0;
    double speed = 130.0 / 3.6;  // speeds are divided by this (the IDM desired speed)
    double horizon = 5.0;
};

/// Base layout: ego lane one-hot (3), ego speed (1), then per slot
/// [present, dx / range, dv / speed]. The TTLC layout appends per slot
/// [p_lk, p_llc, p_rlc, ttlc / horizon]. Speed terms are clipped to [-1, 1].
Observation encode_observation(const NeighborSlots& slots, const EgoState& ego, ObsMode mode,
                               const EncodingScale& scale);

/// Feature name for every index of the layout.
std::vector<std::string> observation_layout(ObsMode mode);

/// `index,feature` CSV of observation_layout(mode).
std::string observation_layout_csv(ObsMode mode);

}  // namespace hwy::env
