#pragma once

#include <string>
#include <vector>

#include "hwy/data/track.hpp"

namespace hwy::data {

enum class ViolationKind {
    overlap,         // two bounding boxes intersect at a common frame
    frame_gap,       // non-contiguous frames within one vehicle
    lane_skip,       // lane_id jumps by more than one lane between frames
    out_of_bounds,   // x outside [0, track_length]
    lane_mismatch,   // lane_id is not the nearest lane of y
    bad_dimensions,  // non-positive length/width or empty trajectory
    speed_bound,     // |vx| above the sanity bound
};

struct Violation {
    ViolationKind kind;
    int frame = -1;
    int vehicle_id = -1;
    int other_vehicle_id = -1;  // overlap only
};

std::string to_string(ViolationKind kind);
std::string describe(const Violation& v);

inline constexpr double kMaxAbsSpeed = 60.0;

/// Every invariant violation in `ts`; an empty result means the set is valid.
std::vector<Violation> validate(const TrackSet& ts);

}  // namespace hwy::data
