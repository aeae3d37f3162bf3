#pragma once

#include <string>
#include <vector>

#include "hwy/common/error.hpp"

namespace hwy::data {

// Straight three-lane road. Lane 0 is the rightmost lane; lane indices grow
// to the left, as do lateral offsets.
struct LaneGeometry {
    int lane_count = 3;
    double lane_width = 3.5;
    double track_length = 420.0;
    std::vector<double> lane_centers{1.75, 5.25, 8.75};

    static LaneGeometry standard(double lane_width = 3.5, double track_length = 420.0);

    /// Lane whose center is nearest to `y`; ties go to the lower index.
    int nearest_lane(double y) const;
    double center(int lane) const { return lane_centers.at(static_cast<std::size_t>(lane)); }
    bool valid_lane(int lane) const { return lane >= 0 && lane < lane_count; }

    /// Throws ConfigError when an invariant does not hold.
    void check() const;
};

// One sample of a replayed vehicle. x and y locate the center of the
// vehicle's bounding box.
struct TrackPoint {
    int frame = 0;
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    int lane_id = 0;
};

struct VehicleTrack {
    int vehicle_id = 0;
    double length = 5.0;
    double width = 2.0;
    std::vector<TrackPoint> points;  // contiguous frames, ascending

    int first_frame() const { return points.front().frame; }
    int last_frame() const { return points.back().frame; }
    bool active_at(int frame) const {
        return !points.empty() && frame >= first_frame() && frame <= last_frame();
    }
    /// nullptr when the vehicle is not on the road at `frame`.
    const TrackPoint* at(int frame) const;
};

struct TrackSet {
    LaneGeometry geometry;
    double dt = 0.1;
    std::vector<VehicleTrack> vehicles;  // ascending vehicle_id
    std::string track_id;

    bool empty() const { return vehicles.empty(); }
    const VehicleTrack* find(int vehicle_id) const;
    /// Last frame carrying any data; -1 for an empty set.
    int last_frame() const;
};

/// Axis-aligned bounding-box overlap. Touching edges do not overlap.
bool boxes_overlap(double xa, double ya, double la, double wa,
                   double xb, double yb, double lb, double wb);

}  // namespace hwy::data
