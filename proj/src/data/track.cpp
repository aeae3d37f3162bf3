#include "hwy/data/track.hpp"

#include <algorithm>
#include <cmath>

namespace hwy::data {

LaneGeometry LaneGeometry::standard(double lane_width, double track_length) {
    LaneGeometry g;
    g.lane_width = lane_width;
    g.track_length = track_length;
    g.lane_centers.clear();
    for (int i = 0; i < g.lane_count; ++i) g.lane_centers.push_back((i + 0.5) * lane_width);
    return g;
}

int LaneGeometry::nearest_lane(double y) const {
    int best = 0;
    double best_d = std::abs(y - lane_centers[0]);
    for (int i = 1; i < static_cast<int>(lane_centers.size()); ++i) {
        double d = std::abs(y - lane_centers[static_cast<std::size_t>(i)]);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

void LaneGeometry::check() const {
    if (lane_count != 3) throw ConfigError("lane_count must be 3");
    if (static_cast<int>(lane_centers.size()) != lane_count) {
        throw ConfigError("lane_centers must have one entry per lane");
    }
    if (!(lane_width > 0)) throw ConfigError("lane_width must be positive");
    if (!(track_length > 0)) throw ConfigError("track_length must be positive");
    for (std::size_t i = 1; i < lane_centers.size(); ++i) {
        if (std::abs(lane_centers[i] - lane_centers[i - 1] - lane_width) > 1e-9) {
            throw ConfigError("lane_centers must be ascending and spaced by lane_width");
        }
    }
}

const TrackPoint* VehicleTrack::at(int frame) const {
    if (!active_at(frame)) return nullptr;
    return &points[static_cast<std::size_t>(frame - first_frame())];
}

const VehicleTrack* TrackSet::find(int vehicle_id) const {
    auto it = std::lower_bound(vehicles.begin(), vehicles.end(), vehicle_id,
                               [](const VehicleTrack& v, int id) { return v.vehicle_id < id; });
    if (it == vehicles.end() || it->vehicle_id != vehicle_id) return nullptr;
    return &*it;
}

int TrackSet::last_frame() const {
    int last = -1;
    for (const auto& v : vehicles) {
        if (!v.points.empty()) last = std::max(last, v.last_frame());
    }
    return last;
}

bool boxes_overlap(double xa, double ya, double la, double wa,
                   double xb, double yb, double lb, double wb) {
    return std::abs(xa - xb) < 0.5 * (la + lb) && std::abs(ya - yb) < 0.5 * (wa + wb);
}

}  // namespace hwy::data
