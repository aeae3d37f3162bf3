#include "hwy/data/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

namespace hwy::data {

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::overlap: return "overlap";
        case ViolationKind::frame_gap: return "frame_gap";
        case ViolationKind::lane_skip: return "lane_skip";
        case ViolationKind::out_of_bounds: return "out_of_bounds";
        case ViolationKind::lane_mismatch: return "lane_mismatch";
        case ViolationKind::bad_dimensions: return "bad_dimensions";
        case ViolationKind::speed_bound: return "speed_bound";
    }
    return "unknown";
}

std::string describe(const Violation& v) {
    std::string s = to_string(v.kind) + " vehicle=" + std::to_string(v.vehicle_id) +
                    " frame=" + std::to_string(v.frame);
    if (v.kind == ViolationKind::overlap) s += " other=" + std::to_string(v.other_vehicle_id);
    return s;
}

std::vector<Violation> validate(const TrackSet& ts) {
    std::vector<Violation> out;
    const auto& g = ts.geometry;

    // Per-frame occupancy, built while checking per-vehicle invariants.
    struct Box {
        int vehicle_id;
        double x, y, length, width;
    };
    std::map<int, std::vector<Box>> frames;

    for (const auto& v : ts.vehicles) {
        if (v.points.empty() || !(v.length > 0) || !(v.width > 0)) {
            out.push_back({ViolationKind::bad_dimensions, v.points.empty() ? -1 : v.first_frame(),
                           v.vehicle_id});
            if (v.points.empty()) continue;
        }
        for (std::size_t i = 0; i < v.points.size(); ++i) {
            const auto& p = v.points[i];
            if (i > 0) {
                const auto& q = v.points[i - 1];
                if (p.frame != q.frame + 1) out.push_back({ViolationKind::frame_gap, p.frame, v.vehicle_id});
                if (std::abs(p.lane_id - q.lane_id) > 1) {
                    out.push_back({ViolationKind::lane_skip, p.frame, v.vehicle_id});
                }
            }
            if (p.x < 0.0 || p.x > g.track_length) {
                out.push_back({ViolationKind::out_of_bounds, p.frame, v.vehicle_id});
            }
            if (p.lane_id != g.nearest_lane(p.y)) {
                out.push_back({ViolationKind::lane_mismatch, p.frame, v.vehicle_id});
            }
            if (std::abs(p.vx) > kMaxAbsSpeed) {
                out.push_back({ViolationKind::speed_bound, p.frame, v.vehicle_id});
            }
            frames[p.frame].push_back({v.vehicle_id, p.x, p.y, v.length, v.width});
        }
    }

    for (auto& [frame, boxes] : frames) {
        std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) {
            return a.x < b.x || (a.x == b.x && a.vehicle_id < b.vehicle_id);
        });
        double max_len = 0.0;
        for (const auto& b : boxes) max_len = std::max(max_len, b.length);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            for (std::size_t j = i + 1; j < boxes.size(); ++j) {
                const Box& a = boxes[i];
                const Box& b = boxes[j];
                if (b.x - a.x >= max_len) break;  // sorted by x: nothing further can touch a
                if (boxes_overlap(a.x, a.y, a.length, a.width, b.x, b.y, b.length, b.width)) {
                    out.push_back({ViolationKind::overlap, frame, std::min(a.vehicle_id, b.vehicle_id),
                                   std::max(a.vehicle_id, b.vehicle_id)});
                }
            }
        }
    }
    return out;
}

}  // namespace hwy::data
