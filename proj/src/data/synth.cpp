#include "hwy/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "hwy/common/random.hpp"
#include "hwy/common/seed.hpp"
#include "hwy/data/validate.hpp"

namespace hwy::data {
namespace {

struct PendingChange {
    int frame;
    int direction;  // 0: pick any valid side when it fires
    double duration;
    bool strict;    // scripted: must fire exactly on time or the attempt fails
    int postpones_left;
};

struct SimVehicle {
    double length = 5.0;
    double width = 2.0;
    double x = 0.0;
    double v = 0.0;
    double v_desired = 0.0;
    int lane = 0;
    bool changing = false;
    int target_lane = 0;
    int change_start = 0;
    double change_duration = 0.0;
    int arrival_frame = 0;
    bool active = false;
    bool finished = false;
    std::vector<PendingChange> changes;  // ascending frame
    std::vector<TrackPoint> points;
};

class AttemptFailed {};

int to_frame(double t, double dt) { return static_cast<int>(std::floor(t / dt + 1e-9)); }

class Simulator {
public:
    Simulator(const SynthConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng), g_(cfg.geometry) {}

    TrackSet run(const std::string& track_id) {
        place_cut_ins();
        place_initial();
        schedule_random_changes();
        schedule_arrivals();

        const int frames = static_cast<int>(std::lround(cfg_.duration / cfg_.dt));
        for (int f = 0; f <= frames; ++f) {
            activate_arrivals(f);
            start_changes(f);
            record(f);
            if (f < frames) advance(f);
        }

        TrackSet ts;
        ts.geometry = g_;
        ts.dt = cfg_.dt;
        ts.track_id = track_id;
        for (std::size_t i = 0; i < order_.size(); ++i) {
            SimVehicle& sv = vehicles_[order_[i]];
            if (sv.points.empty()) continue;
            VehicleTrack vt;
            vt.vehicle_id = static_cast<int>(i) + 1;
            vt.length = sv.length;
            vt.width = sv.width;
            vt.points = std::move(sv.points);
            ts.vehicles.push_back(std::move(vt));
        }
        return ts;
    }

private:
    double lateral(const SimVehicle& sv, int frame) const {
        if (!sv.changing) return g_.center(sv.lane);
        double p = std::clamp((frame - sv.change_start) * cfg_.dt / sv.change_duration, 0.0, 1.0);
        return g_.center(sv.lane) + (g_.center(sv.target_lane) - g_.center(sv.lane)) * p;
    }

    bool occupies(const SimVehicle& sv, int lane) const {
        return sv.lane == lane || (sv.changing && sv.target_lane == lane);
    }

    // Clearance between a candidate position and already placed vehicles in
    // the same lane, using a 1.2 s headway on the follower's speed.
    bool placement_clear(int lane, double x, double v, double length) const {
        for (const auto& o : vehicles_) {
            if (o.arrival_frame != 0 || o.lane != lane) continue;
            double follower_v = (o.x < x) ? o.v : v;
            double gap = std::abs(o.x - x) - 0.5 * (o.length + length);
            if (gap < cfg_.idm.s0 + 1.2 * follower_v) return false;
        }
        return true;
    }

    SimVehicle make_vehicle(int lane, double x, double v) const {
        SimVehicle sv;
        sv.length = cfg_.vehicle_length;
        sv.width = cfg_.vehicle_width;
        sv.lane = lane;
        sv.x = x;
        sv.v = v;
        sv.v_desired = v;
        sv.active = true;
        return sv;
    }

    // Free-road IDM trajectory of the probe, integrated like the simulator.
    double probe_position(double t) const {
        const auto& c = cfg_.cut_in;
        double x = c.probe_x0;
        double v = c.probe_speed;
        const int steps = to_frame(t, cfg_.dt);
        for (int i = 0; i < steps; ++i) {
            const double v_next = std::max(0.0, v + idm::free_road_acceleration(v, cfg_.idm) * cfg_.dt);
            x += 0.5 * (v + v_next) * cfg_.dt;
            v = v_next;
        }
        return x;
    }

    void place_cut_ins() {
        const auto& c = cfg_.cut_in;
        if (c.count + c.decoys == 0) return;
        if (!g_.valid_lane(c.probe_lane)) throw ConfigError("cut-in probe lane out of range");
        for (int k = 0; k < c.count + c.decoys; ++k) {
            bool placed = false;
            for (int tries = 0; tries < 200 && !placed; ++tries) {
                double t = rng_.uniform(c.time_min, c.time_max);
                double v = rng_.uniform(c.speed_min, c.speed_max);
                double offset = rng_.uniform(c.offset_min, c.offset_max);
                int side = 0;
                if (c.probe_lane == 0) side = +1;
                else if (c.probe_lane == g_.lane_count - 1) side = -1;
                else side = rng_.bernoulli(0.5) ? +1 : -1;
                int lane = c.probe_lane + side;
                double x0 = probe_position(t) + offset - v * t;
                if (x0 < 10.0 || x0 > g_.track_length - 20.0) continue;
                if (!placement_clear(lane, x0, v, cfg_.vehicle_length)) continue;
                SimVehicle sv = make_vehicle(lane, x0, v);
                if (k < c.count) {
                    sv.changes.push_back({to_frame(t, cfg_.dt), -side, c.duration, true, 0});
                }
                vehicles_.push_back(std::move(sv));
                placed = true;
            }
            if (!placed) throw AttemptFailed{};
        }
    }

    void place_initial() {
        const std::size_t first_scripted = vehicles_.size();
        std::vector<int> pinned(static_cast<std::size_t>(cfg_.vehicle_count), -1);
        for (const auto& e : cfg_.lane_change_events) {
            if (e.from_lane >= 0) pinned[static_cast<std::size_t>(e.vehicle)] = e.from_lane;
        }
        std::vector<std::size_t> initial_index;
        for (int i = 0; i < cfg_.vehicle_count; ++i) {
            bool placed = false;
            for (int tries = 0; tries < 200 && !placed; ++tries) {
                int lane = pinned[static_cast<std::size_t>(i)];
                if (lane < 0) {
                    lane = static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(g_.lane_count)));
                    if (cfg_.cut_in.clear_probe_lane && cfg_.cut_in.count + cfg_.cut_in.decoys > 0 &&
                        lane == cfg_.cut_in.probe_lane) {
                        continue;
                    }
                }
                double v = rng_.uniform(cfg_.speed_min, cfg_.speed_max);
                double x = rng_.uniform(0.0, 0.9 * g_.track_length);
                if (!placement_clear(lane, x, v, cfg_.vehicle_length)) continue;
                vehicles_.push_back(make_vehicle(lane, x, v));
                placed = true;
            }
            if (!placed) throw AttemptFailed{};
            initial_index.push_back(vehicles_.size() - 1);
        }
        for (const auto& e : cfg_.lane_change_events) {
            auto& sv = vehicles_[initial_index[static_cast<std::size_t>(e.vehicle)]];
            sv.changes.push_back({to_frame(e.start_time, cfg_.dt), e.direction, e.duration, true, 0});
        }
        // Ids: initial vehicles first, then cut-in vehicles, then arrivals.
        for (std::size_t idx : initial_index) order_.push_back(idx);
        for (std::size_t i = 0; i < first_scripted; ++i) order_.push_back(i);
    }

    void schedule_random_changes() {
        if (cfg_.random_lane_changes <= 0 || cfg_.vehicle_count == 0) return;
        const double latest = cfg_.duration - cfg_.lane_change_duration - 1.0;
        if (latest <= 1.0) return;
        for (int k = 0; k < cfg_.random_lane_changes; ++k) {
            std::size_t pick = order_[rng_.uniform_int(static_cast<std::uint64_t>(cfg_.vehicle_count))];
            double t = rng_.uniform(1.0, latest);
            vehicles_[pick].changes.push_back(
                {to_frame(t, cfg_.dt), 0, cfg_.lane_change_duration, false, 20});
        }
        for (auto& sv : vehicles_) {
            std::stable_sort(sv.changes.begin(), sv.changes.end(),
                             [](const PendingChange& a, const PendingChange& b) { return a.frame < b.frame; });
        }
    }

    void schedule_arrivals() {
        if (cfg_.spawn_rate <= 0.0) return;
        double t = 0.0;
        while (true) {
            t += -std::log(1.0 - rng_.uniform()) / cfg_.spawn_rate;
            if (t >= cfg_.duration) break;
            int lane = static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(g_.lane_count)));
            double v = rng_.uniform(cfg_.speed_min, cfg_.speed_max);
            SimVehicle sv = make_vehicle(lane, 0.0, v);
            sv.active = false;
            sv.arrival_frame = std::max(1, to_frame(t, cfg_.dt));
            vehicles_.push_back(std::move(sv));
            order_.push_back(vehicles_.size() - 1);
        }
    }

    // Nearest vehicle ahead of `self` occupying `lane`; nullopt if none.
    std::optional<std::size_t> leader_in(std::size_t self, int lane) const {
        const auto& me = vehicles_[self];
        std::optional<std::size_t> best;
        double best_dx = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < vehicles_.size(); ++j) {
            if (j == self || !vehicles_[j].active) continue;
            const auto& o = vehicles_[j];
            double dx = o.x - me.x;
            if (dx < 0.0 || (dx == 0.0 && j < self)) continue;
            if (!occupies(o, lane)) continue;
            if (dx < best_dx) {
                best_dx = dx;
                best = j;
            }
        }
        return best;
    }

    std::optional<std::size_t> follower_in(double x, int lane, std::size_t self) const {
        std::optional<std::size_t> best;
        double best_dx = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < vehicles_.size(); ++j) {
            if (j == self || !vehicles_[j].active) continue;
            const auto& o = vehicles_[j];
            double dx = x - o.x;
            if (dx < 0.0 || !occupies(o, lane)) continue;
            if (dx < best_dx) {
                best_dx = dx;
                best = j;
            }
        }
        return best;
    }

    void activate_arrivals(int f) {
        for (std::size_t i = 0; i < vehicles_.size(); ++i) {
            auto& sv = vehicles_[i];
            if (sv.active || sv.finished || sv.arrival_frame == 0 || sv.arrival_frame > f) continue;
            // Enter only once the lane near the entry point is clear.
            bool clear = true;
            for (const auto& o : vehicles_) {
                if (!o.active || !occupies(o, sv.lane)) continue;
                double gap = o.x - sv.x - 0.5 * (o.length + sv.length);
                if (gap < cfg_.idm.s0 + 1.2 * sv.v) {
                    clear = false;
                    break;
                }
            }
            if (clear) sv.active = true;
        }
    }

    bool change_is_safe(std::size_t i, int target) const {
        const auto& sv = vehicles_[i];
        if (auto lead = leader_in(i, target)) {
            const auto& o = vehicles_[*lead];
            if (o.x - sv.x - 0.5 * (o.length + sv.length) < cfg_.idm.s0 + 1.0 * sv.v) return false;
        }
        if (auto back = follower_in(sv.x, target, i)) {
            const auto& o = vehicles_[*back];
            if (sv.x - o.x - 0.5 * (o.length + sv.length) < cfg_.idm.s0 + 1.5 * o.v) return false;
        }
        return true;
    }

    void start_changes(int f) {
        for (std::size_t i = 0; i < vehicles_.size(); ++i) {
            auto& sv = vehicles_[i];
            while (!sv.changes.empty() && sv.changes.front().frame <= f) {
                PendingChange pc = sv.changes.front();
                sv.changes.erase(sv.changes.begin());
                if (!sv.active || sv.changing) {
                    if (pc.strict) throw AttemptFailed{};
                    continue;
                }
                int dir = pc.direction;
                if (dir == 0) {
                    if (sv.lane == 0) dir = +1;
                    else if (sv.lane == g_.lane_count - 1) dir = -1;
                    else dir = rng_.bernoulli(0.5) ? +1 : -1;
                }
                int target = sv.lane + dir;
                if (!g_.valid_lane(target)) {
                    if (pc.strict) throw AttemptFailed{};
                    continue;
                }
                if (!pc.strict && !change_is_safe(i, target)) {
                    if (pc.postpones_left > 0) {
                        pc.frame = f + 5;
                        pc.direction = dir;
                        --pc.postpones_left;
                        sv.changes.insert(sv.changes.begin(), pc);
                    }
                    break;
                }
                sv.changing = true;
                sv.target_lane = target;
                sv.change_start = f;
                sv.change_duration = pc.duration;
            }
        }
    }

    void record(int f) {
        for (auto& sv : vehicles_) {
            if (!sv.active) continue;
            TrackPoint p;
            p.frame = f;
            p.x = sv.x;
            p.y = lateral(sv, f);
            p.vx = sv.v;
            p.vy = 0.0;
            if (sv.changing) {
                double end = sv.change_start + sv.change_duration / cfg_.dt;
                if (f < end - 1e-9) {
                    p.vy = (g_.center(sv.target_lane) - g_.center(sv.lane)) / sv.change_duration;
                }
            }
            p.lane_id = g_.nearest_lane(p.y);
            sv.points.push_back(p);
        }
    }

    void advance(int f) {
        std::vector<double> acc(vehicles_.size(), 0.0);
        idm::IdmParams p = cfg_.idm;
        for (std::size_t i = 0; i < vehicles_.size(); ++i) {
            auto& sv = vehicles_[i];
            if (!sv.active) continue;
            p.v_desired = sv.v_desired;
            double a = idm::free_road_acceleration(sv.v, p);
            for (int lane : {sv.lane, sv.changing ? sv.target_lane : sv.lane}) {
                if (auto lead = leader_in(i, lane)) {
                    const auto& o = vehicles_[*lead];
                    double gap = o.x - sv.x - 0.5 * (o.length + sv.length);
                    double al = gap > 0.0 ? idm::acceleration(sv.v, gap, o.v, p) : -p.b_max;
                    a = std::min(a, al);
                }
            }
            acc[i] = a;
        }
        for (std::size_t i = 0; i < vehicles_.size(); ++i) {
            auto& sv = vehicles_[i];
            if (!sv.active) continue;
            double v_next = std::max(0.0, sv.v + acc[i] * cfg_.dt);
            sv.x += 0.5 * (sv.v + v_next) * cfg_.dt;
            sv.v = v_next;
            if (sv.changing && (f + 1 - sv.change_start) * cfg_.dt >= sv.change_duration - 1e-9) {
                sv.lane = sv.target_lane;
                sv.changing = false;
            }
            if (sv.x > g_.track_length) {
                sv.active = false;
                sv.finished = true;
            }
        }
    }

    const SynthConfig& cfg_;
    Rng& rng_;
    const LaneGeometry& g_;
    std::vector<SimVehicle> vehicles_;
    std::vector<std::size_t> order_;  // vehicles_ index per output id (id = position + 1)
};

}  // namespace

SynthConfig SynthConfig::from_config(const Config& cfg) {
    SynthConfig s;
    s.geometry = LaneGeometry::standard(cfg.get_double("data.lane_width", 3.5),
                                        cfg.get_double("data.track_length", 420.0));
    s.dt = cfg.get_double("data.dt", s.dt);
    s.duration = cfg.get_double("data.duration", s.duration);
    s.vehicle_count = static_cast<int>(cfg.get_int("data.vehicle_count", s.vehicle_count));
    s.spawn_rate = cfg.get_double("data.spawn_rate", s.spawn_rate);
    s.speed_min = cfg.get_double("data.speed_min", s.speed_min);
    s.speed_max = cfg.get_double("data.speed_max", s.speed_max);
    s.vehicle_length = cfg.get_double("data.vehicle_length", s.vehicle_length);
    s.vehicle_width = cfg.get_double("data.vehicle_width", s.vehicle_width);
    s.lane_change_events = parse_lane_change_events(cfg.get_string("data.lane_change_events", ""));
    s.random_lane_changes = static_cast<int>(cfg.get_int("data.random_lane_changes", 0));
    s.lane_change_duration = cfg.get_double("data.lane_change_duration", s.lane_change_duration);
    s.max_attempts = static_cast<int>(cfg.get_int("data.max_attempts", s.max_attempts));

    auto& c = s.cut_in;
    c.count = static_cast<int>(cfg.get_int("data.cut_in.count", c.count));
    c.decoys = static_cast<int>(cfg.get_int("data.cut_in.decoys", c.decoys));
    c.probe_lane = static_cast<int>(cfg.get_int("data.cut_in.probe_lane", c.probe_lane));
    c.probe_x0 = cfg.get_double("data.cut_in.probe_x0", c.probe_x0);
    c.probe_speed = cfg.get_double("data.cut_in.probe_speed", c.probe_speed);
    c.time_min = cfg.get_double("data.cut_in.time_min", c.time_min);
    c.time_max = cfg.get_double("data.cut_in.time_max", c.time_max);
    c.offset_min = cfg.get_double("data.cut_in.offset_min", c.offset_min);
    c.offset_max = cfg.get_double("data.cut_in.offset_max", c.offset_max);
    c.speed_min = cfg.get_double("data.cut_in.speed_min", c.speed_min);
    c.speed_max = cfg.get_double("data.cut_in.speed_max", c.speed_max);
    c.duration = cfg.get_double("data.cut_in.duration", c.duration);
    c.clear_probe_lane = cfg.get_bool("data.cut_in.clear_probe_lane", c.clear_probe_lane);

    s.idm = idm::IdmParams::from_config(cfg);
    return s;
}

std::vector<LaneChangeEvent> parse_lane_change_events(const std::string& text) {
    std::vector<LaneChangeEvent> out;
    std::istringstream items(text);
    std::string item;
    while (std::getline(items, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream fields(item);
        std::string f;
        std::vector<std::string> parts;
        while (std::getline(fields, f, ':')) parts.push_back(f);
        if (parts.size() != 4 && parts.size() != 5) {
            throw ConfigError("lane change event '" + item + "' needs v:start:dir:dur[:from_lane]");
        }
        try {
            LaneChangeEvent e;
            e.vehicle = std::stoi(parts[0]);
            e.start_time = std::stod(parts[1]);
            e.direction = std::stoi(parts[2]);
            e.duration = std::stod(parts[3]);
            if (parts.size() == 5) e.from_lane = std::stoi(parts[4]);
            out.push_back(e);
        } catch (const std::exception&) {
            throw ConfigError("lane change event '" + item + "' has a non-numeric field");
        }
    }
    return out;
}

TrackSet generate_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
    cfg.geometry.check();
    cfg.idm.check();
    if (!(cfg.dt > 0) || !(cfg.duration > 0)) throw ConfigError("dt and duration must be positive");
    if (cfg.vehicle_count < 0 || cfg.spawn_rate < 0) throw ConfigError("negative vehicle count or spawn rate");
    if (!(cfg.speed_min > 0) || cfg.speed_max < cfg.speed_min) throw ConfigError("bad speed range");
    for (const auto& e : cfg.lane_change_events) {
        if (e.vehicle < 0 || e.vehicle >= cfg.vehicle_count) {
            throw ConfigError("lane change event refers to vehicle " + std::to_string(e.vehicle) +
                              " but only " + std::to_string(cfg.vehicle_count) + " are placed");
        }
        if ((e.direction != 1 && e.direction != -1) || !(e.duration > 0)) {
            throw ConfigError("lane change event needs direction +-1 and positive duration");
        }
    }

    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        Rng rng(derive_seed(seed, "synth-attempt", static_cast<std::uint64_t>(attempt)));
        try {
            Simulator sim(cfg, rng);
            TrackSet ts = sim.run("synthetic");
            if (validate(ts).empty()) return ts;
        } catch (const AttemptFailed&) {
        }
    }
    throw InfeasibleConfig("no collision-free traffic found within " + std::to_string(cfg.max_attempts) +
                           " attempts");
}

}  // namespace hwy::data
