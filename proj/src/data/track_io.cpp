#include "hwy/data/track_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace hwy::data {
namespace {

struct Row {
    int line;
    int frame;
    double x, y, vx, vy, length, width;
};

template <typename T>
bool parse_field(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) return false;
    if constexpr (std::is_floating_point_v<T>) return std::isfinite(out);
    return true;
}

void append_real(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string_view s(buf);
    if (s == "-0.000000") s = "0.000000";
    out += s;
}

}  // namespace

MalformedRow::MalformedRow(int line, const std::string& what)
    : Error("malformed row at line " + std::to_string(line) + ": " + what), line_(line) {}

FrameGap::FrameGap(int vehicle_id, int frame)
    : Error("frame gap for vehicle " + std::to_string(vehicle_id) + " at frame " +
            std::to_string(frame)),
      vehicle_id_(vehicle_id),
      frame_(frame) {}

OutOfBounds::OutOfBounds(int vehicle_id, int frame)
    : Error("vehicle " + std::to_string(vehicle_id) + " outside the track at frame " +
            std::to_string(frame)),
      vehicle_id_(vehicle_id),
      frame_(frame) {}

TrackSet parse_tracks(std::string_view csv_text, const LaneGeometry& geometry, double dt,
                      std::string track_id) {
    geometry.check();
    if (!(dt > 0)) throw ConfigError("dt must be positive");

    TrackSet ts;
    ts.geometry = geometry;
    ts.dt = dt;
    ts.track_id = std::move(track_id);

    std::map<int, std::vector<Row>> rows;
    std::size_t pos = 0;
    int line_no = 0;
    bool header_seen = false;
    while (pos < csv_text.size()) {
        auto eol = csv_text.find('\n', pos);
        if (eol == std::string_view::npos) eol = csv_text.size();
        std::string_view line = csv_text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!header_seen) {
            if (line != kTrackCsvHeader) throw MalformedRow(line_no, "unexpected header");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;

        std::string_view fields[8];
        std::size_t n = 0;
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            if (n == 8) throw MalformedRow(line_no, "expected 8 fields");
            fields[n++] = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (n != 8) throw MalformedRow(line_no, "expected 8 fields");

        int vehicle_id = 0;
        Row r{};
        r.line = line_no;
        if (!parse_field(fields[0], vehicle_id) || !parse_field(fields[1], r.frame) ||
            !parse_field(fields[2], r.x) || !parse_field(fields[3], r.y) ||
            !parse_field(fields[4], r.vx) || !parse_field(fields[5], r.vy) ||
            !parse_field(fields[6], r.length) || !parse_field(fields[7], r.width)) {
            throw MalformedRow(line_no, "non-numeric field");
        }
        rows[vehicle_id].push_back(r);
    }
    if (!header_seen) throw MalformedRow(1, "missing header");

    for (auto& [id, vrows] : rows) {
        std::stable_sort(vrows.begin(), vrows.end(),
                         [](const Row& a, const Row& b) { return a.frame < b.frame; });
        VehicleTrack vt;
        vt.vehicle_id = id;
        vt.length = vrows.front().length;
        vt.width = vrows.front().width;
        for (std::size_t i = 0; i < vrows.size(); ++i) {
            const Row& r = vrows[i];
            if (i > 0 && r.frame != vrows[i - 1].frame + 1) throw FrameGap(id, r.frame);
            if (r.length != vt.length || r.width != vt.width) {
                throw MalformedRow(r.line, "vehicle dimensions change between rows");
            }
            if (r.x < 0.0 || r.x > geometry.track_length) throw OutOfBounds(id, r.frame);
            vt.points.push_back({r.frame, r.x, r.y, r.vx, r.vy, geometry.nearest_lane(r.y)});
        }
        ts.vehicles.push_back(std::move(vt));
    }
    return ts;
}

std::string serialize_tracks(const TrackSet& ts) {
    std::string out(kTrackCsvHeader);
    out += '\n';
    std::vector<const VehicleTrack*> order;
    for (const auto& v : ts.vehicles) order.push_back(&v);
    std::stable_sort(order.begin(), order.end(),
                     [](const VehicleTrack* a, const VehicleTrack* b) { return a->vehicle_id < b->vehicle_id; });
    for (const VehicleTrack* v : order) {
        for (const TrackPoint& p : v->points) {
            out += std::to_string(v->vehicle_id);
            out += ',';
            out += std::to_string(p.frame);
            for (double f : {p.x, p.y, p.vx, p.vy, v->length, v->width}) {
                out += ',';
                append_real(out, f);
            }
            out += '\n';
        }
    }
    return out;
}

TrackSet load_tracks(const std::filesystem::path& path, const LaneGeometry& geometry, double dt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_tracks(buf.str(), geometry, dt, path.stem().string());
}

void save_tracks(const TrackSet& ts, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << serialize_tracks(ts);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace hwy::data
