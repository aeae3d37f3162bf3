#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hwy/data/track.hpp"

namespace hwy::data {

inline constexpr std::string_view kTrackCsvHeader = "vehicle_id,frame,x,y,vx,vy,length,width";

class MalformedRow : public Error {
public:
    MalformedRow(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

class FrameGap : public Error {
public:
    FrameGap(int vehicle_id, int frame);
    int vehicle_id() const { return vehicle_id_; }
    int frame() const { return frame_; }

private:
    int vehicle_id_;
    int frame_;
};

class OutOfBounds : public Error {
public:
    OutOfBounds(int vehicle_id, int frame);
    int vehicle_id() const { return vehicle_id_; }
    int frame() const { return frame_; }

private:
    int vehicle_id_;
    int frame_;
};

/// Parses the trajectory CSV. Rows are grouped by vehicle_id and sorted by
/// frame; lane ids are derived from y.
TrackSet parse_tracks(std::string_view csv_text, const LaneGeometry& geometry, double dt,
                      std::string track_id = {});

/// Canonical CSV: header, rows ordered by (vehicle_id, frame), reals with
/// six decimals, LF line endings.
std::string serialize_tracks(const TrackSet& ts);

TrackSet load_tracks(const std::filesystem::path& path, const LaneGeometry& geometry, double dt);
void save_tracks(const TrackSet& ts, const std::filesystem::path& path);

}  // namespace hwy::data
