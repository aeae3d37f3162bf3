#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>

#include "hwy/common/config.hpp"
#include "hwy/common/random.hpp"
#include "hwy/data/track.hpp"

namespace hwy::intent {

enum class Manoeuvre { lane_keep = 0, left_change = 1, right_change = 2 };

// Predicted manoeuvre of one vehicle: class probabilities plus the time
// until the lane change happens. `ttlc == horizon` means no change foreseen.
struct Intention {
    double p_lk = 1.0;
    double p_llc = 0.0;
    double p_rlc = 0.0;
    double ttlc = 5.0;
    double horizon = 5.0;

    static Intention lane_keep(double horizon = 5.0) { return {1.0, 0.0, 0.0, horizon, horizon}; }
    static Intention certain(Manoeuvre m, double ttlc, double horizon = 5.0);

    /// Most likely manoeuvre; ties resolve in the order LK, LLC, RLC.
    Manoeuvre argmax() const;
    bool valid() const;
};

struct NoiseConfig {
    double class_flip_rate = 0.0;
    double ttlc_sigma = 0.0;
    std::uint64_t seed = 0;
};

class UnknownVehicle : public Error {
public:
    using Error::Error;
};

class TimeOutOfRange : public Error {
public:
    using Error::Error;
};

/// Looks ahead in the replayed trajectory of `vehicle_id` from time `t` for
/// the first frame whose lane_id differs from the lane at `t`.
Intention ground_truth_ttlc(const data::TrackSet& ts, int vehicle_id, double t, double horizon = 5.0);

/// Frame-indexed form of ground_truth_ttlc.
Intention ground_truth_at_frame(const data::TrackSet& ts, const data::VehicleTrack& v, int frame,
                                double horizon);

/// Emulates an imperfect predictor: with probability class_flip_rate the most
/// likely class is replaced by one of the other two (soft label 0.8/0.1/0.1),
/// and ttlc gets zero-mean Gaussian noise clamped to [0, horizon].
Intention degrade(const Intention& intent, const NoiseConfig& cfg, Rng& rng);

enum class IntentionMode { none, ground_truth, degraded };

IntentionMode parse_intention_mode(const std::string& s);
std::string to_string(IntentionMode m);

// Source of per-neighbour intentions for the environment. A learned
// predictor can be plugged in here without touching the simulator.
class IntentionProvider {
public:
    virtual ~IntentionProvider() = default;
    /// Called at episode start; providers with randomness reseed here.
    virtual void reset(const data::TrackSet& ts, std::uint64_t episode_seed) = 0;
    virtual Intention intention(const data::TrackSet& ts, const data::VehicleTrack& v, int frame) = 0;
};

class NoIntentionProvider final : public IntentionProvider {
public:
    explicit NoIntentionProvider(double horizon = 5.0) : horizon_(horizon) {}
    void reset(const data::TrackSet&, std::uint64_t) override {}
    Intention intention(const data::TrackSet&, const data::VehicleTrack&, int) override {
        return Intention::lane_keep(horizon_);
    }

private:
    double horizon_;
};

// Oracle answers depend only on the replayed data, so they are cached per
// (vehicle, frame) for the current track.
class GroundTruthProvider : public IntentionProvider {
public:
    explicit GroundTruthProvider(double horizon = 5.0) : horizon_(horizon) {}
    void reset(const data::TrackSet& ts, std::uint64_t episode_seed) override;
    Intention intention(const data::TrackSet& ts, const data::VehicleTrack& v, int frame) override;

protected:
    double horizon_;

private:
    const data::TrackSet* cached_for_ = nullptr;
    std::unordered_map<std::uint64_t, Intention> cache_;
};

// Ground truth passed through degrade(). The generator for each query is
// derived from (episode seed, vehicle, frame), so answers do not depend on
// query order.
class DegradedProvider final : public GroundTruthProvider {
public:
    DegradedProvider(NoiseConfig noise, double horizon = 5.0);
    void reset(const data::TrackSet& ts, std::uint64_t episode_seed) override;
    Intention intention(const data::TrackSet& ts, const data::VehicleTrack& v, int frame) override;

private:
    NoiseConfig noise_;
    std::uint64_t episode_seed_ = 0;
};

std::unique_ptr<IntentionProvider> make_provider(IntentionMode mode, double horizon, const NoiseConfig& noise);

}  // namespace hwy::intent
