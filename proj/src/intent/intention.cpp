#include "hwy/intent/intention.hpp"

#include <algorithm>
#include <cmath>

#include "hwy/common/seed.hpp"

namespace hwy::intent {

Intention Intention::certain(Manoeuvre m, double ttlc, double horizon) {
    Intention i;
    i.horizon = horizon;
    i.p_lk = m == Manoeuvre::lane_keep ? 1.0 : 0.0;
    i.p_llc = m == Manoeuvre::left_change ? 1.0 : 0.0;
    i.p_rlc = m == Manoeuvre::right_change ? 1.0 : 0.0;
    i.ttlc = m == Manoeuvre::lane_keep ? horizon : std::clamp(ttlc, 0.0, horizon);
    return i;
}

Manoeuvre Intention::argmax() const {
    if (p_lk >= p_llc && p_lk >= p_rlc) return Manoeuvre::lane_keep;
    if (p_llc >= p_rlc) return Manoeuvre::left_change;
    return Manoeuvre::right_change;
}

bool Intention::valid() const {
    for (double p : {p_lk, p_llc, p_rlc}) {
        if (!(p >= 0.0 && p <= 1.0)) return false;
    }
    if (std::abs(p_lk + p_llc + p_rlc - 1.0) > 1e-9) return false;
    if (!(ttlc >= 0.0 && ttlc <= horizon)) return false;
    if (argmax() == Manoeuvre::lane_keep && ttlc != horizon) return false;
    return true;
}

Intention ground_truth_at_frame(const data::TrackSet& ts, const data::VehicleTrack& v, int frame,
                                double horizon) {
    const data::TrackPoint* now = v.at(frame);
    if (now == nullptr) {
        throw TimeOutOfRange("vehicle " + std::to_string(v.vehicle_id) + " has no data at frame " +
                             std::to_string(frame));
    }
    const int reach = static_cast<int>(std::floor(horizon / ts.dt + 1e-9));
    const int last = std::min(v.last_frame(), frame + reach);
    for (int f = frame + 1; f <= last; ++f) {
        int lane = v.at(f)->lane_id;
        if (lane != now->lane_id) {
            Manoeuvre m = lane > now->lane_id ? Manoeuvre::left_change : Manoeuvre::right_change;
            return Intention::certain(m, (f - frame) * ts.dt, horizon);
        }
    }
    return Intention::lane_keep(horizon);
}

Intention ground_truth_ttlc(const data::TrackSet& ts, int vehicle_id, double t, double horizon) {
    const data::VehicleTrack* v = ts.find(vehicle_id);
    if (v == nullptr) throw UnknownVehicle("unknown vehicle " + std::to_string(vehicle_id));
    const double f = t / ts.dt;
    const int frame = static_cast<int>(std::lround(f));
    if (std::abs(f - frame) > 1e-6 || !v->active_at(frame)) {
        throw TimeOutOfRange("vehicle " + std::to_string(vehicle_id) + " has no sample at t=" +
                             std::to_string(t));
    }
    return ground_truth_at_frame(ts, *v, frame, horizon);
}

Intention degrade(const Intention& intent, const NoiseConfig& cfg, Rng& rng) {
    Intention out = intent;
    if (cfg.class_flip_rate > 0.0 && rng.bernoulli(cfg.class_flip_rate)) {
        int current = static_cast<int>(intent.argmax());
        int other = static_cast<int>(rng.uniform_int(2));
        int next = other >= current ? other + 1 : other;
        double p[3] = {0.1, 0.1, 0.1};
        p[next] = 0.8;
        out.p_lk = p[0];
        out.p_llc = p[1];
        out.p_rlc = p[2];
    }
    if (cfg.ttlc_sigma > 0.0) out.ttlc = std::clamp(out.ttlc + rng.normal(0.0, cfg.ttlc_sigma), 0.0, out.horizon);
    if (out.argmax() == Manoeuvre::lane_keep) out.ttlc = out.horizon;
    return out;
}

IntentionMode parse_intention_mode(const std::string& s) {
    if (s == "none") return IntentionMode::none;
    if (s == "ground_truth") return IntentionMode::ground_truth;
    if (s == "degraded") return IntentionMode::degraded;
    throw ConfigError("unknown intention mode '" + s + "'");
}

std::string to_string(IntentionMode m) {
    switch (m) {
        case IntentionMode::none: return "none";
        case IntentionMode::ground_truth: return "ground_truth";
        case IntentionMode::degraded: return "degraded";
    }
    return "none";
}

void GroundTruthProvider::reset(const data::TrackSet& ts, std::uint64_t) {
    cache_.clear();
    cached_for_ = &ts;
}

Intention GroundTruthProvider::intention(const data::TrackSet& ts, const data::VehicleTrack& v, int frame) {
    if (cached_for_ != &ts) {
        cache_.clear();
        cached_for_ = &ts;
    }
    std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.vehicle_id)) << 32) |
                        static_cast<std::uint32_t>(frame);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Intention i = ground_truth_at_frame(ts, v, frame, horizon_);
    cache_.emplace(key, i);
    return i;
}

DegradedProvider::DegradedProvider(NoiseConfig noise, double horizon)
    : GroundTruthProvider(horizon), noise_(noise) {}

void DegradedProvider::reset(const data::TrackSet& ts, std::uint64_t episode_seed) {
    GroundTruthProvider::reset(ts, episode_seed);
    episode_seed_ = derive_seed(noise_.seed, "intention-noise", episode_seed);
}

Intention DegradedProvider::intention(const data::TrackSet& ts, const data::VehicleTrack& v, int frame) {
    Intention truth = GroundTruthProvider::intention(ts, v, frame);
    std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.vehicle_id)) << 32) |
                        static_cast<std::uint32_t>(frame);
    Rng rng(derive_seed(episode_seed_, "query", key));
    return degrade(truth, noise_, rng);
}

std::unique_ptr<IntentionProvider> make_provider(IntentionMode mode, double horizon, const NoiseConfig& noise) {
    switch (mode) {
        case IntentionMode::none: return std::make_unique<NoIntentionProvider>(horizon);
        case IntentionMode::ground_truth: return std::make_unique<GroundTruthProvider>(horizon);
        case IntentionMode::degraded: return std::make_unique<DegradedProvider>(noise, horizon);
    }
    return std::make_unique<NoIntentionProvider>(horizon);
}

}  // namespace hwy::intent
