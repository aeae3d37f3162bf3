#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hwy/common/error.hpp"

namespace hwy::env {

// Index mapping is part of the observation/checkpoint contract.
enum class Action : int { left_change = 0, lane_keep = 1, right_change = 2 };

inline constexpr int kActionCount = 3;
inline constexpr std::array<Action, kActionCount> kAllActions{Action::left_change, Action::lane_keep,
                                                               Action::right_change};

inline int to_index(Action a) { return static_cast<int>(a); }
Action action_from_index(int i);
std::string to_string(Action a);

enum class Outcome { running, collision, end_of_track, truncated };

std::string to_string(Outcome o);

struct Observation {
    std::vector<double> features;
    int layout_version = 0;
};

struct StepEvents {
    bool reached_end = false;
    bool initiated_lane_change = false;
    bool collided = false;
    bool masked_action = false;  // a lane change was requested but could not start
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    Outcome outcome = Outcome::running;
    StepEvents events;
};

class EpisodeDone : public Error {
public:
    EpisodeDone() : Error("step() called on a finished episode") {}
};

// Episodic MDP interface consumed by the training loop.
class Environment {
public:
    virtual ~Environment() = default;
    virtual Observation reset(std::uint64_t seed) = 0;
    virtual StepResult step(Action a) = 0;
    virtual int observation_size() const = 0;
};

}  // namespace hwy::env
