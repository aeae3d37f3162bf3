#pragma once

#include "hwy/common/config.hpp"
#include "hwy/common/error.hpp"

namespace hwy::idm {

/// Gap used to query the free-road response (no leader within range).
inline constexpr double kFreeRoadGap = 1e9;

struct IdmParams {
    double s0 = 5.0;                  // minimum distance [m]
    double v_desired = 130.0 / 3.6;   // [m/s]
    double a_max = 3.0;               // [m/s^2]
    double b_max = 5.0;               // [m/s^2]
    double b_safe = 4.0;              // [m/s^2]
    double rho = 0.25;                // response time [s]

    /// Throws ConfigError unless every field is positive and b_safe <= b_max.
    void check() const;

    /// Reads idm.* keys; missing keys keep their defaults.
    static IdmParams from_config(const Config& cfg);
};

/// Raised for a non-positive bumper-to-bumper gap. The caller is in contact
/// with its leader and must treat that as a collision, not as an IDM query.
class DegenerateGap : public Error {
public:
    using Error::Error;
};

/// Desired dynamic gap s*(v, v_lead):
///   max(s0, v rho + a_max rho^2 / 2 + (v + rho a_max)^2 / (2 b_safe) - v_lead^2 / (2 b_max))
double desired_gap(double v, double v_lead, const IdmParams& p);

/// a_max [1 - (v / v_desired)^4 - (s*(v, v_lead) / gap)^2], clamped to
/// [-b_max, a_max]. Pass kFreeRoadGap when there is no leader.
double acceleration(double v, double gap, double v_lead, const IdmParams& p);

/// acceleration() with kFreeRoadGap.
double free_road_acceleration(double v, const IdmParams& p);

}  // namespace hwy::idm
