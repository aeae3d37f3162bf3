#include "hwy/idm/idm.hpp"

#include <algorithm>
#include <cmath>

namespace hwy::idm {

void IdmParams::check() const {
    if (!(s0 > 0 && v_desired > 0 && a_max > 0 && b_max > 0 && b_safe > 0 && rho > 0)) {
        throw ConfigError("IDM parameters must all be strictly positive");
    }
    if (b_safe > b_max) throw ConfigError("IDM b_safe must not exceed b_max");
}

IdmParams IdmParams::from_config(const Config& cfg) {
    IdmParams p;
    p.s0 = cfg.get_double("idm.s0", p.s0);
    p.v_desired = cfg.get_double("idm.v_desired_kmh", p.v_desired * 3.6) / 3.6;
    p.a_max = cfg.get_double("idm.a_max", p.a_max);
    p.b_max = cfg.get_double("idm.b_max", p.b_max);
    p.b_safe = cfg.get_double("idm.b_safe", p.b_safe);
    p.rho = cfg.get_double("idm.rho", p.rho);
    p.check();
    return p;
}

double desired_gap(double v, double v_lead, const IdmParams& p) {
    const double reaction = v + p.rho * p.a_max;
    const double dynamic = v * p.rho + 0.5 * p.a_max * p.rho * p.rho +
                           reaction * reaction / (2.0 * p.b_safe) -
                           v_lead * v_lead / (2.0 * p.b_max);
    return std::max(p.s0, dynamic);
}

double acceleration(double v, double gap, double v_lead, const IdmParams& p) {
    if (!(gap > 0.0)) throw DegenerateGap("IDM queried with non-positive gap");
    const double speed_ratio = v / p.v_desired;
    const double gap_ratio = desired_gap(v, v_lead, p) / gap;
    const double a = p.a_max * (1.0 - std::pow(speed_ratio, 4) - gap_ratio * gap_ratio);
    return std::clamp(a, -p.b_max, p.a_max);
}

double free_road_acceleration(double v, const IdmParams& p) {
    return acceleration(v, kFreeRoadGap, 0.0, p);
}

}  // namespace hwy::idm
