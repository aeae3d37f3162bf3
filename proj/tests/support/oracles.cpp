#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

namespace hwy::testing {

double relative_error(double analytic, double numeric, double floor) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

namespace {

double objective(const nn::Network& net, std::span<const double> x, std::span<const double> w) {
    const Eigen::VectorXd q = net.forward(x);
    double f = 0.0;
    for (Eigen::Index k = 0; k < q.size(); ++k) f += w[static_cast<std::size_t>(k)] * q(k);
    return f;
}

// Sign pattern of all hidden pre-activations, recomputed by hand.
std::vector<bool> activation_pattern(const nn::Network& net, std::span<const double> x) {
    std::vector<bool> pattern;
    Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < net.hidden_count(); ++i) {
        const auto& l = net.layers()[i];
        Eigen::VectorXd z = l.effective_weight() * h + l.effective_bias();
        for (Eigen::Index k = 0; k < z.size(); ++k) pattern.push_back(z(k) > 0.0);
        h = net.activation() == nn::Activation::relu ? Eigen::VectorXd(z.cwiseMax(0.0))
                                                     : Eigen::VectorXd(z.array().tanh());
    }
    return pattern;
}

}  // namespace

double min_abs_preactivation(const nn::Network& net, std::span<const double> x) {
    double m = std::numeric_limits<double>::infinity();
    Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < net.hidden_count(); ++i) {
        const auto& l = net.layers()[i];
        Eigen::VectorXd z = l.effective_weight() * h + l.effective_bias();
        m = std::min(m, z.cwiseAbs().minCoeff());
        h = net.activation() == nn::Activation::relu ? Eigen::VectorXd(z.cwiseMax(0.0))
                                                     : Eigen::VectorXd(z.array().tanh());
    }
    return m;
}

GradCheck finite_difference_check(nn::Network& net, std::span<const double> x, std::span<const double> grad_out,
                                  double step) {
    const nn::Gradients analytic = net.gradients(x, grad_out);
    const bool relu = net.activation() == nn::Activation::relu;
    const auto base_pattern = relu ? activation_pattern(net, x) : std::vector<bool>{};
    auto params = net.parameters();
    GradCheck out;
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (Eigen::Index k = 0; k < params[t].size(); ++k) {
            double& p = params[t].data[k];
            const double saved = p;
            p = saved + step;
            const double f_plus = objective(net, x, grad_out);
            const bool kink_plus = relu && activation_pattern(net, x) != base_pattern;
            p = saved - step;
            const double f_minus = objective(net, x, grad_out);
            const bool kink_minus = relu && activation_pattern(net, x) != base_pattern;
            p = saved;
            if (kink_plus || kink_minus) {
                ++out.skipped;
                continue;
            }
            const double numeric = (f_plus - f_minus) / (2.0 * step);
            out.max_rel_error = std::max(out.max_rel_error, relative_error(analytic.tensors[t].data()[k], numeric));
            ++out.checked;
        }
    }
    return out;
}

ScanResult brute_force_scan(const data::VehicleTrack& v, int frame, double horizon, double dt) {
    std::size_t start = 0;
    while (start < v.points.size() && v.points[start].frame != frame) ++start;
    const int reach = static_cast<int>(std::floor(horizon / dt + 1e-9));
    const int lane0 = v.points[start].lane_id;
    for (std::size_t j = start + 1; j < v.points.size(); ++j) {
        const int ahead = v.points[j].frame - frame;
        if (ahead > reach) break;
        const int lane = v.points[j].lane_id;
        if (lane != lane0) return {lane > lane0 ? 1 : 2, ahead * dt};
    }
    return {0, horizon};
}

TabularMdp reference_mdp() {
    TabularMdp m;
    // state 0: move on, stop with a small reward, or stay
    m.next[0] = {1, -1, 0};
    m.reward[0] = {0.0, 1.0, 0.0};
    // state 1: stop with the large reward, go back, or stop with a penalty
    m.next[1] = {-1, 0, -1};
    m.reward[1] = {2.0, 0.0, -1.0};
    return m;
}

std::array<std::array<double, 3>, 2> value_iteration(const TabularMdp& mdp, double gamma) {
    std::array<std::array<double, 3>, 2> q{};
    for (int it = 0; it < 100000; ++it) {
        auto next = q;
        double delta = 0.0;
        for (int s = 0; s < 2; ++s) {
            for (int a = 0; a < 3; ++a) {
                const int n = mdp.next[s][a];
                double v = mdp.reward[s][a];
                if (n >= 0) v += gamma * *std::max_element(q[n].begin(), q[n].end());
                delta = std::max(delta, std::abs(v - q[s][a]));
                next[s][a] = v;
            }
        }
        q = next;
        if (delta < 1e-14) break;
    }
    return q;
}

TabularEnv::TabularEnv(TabularMdp mdp, int max_steps) : mdp_(mdp), max_steps_(max_steps) {}

env::Observation TabularEnv::encode(int state) {
    env::Observation o;
    o.features = {state == 0 ? 1.0 : 0.0, state == 1 ? 1.0 : 0.0};
    o.layout_version = 100;
    return o;
}

env::Observation TabularEnv::reset(std::uint64_t seed) {
    Rng rng(seed);
    state_ = static_cast<int>(rng.uniform_int(2));
    steps_ = 0;
    done_ = false;
    return encode(state_);
}

env::StepResult TabularEnv::step(env::Action a) {
    if (done_) throw env::EpisodeDone();
    const int ai = env::to_index(a);
    env::StepResult r;
    r.reward = mdp_.reward[state_][ai];
    const int n = mdp_.next[state_][ai];
    ++steps_;
    if (n < 0) {
        r.done = true;
        r.outcome = env::Outcome::end_of_track;
        r.observation = encode(state_);
    } else {
        state_ = n;
        r.observation = encode(state_);
        if (steps_ >= max_steps_) {
            r.done = true;
            r.outcome = env::Outcome::truncated;
        }
    }
    done_ = r.done;
    return r;
}

double chi_square_p_value(std::span<const double> observed, std::span<const double> expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

data::VehicleTrack straight_vehicle(int id, int lane, double x0, double vx, int first_frame, int frames,
                                    const data::LaneGeometry& g, double dt) {
    data::VehicleTrack v;
    v.vehicle_id = id;
    for (int f = 0; f < frames; ++f) {
        data::TrackPoint p;
        p.frame = first_frame + f;
        p.x = x0 + vx * dt * f;
        p.y = g.center(lane);
        p.vx = vx;
        p.lane_id = lane;
        v.points.push_back(p);
    }
    return v;
}

data::VehicleTrack changing_vehicle(int id, int from_lane, int to_lane, double x0, double vx, int frames,
                                    int change_frame, int ramp_frames, const data::LaneGeometry& g, double dt) {
    data::VehicleTrack v = straight_vehicle(id, from_lane, x0, vx, 0, frames, g, dt);
    const double y0 = g.center(from_lane);
    const double y1 = g.center(to_lane);
    for (auto& p : v.points) {
        const double s = std::clamp(static_cast<double>(p.frame - change_frame) / ramp_frames, 0.0, 1.0);
        p.y = y0 + (y1 - y0) * s;
        p.lane_id = g.nearest_lane(p.y);
    }
    return v;
}

}  // namespace hwy::testing
