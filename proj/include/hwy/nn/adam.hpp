#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hwy/nn/layer.hpp"

namespace hwy::nn {

struct AdamState {
    std::vector<Eigen::MatrixXd> m;
    std::vector<Eigen::MatrixXd> v;
    std::uint64_t step = 0;
    double alpha = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected Adam update. Moment buffers are allocated on first use.
void adam_step(std::span<const ParamView> params, const Gradients& grads, AdamState& st);

}  // namespace hwy::nn
