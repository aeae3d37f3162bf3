#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hwy/common/error.hpp"
#include "hwy/common/random.hpp"

namespace hwy::nn {

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Mutable view of one parameter tensor (column-major storage).
struct ParamView {
    double* data = nullptr;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Eigen::Index size() const { return rows * cols; }
};

// Gradient tensors, aligned one-to-one with Network::parameters().
struct Gradients {
    std::vector<Eigen::MatrixXd> tensors;
};

enum class LayerKind : std::uint32_t { dense = 0, noisy = 1 };

// Affine map z = W x + b. A noisy layer keeps learnable means (weight, bias)
// and noise scales (sigma_w, sigma_b) and uses factorised Gaussian noise:
//   W = weight + sigma_w .* (eps_out eps_in^T),  b = bias + sigma_b .* eps_out
// where eps_* already hold f(x) = sign(x) sqrt(|x|) of unit normal draws.
class Layer {
public:
    Layer(LayerKind kind, int in, int out);

    LayerKind kind() const { return kind_; }
    bool noisy() const { return kind_ == LayerKind::noisy; }
    int in() const { return static_cast<int>(weight.cols()); }
    int out() const { return static_cast<int>(weight.rows()); }

    /// Means uniform in +-1/sqrt(fan_in); noisy scales sigma0/sqrt(fan_in).
    void initialize(Rng& rng, double sigma0);
    void sample_noise(Rng& rng);

    Eigen::MatrixXd effective_weight() const;
    Eigen::VectorXd effective_bias() const;

    /// Z = W X + b for a batch stored column-wise.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

    /// Accumulates parameter gradients for upstream dZ into `grads` starting
    /// at `offset`; returns dL/dX.
    Eigen::MatrixXd backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dz, Gradients& grads,
                             std::size_t offset) const;

    /// Number of parameter tensors: 2 for dense, 4 for noisy.
    std::size_t tensor_count() const { return noisy() ? 4 : 2; }
    void append_parameters(std::vector<ParamView>& out);
    void append_gradient_shapes(Gradients& g) const;

    Eigen::MatrixXd weight;  // mean weight for noisy layers
    Eigen::VectorXd bias;
    Eigen::MatrixXd sigma_w;
    Eigen::VectorXd sigma_b;
    Eigen::VectorXd eps_in;
    Eigen::VectorXd eps_out;
    bool noise_enabled = true;

private:
    LayerKind kind_;
};

/// f(x) = sign(x) sqrt(|x|), the factorised-noise transform.
double noise_transform(double x);

}  // namespace hwy::nn
