#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hwy/nn/layer.hpp"

namespace hwy::nn {

enum class Activation : std::uint32_t { relu = 0, tanh = 1 };
enum class HeadKind : std::uint32_t { plain = 0, duelling = 1 };
enum class NoisyPlacement { none, final_two, all };

Activation parse_activation(const std::string& s);
std::string to_string(Activation a);
std::string to_string(HeadKind h);

struct NetworkSpec {
    int input_dim = 22;
    std::vector<int> hidden{128, 128};
    int output_dim = 3;
    HeadKind head = HeadKind::plain;
    Activation activation = Activation::relu;
    NoisyPlacement noisy = NoisyPlacement::none;
    double sigma0 = 0.5;
};

class NoNoisyLayers : public Error {
public:
    using Error::Error;
};

// Activations kept by forward_batch for the backward pass.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> inputs;  // input of every layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of every layer
};

/// Q_a = v + adv_a - mean(adv)
std::vector<double> duelling_aggregate(double value, std::span<const double> advantage);

// Fully connected Q-network: hidden layers with a nonlinearity, then either a
// linear output layer (plain head) or separate value and advantage layers
// combined by duelling_aggregate (duelling head). Layers are stored in order:
// hidden..., output (plain) or hidden..., value, advantage (duelling).
class Network {
public:
    Network() = default;
    Network(const NetworkSpec& spec, std::uint64_t init_seed);
    Network(HeadKind head, Activation activation, std::vector<Layer> layers);

    int input_dim() const { return layers_.front().in(); }
    int output_dim() const { return layers_.back().out(); }
    HeadKind head() const { return head_; }
    Activation activation() const { return activation_; }
    std::size_t hidden_count() const { return layers_.size() - head_layer_count(); }
    std::size_t head_layer_count() const { return head_ == HeadKind::plain ? 1 : 2; }
    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }

    Eigen::VectorXd forward(std::span<const double> x) const;
    /// Batch stored column-wise (input_dim x batch); returns output_dim x batch.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x, ForwardCache* cache = nullptr) const;

    /// Gradients of sum(grad_out .* Q) w.r.t. every parameter, using the
    /// activations of the forward pass recorded in `cache`. Noise is held fixed.
    Gradients backward(const ForwardCache& cache, const Eigen::MatrixXd& grad_out) const;
    /// Convenience: forward then backward for a single input.
    Gradients gradients(std::span<const double> x, std::span<const double> grad_out) const;

    std::vector<ParamView> parameters();
    Gradients zero_gradients() const;
    std::size_t parameter_count() const;

    bool has_noisy_layers() const;
    /// Resamples factorised noise in every noisy layer; throws NoNoisyLayers.
    void sample_noise(Rng& rng);
    /// Disabled noise means weights equal their learned means.
    void set_noise_enabled(bool enabled);

private:
    Eigen::MatrixXd activate(const Eigen::MatrixXd& z) const;
    Eigen::MatrixXd activation_grad(const Eigen::MatrixXd& z) const;
    void check_structure() const;

    HeadKind head_ = HeadKind::plain;
    Activation activation_ = Activation::relu;
    std::vector<Layer> layers_;
};

}  // namespace hwy::nn
