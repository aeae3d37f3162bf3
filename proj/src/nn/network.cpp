#include "hwy/nn/network.hpp"

#include <cmath>

namespace hwy::nn {

Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    throw ConfigError("unknown activation '" + s + "'");
}

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }
std::string to_string(HeadKind h) { return h == HeadKind::plain ? "plain" : "duelling"; }

std::vector<double> duelling_aggregate(double value, std::span<const double> advantage) {
    double mean = 0.0;
    for (double a : advantage) mean += a;
    mean /= static_cast<double>(advantage.size());
    std::vector<double> q;
    q.reserve(advantage.size());
    for (double a : advantage) q.push_back(value + a - mean);
    return q;
}

Network::Network(const NetworkSpec& spec, std::uint64_t init_seed)
    : head_(spec.head), activation_(spec.activation) {
    if (spec.input_dim <= 0 || spec.output_dim <= 0 || spec.hidden.empty()) {
        throw DimensionMismatch("network needs positive dimensions and at least one hidden layer");
    }
    const std::size_t n_hidden = spec.hidden.size();
    auto kind_for = [&](std::size_t layer_index, bool is_head) {
        switch (spec.noisy) {
            case NoisyPlacement::none: return LayerKind::dense;
            case NoisyPlacement::all: return LayerKind::noisy;
            case NoisyPlacement::final_two: return (is_head || layer_index + 1 == n_hidden) ? LayerKind::noisy
                                                                                             : LayerKind::dense;
        }
        return LayerKind::dense;
    };
    int in = spec.input_dim;
    for (std::size_t i = 0; i < n_hidden; ++i) {
        layers_.emplace_back(kind_for(i, false), in, spec.hidden[i]);
        in = spec.hidden[i];
    }
    if (head_ == HeadKind::plain) {
        layers_.emplace_back(kind_for(n_hidden, true), in, spec.output_dim);
    } else {
        layers_.emplace_back(kind_for(n_hidden, true), in, 1);
        layers_.emplace_back(kind_for(n_hidden, true), in, spec.output_dim);
    }
    Rng rng(init_seed);
    for (auto& l : layers_) l.initialize(rng, spec.sigma0);
}

Network::Network(HeadKind head, Activation activation, std::vector<Layer> layers)
    : head_(head), activation_(activation), layers_(std::move(layers)) {
    check_structure();
}

void Network::check_structure() const {
    if (layers_.size() < head_layer_count()) throw DimensionMismatch("network has too few layers");
    for (std::size_t i = 1; i < hidden_count(); ++i) {
        if (layers_[i].in() != layers_[i - 1].out()) throw DimensionMismatch("hidden layer sizes do not chain");
    }
    const int trunk_out = hidden_count() > 0 ? layers_[hidden_count() - 1].out() : layers_.front().in();
    for (std::size_t i = hidden_count(); i < layers_.size(); ++i) {
        if (layers_[i].in() != trunk_out) throw DimensionMismatch("head input does not match trunk output");
    }
    if (head_ == HeadKind::duelling && layers_[layers_.size() - 2].out() != 1) {
        throw DimensionMismatch("duelling value stream must have one output");
    }
}

Eigen::MatrixXd Network::activate(const Eigen::MatrixXd& z) const {
    if (activation_ == Activation::relu) return z.cwiseMax(0.0);
    return z.array().tanh().matrix();
}

Eigen::MatrixXd Network::activation_grad(const Eigen::MatrixXd& z) const {
    if (activation_ == Activation::relu) return (z.array() > 0.0).cast<double>().matrix();
    return (1.0 - z.array().tanh().square()).matrix();
}

Eigen::VectorXd Network::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim()) {
        throw DimensionMismatch("expected input of size " + std::to_string(input_dim()) + ", got " +
                                std::to_string(x.size()));
    }
    Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return forward_batch(in).col(0);
}

Eigen::MatrixXd Network::forward_batch(const Eigen::MatrixXd& x, ForwardCache* cache) const {
    if (x.rows() != input_dim()) throw DimensionMismatch("batch has wrong input dimension");
    if (cache) {
        cache->inputs.clear();
        cache->pre.clear();
    }
    Eigen::MatrixXd h = x;
    for (std::size_t i = 0; i < hidden_count(); ++i) {
        Eigen::MatrixXd z = layers_[i].forward(h);
        if (cache) {
            cache->inputs.push_back(h);
            cache->pre.push_back(z);
        }
        h = activate(z);
    }
    if (head_ == HeadKind::plain) {
        Eigen::MatrixXd q = layers_.back().forward(h);
        if (cache) {
            cache->inputs.push_back(h);
            cache->pre.push_back(q);
        }
        return q;
    }
    const Layer& value_layer = layers_[layers_.size() - 2];
    const Layer& adv_layer = layers_.back();
    Eigen::MatrixXd v = value_layer.forward(h);
    Eigen::MatrixXd adv = adv_layer.forward(h);
    if (cache) {
        cache->inputs.push_back(h);
        cache->pre.push_back(v);
        cache->inputs.push_back(h);
        cache->pre.push_back(adv);
    }
    Eigen::MatrixXd q(adv.rows(), adv.cols());
    for (Eigen::Index c = 0; c < adv.cols(); ++c) {
        auto col = duelling_aggregate(v(0, c), std::span<const double>(adv.col(c).data(),
                                                                      static_cast<std::size_t>(adv.rows())));
        for (Eigen::Index r = 0; r < adv.rows(); ++r) q(r, c) = col[static_cast<std::size_t>(r)];
    }
    return q;
}

Gradients Network::backward(const ForwardCache& cache, const Eigen::MatrixXd& grad_out) const {
    if (cache.inputs.size() != layers_.size()) throw DimensionMismatch("forward cache does not match network");
    if (grad_out.rows() != output_dim() || grad_out.cols() != cache.inputs.front().cols()) {
        throw DimensionMismatch("grad_out has wrong shape");
    }
    Gradients g = zero_gradients();
    std::vector<std::size_t> offsets;
    std::size_t off = 0;
    for (const auto& l : layers_) {
        offsets.push_back(off);
        off += l.tensor_count();
    }

    Eigen::MatrixXd dh;
    const std::size_t n = layers_.size();
    if (head_ == HeadKind::plain) {
        dh = layers_[n - 1].backward(cache.inputs[n - 1], grad_out, g, offsets[n - 1]);
    } else {
        // dQ_a/dv = 1, dQ_a/dadv_b = [a == b] - 1/n
        Eigen::MatrixXd dv = grad_out.colwise().sum();
        Eigen::MatrixXd dadv = grad_out.rowwise() - grad_out.colwise().mean();
        dh = layers_[n - 2].backward(cache.inputs[n - 2], dv, g, offsets[n - 2]);
        dh += layers_[n - 1].backward(cache.inputs[n - 1], dadv, g, offsets[n - 1]);
    }
    for (std::size_t k = hidden_count(); k-- > 0;) {
        Eigen::MatrixXd dz = dh.cwiseProduct(activation_grad(cache.pre[k]));
        dh = layers_[k].backward(cache.inputs[k], dz, g, offsets[k]);
    }
    return g;
}

Gradients Network::gradients(std::span<const double> x, std::span<const double> grad_out) const {
    if (static_cast<int>(x.size()) != input_dim() || static_cast<int>(grad_out.size()) != output_dim()) {
        throw DimensionMismatch("gradients(): input or grad_out has wrong size");
    }
    ForwardCache cache;
    Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    forward_batch(in, &cache);
    Eigen::MatrixXd g = Eigen::Map<const Eigen::VectorXd>(grad_out.data(), static_cast<Eigen::Index>(grad_out.size()));
    return backward(cache, g);
}

std::vector<ParamView> Network::parameters() {
    std::vector<ParamView> out;
    for (auto& l : layers_) l.append_parameters(out);
    return out;
}

Gradients Network::zero_gradients() const {
    Gradients g;
    for (const auto& l : layers_) l.append_gradient_shapes(g);
    return g;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : zero_gradients().tensors) n += static_cast<std::size_t>(t.size());
    return n;
}

bool Network::has_noisy_layers() const {
    for (const auto& l : layers_) {
        if (l.noisy()) return true;
    }
    return false;
}

void Network::sample_noise(Rng& rng) {
    if (!has_noisy_layers()) throw NoNoisyLayers("network has no noisy layers");
    for (auto& l : layers_) l.sample_noise(rng);
}

void Network::set_noise_enabled(bool enabled) {
    for (auto& l : layers_) l.noise_enabled = enabled;
}

}  // namespace hwy::nn
