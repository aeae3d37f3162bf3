#include "hwy/nn/layer.hpp"

#include <cmath>

namespace hwy::nn {

double noise_transform(double x) { return (x < 0.0 ? -1.0 : 1.0) * std::sqrt(std::abs(x)); }

Layer::Layer(LayerKind kind, int in, int out)
    : weight(Eigen::MatrixXd::Zero(out, in)),
      bias(Eigen::VectorXd::Zero(out)),
      kind_(kind) {
    if (in <= 0 || out <= 0) throw DimensionMismatch("layer dimensions must be positive");
    if (noisy()) {
        sigma_w = Eigen::MatrixXd::Zero(out, in);
        sigma_b = Eigen::VectorXd::Zero(out);
        eps_in = Eigen::VectorXd::Zero(in);
        eps_out = Eigen::VectorXd::Zero(out);
    }
}

void Layer::initialize(Rng& rng, double sigma0) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in()));
    for (Eigen::Index c = 0; c < weight.cols(); ++c) {
        for (Eigen::Index r = 0; r < weight.rows(); ++r) weight(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < bias.size(); ++r) bias(r) = rng.uniform(-bound, bound);
    if (noisy()) {
        sigma_w.setConstant(sigma0 * bound);
        sigma_b.setConstant(sigma0 * bound);
    }
}

void Layer::sample_noise(Rng& rng) {
    if (!noisy()) return;
    for (Eigen::Index i = 0; i < eps_in.size(); ++i) eps_in(i) = noise_transform(rng.normal());
    for (Eigen::Index i = 0; i < eps_out.size(); ++i) eps_out(i) = noise_transform(rng.normal());
}

Eigen::MatrixXd Layer::effective_weight() const {
    if (!noisy() || !noise_enabled) return weight;
    return weight + sigma_w.cwiseProduct(eps_out * eps_in.transpose());
}

Eigen::VectorXd Layer::effective_bias() const {
    if (!noisy() || !noise_enabled) return bias;
    return bias + sigma_b.cwiseProduct(eps_out);
}

Eigen::MatrixXd Layer::forward(const Eigen::MatrixXd& x) const {
    if (x.rows() != in()) throw DimensionMismatch("layer input has wrong size");
    Eigen::MatrixXd z;
    if (noisy() && noise_enabled) {
        z.noalias() = effective_weight() * x;
        z.colwise() += effective_bias();
    } else {
        z.noalias() = weight * x;
        z.colwise() += bias;
    }
    return z;
}

Eigen::MatrixXd Layer::backward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dz, Gradients& grads,
                                std::size_t offset) const {
    Eigen::MatrixXd dw = dz * x.transpose();
    Eigen::VectorXd db = dz.rowwise().sum();
    grads.tensors[offset] += dw;
    grads.tensors[offset + 1] += db;
    if (noisy()) {
        if (noise_enabled) {
            grads.tensors[offset + 2] += dw.cwiseProduct(eps_out * eps_in.transpose());
            grads.tensors[offset + 3] += db.cwiseProduct(eps_out);
        }
        return effective_weight().transpose() * dz;
    }
    return weight.transpose() * dz;
}

void Layer::append_parameters(std::vector<ParamView>& out) {
    out.push_back({weight.data(), weight.rows(), weight.cols()});
    out.push_back({bias.data(), bias.rows(), 1});
    if (noisy()) {
        out.push_back({sigma_w.data(), sigma_w.rows(), sigma_w.cols()});
        out.push_back({sigma_b.data(), sigma_b.rows(), 1});
    }
}

void Layer::append_gradient_shapes(Gradients& g) const {
    g.tensors.push_back(Eigen::MatrixXd::Zero(weight.rows(), weight.cols()));
    g.tensors.push_back(Eigen::MatrixXd::Zero(bias.rows(), 1));
    if (noisy()) {
        g.tensors.push_back(Eigen::MatrixXd::Zero(sigma_w.rows(), sigma_w.cols()));
        g.tensors.push_back(Eigen::MatrixXd::Zero(sigma_b.rows(), 1));
    }
}

}  // namespace hwy::nn
