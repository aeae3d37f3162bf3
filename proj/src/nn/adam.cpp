#include "hwy/nn/adam.hpp"

#include <cmath>

namespace hwy::nn {

void adam_step(std::span<const ParamView> params, const Gradients& grads, AdamState& st) {
    if (params.size() != grads.tensors.size()) throw DimensionMismatch("adam: parameter/gradient count differs");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].rows != grads.tensors[i].rows() || params[i].cols != grads.tensors[i].cols()) {
            throw DimensionMismatch("adam: gradient shape differs from parameter " + std::to_string(i));
        }
    }
    if (st.m.empty()) {
        for (const auto& g : grads.tensors) {
            st.m.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
            st.v.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
        }
    } else if (st.m.size() != params.size()) {
        throw DimensionMismatch("adam: state does not match parameters");
    }

    ++st.step;
    const double t = static_cast<double>(st.step);
    const double c1 = 1.0 - std::pow(st.beta1, t);
    const double c2 = 1.0 - std::pow(st.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& g = grads.tensors[i];
        auto& m = st.m[i];
        auto& v = st.v[i];
        double* p = params[i].data;
        for (Eigen::Index k = 0; k < g.size(); ++k) {
            const double gk = g.data()[k];
            double& mk = m.data()[k];
            double& vk = v.data()[k];
            mk = st.beta1 * mk + (1.0 - st.beta1) * gk;
            vk = st.beta2 * vk + (1.0 - st.beta2) * gk * gk;
            const double m_hat = mk / c1;
            const double v_hat = vk / c2;
            p[k] -= st.alpha * m_hat / (std::sqrt(v_hat) + st.eps);
        }
    }
}

}  // namespace hwy::nn
