#include "sparseset/mlp.hpp"

#include <cmath>

namespace sparseset {

MlpParams init_mlp(const MlpConfig& cfg) {
    std::vector<std::size_t> dims;
    dims.push_back(cfg.input_dim);
    for (auto h : cfg.hidden_dims) dims.push_back(h);
    dims.push_back(cfg.output_dim);
    Rng rng(cfg.init_seed);
    MlpParams p;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l], fan_out = dims[l + 1];
        Tensor w(fan_in, fan_out);
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (auto& v : w.data) v = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(std::vector<std::size_t>{fan_out}, 0.0);
    }
    return p;
}

Graph::NodeId mlp_forward(Graph& g, const std::vector<Graph::NodeId>& weight_nodes,
                          const std::vector<Graph::NodeId>& bias_nodes, Graph::NodeId input) {
    Graph::NodeId x = input;
    for (std::size_t l = 0; l < weight_nodes.size(); ++l) {
        x = g.add_rowvec(g.matmul(x, weight_nodes[l]), bias_nodes[l]);
        if (l + 1 < weight_nodes.size()) x = g.relu(x);
    }
    return x;
}

Tensor mlp_forward(const MlpParams& params, const Tensor& input) {
    Tensor x = input;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        if (x.cols() != params.weights[l].rows())
            throw std::invalid_argument("mlp_forward: input " + Tensor::shape_str(x) +
                                        " does not match weight " +
                                        Tensor::shape_str(params.weights[l]));
        Tensor y(x.rows(), params.weights[l].cols());
        matmul_acc(x, params.weights[l], y);
        for (std::size_t i = 0; i < y.rows(); ++i)
            for (std::size_t j = 0; j < y.cols(); ++j)
                y.data[i * y.cols() + j] += params.biases[l].data[j];
        if (l + 1 < params.weights.size())
            for (auto& v : y.data) v = v > 0.0 ? v : 0.0;
        x = std::move(y);
    }
    return x;
}

AdamState AdamState::init(const std::vector<Tensor*>& params, AdamHyper hyper) {
    AdamState s;
    s.hyper = hyper;
    for (auto* p : params) {
        s.m.emplace_back(p->shape, 0.0);
        s.v.emplace_back(p->shape, 0.0);
    }
    return s;
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
    state.step += 1;
    const auto& h = state.hyper;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(h.beta1, t);
    const double bc2 = 1.0 - std::pow(h.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        check_same_shape(*params[k], *grads[k], "adam_step");
        auto& p = params[k]->data;
        const auto& g = grads[k]->data;
        auto& m = state.m[k].data;
        auto& v = state.v[k].data;
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
            v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= h.lr * mhat / (std::sqrt(vhat) + h.eps);
        }
    }
}

double grad_check(const std::function<double(const std::vector<double>&)>& f,
                  const std::vector<double>& point, const std::vector<double>& analytic_grad,
                  double h) {
    if (point.size() != analytic_grad.size())
        throw std::invalid_argument("grad_check: gradient size mismatch");
    double worst = 0.0;
    std::vector<double> x = point;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        auto central = [&](double step) {
            x[i] = xi + step;
            const double fp = f(x);
            x[i] = xi - step;
            const double fm = f(x);
            x[i] = xi;
            return (fp - fm) / (2.0 * step);
        };
        const double numeric = central(h);
        const double numeric_half = central(h / 2.0);
        const double numeric_small = central(h / 50.0);
        const double scale =
            std::max({std::abs(numeric), std::abs(numeric_half), std::abs(numeric_small), 1e-8});
        // at a ReLU kink the central difference does not converge as h shrinks;
        // such coordinates carry no information about the analytic gradient.
        // comparing three step sizes catches kinks anywhere down to ~h/50.
        if (std::abs(numeric - numeric_half) / scale > 3e-5 ||
            std::abs(numeric - numeric_small) / scale > 3e-5)
            continue;
        const double denom =
            std::max({std::abs(analytic_grad[i]), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic_grad[i] - numeric) / denom);
    }
    return worst;
}

} // namespace sparseset
