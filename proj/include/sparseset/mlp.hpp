#pragma once

#include "sparseset/autodiff.hpp"
#include "sparseset/rng.hpp"
#include "sparseset/tensor.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sparseset {

struct MlpConfig {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_dims;
    std::size_t output_dim = 1;
    std::uint64_t init_seed = 0;
};

// Weights and biases per affine layer; last layer has no activation.
struct MlpParams {
    std::vector<Tensor> weights; // [in x out] each
    std::vector<Tensor> biases;  // [out] each

    std::vector<Tensor*> all() {
        std::vector<Tensor*> out;
        for (auto& w : weights) out.push_back(&w);
        for (auto& b : biases) out.push_back(&b);
        return out;
    }
    std::vector<const Tensor*> all() const {
        std::vector<const Tensor*> out;
        for (auto& w : weights) out.push_back(&w);
        for (auto& b : biases) out.push_back(&b);
        return out;
    }
};

// Glorot-uniform weights, zero biases, seeded.
MlpParams init_mlp(const MlpConfig& cfg);

// Graph-building forward pass; returns the output node.
Graph::NodeId mlp_forward(Graph& g, const std::vector<Graph::NodeId>& weight_nodes,
                          const std::vector<Graph::NodeId>& bias_nodes, Graph::NodeId input);

// Plain inference forward pass (no tape).
Tensor mlp_forward(const MlpParams& params, const Tensor& input);

struct AdamHyper {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::size_t step = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    AdamHyper hyper;

    static AdamState init(const std::vector<Tensor*>& params, AdamHyper hyper);
};

void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state);

// Central-difference gradient check of a scalar function of a flat parameter
// vector. Returns the max relative discrepancy, normalized by
// max(|analytic|, |numeric|, 1e-8).
double grad_check(const std::function<double(const std::vector<double>&)>& f,
                  const std::vector<double>& point, const std::vector<double>& analytic_grad,
                  double h = 1e-4);

} // namespace sparseset
