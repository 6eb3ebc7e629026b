#pragma once

#include "sparseset/tensor.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace sparseset {

// Define-by-run reverse-mode tape over dense tensors. A graph is built per
// training step and discarded after backward().
class Graph {
public:
    using NodeId = std::int32_t;

    NodeId leaf(const Tensor& value, bool requires_grad = true);

    NodeId matmul(NodeId a, NodeId b);
    NodeId add_rowvec(NodeId a, NodeId row); // broadcast bias over rows
    NodeId add(NodeId a, NodeId b);
    NodeId relu(NodeId a);
    NodeId scale(NodeId a, double s);
    // Sums rows of a into n_groups output rows by group id; empty groups stay zero.
    NodeId segment_sum(NodeId a, std::vector<std::size_t> group, std::size_t n_groups);
    NodeId gather_rows(NodeId a, std::vector<std::size_t> rows);
    NodeId concat_cols(NodeId a, NodeId b);
    // Mean of (pred[k, col[k]] - target[k])^2 over k; scalar output.
    NodeId mse_selected(NodeId pred, std::vector<std::size_t> col, std::vector<double> target);
    NodeId sum(NodeId a); // scalar
    NodeId square(NodeId a);

    const Tensor& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const Tensor& grad(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].grad; }

    // Reverse pass from a scalar node; gradients accumulate into every
    // requires_grad leaf. Callable once per graph.
    void backward(NodeId loss);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Graph&, Node&)> backward_fn;
        std::vector<NodeId> parents;
        bool requires_grad = false;
    };

    Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
    NodeId push(Node n);

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

} // namespace sparseset
