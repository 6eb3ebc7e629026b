#include "sparseset/autodiff.hpp"

#include <cmath>
#include <utility>

namespace sparseset {

Graph::NodeId Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

Graph::NodeId Graph::leaf(const Tensor& value, bool requires_grad) {
    Node n;
    n.value = value;
    n.requires_grad = requires_grad;
    if (requires_grad) n.grad = Tensor(value.shape, 0.0);
    return push(std::move(n));
}

Graph::NodeId Graph::matmul(NodeId a, NodeId b) {
    Node n;
    n.parents = {a, b};
    n.requires_grad = node(a).requires_grad || node(b).requires_grad;
    n.value = Tensor(node(a).value.rows(), node(b).value.cols());
    matmul_acc(node(a).value, node(b).value, n.value);
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a, b](Graph& g, Node& self) {
            if (g.node(a).requires_grad) matmul_bt_acc(self.grad, g.node(b).value, g.node(a).grad);
            if (g.node(b).requires_grad) matmul_at_acc(g.node(a).value, self.grad, g.node(b).grad);
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::add_rowvec(NodeId a, NodeId row) {
    const Tensor& A = node(a).value;
    const Tensor& r = node(row).value;
    if (r.size() != A.cols())
        throw std::invalid_argument("add_rowvec: bias size " + Tensor::shape_str(r) +
                                    " does not match " + Tensor::shape_str(A));
    Node n;
    n.parents = {a, row};
    n.requires_grad = node(a).requires_grad || node(row).requires_grad;
    n.value = A;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) n.value.data[i * A.cols() + j] += r.data[j];
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a, row](Graph& g, Node& self) {
            if (g.node(a).requires_grad)
                for (std::size_t i = 0; i < self.grad.size(); ++i)
                    g.node(a).grad.data[i] += self.grad.data[i];
            if (g.node(row).requires_grad) {
                std::size_t m = self.grad.cols();
                for (std::size_t i = 0; i < self.grad.rows(); ++i)
                    for (std::size_t j = 0; j < m; ++j)
                        g.node(row).grad.data[j] += self.grad.data[i * m + j];
            }
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
    check_same_shape(node(a).value, node(b).value, "add");
    Node n;
    n.parents = {a, b};
    n.requires_grad = node(a).requires_grad || node(b).requires_grad;
    n.value = node(a).value;
    for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data[i] += node(b).value.data[i];
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a, b](Graph& g, Node& self) {
            for (NodeId p : {a, b})
                if (g.node(p).requires_grad)
                    for (std::size_t i = 0; i < self.grad.size(); ++i)
                        g.node(p).grad.data[i] += self.grad.data[i];
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::relu(NodeId a) {
    Node n;
    n.parents = {a};
    n.requires_grad = node(a).requires_grad;
    n.value = node(a).value;
    for (auto& v : n.value.data) v = v > 0.0 ? v : 0.0;
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a](Graph& g, Node& self) {
            const Tensor& x = g.node(a).value;
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                if (x.data[i] > 0.0) g.node(a).grad.data[i] += self.grad.data[i];
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::scale(NodeId a, double s) {
    Node n;
    n.parents = {a};
    n.requires_grad = node(a).requires_grad;
    n.value = node(a).value;
    for (auto& v : n.value.data) v *= s;
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a, s](Graph& g, Node& self) {
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                g.node(a).grad.data[i] += s * self.grad.data[i];
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::segment_sum(NodeId a, std::vector<std::size_t> group, std::size_t n_groups) {
    const Tensor& A = node(a).value;
    if (group.size() != A.rows())
        throw std::invalid_argument("segment_sum: group size does not match row count");
    Node n;
    n.parents = {a};
    n.requires_grad = node(a).requires_grad;
    n.value = Tensor(n_groups, A.cols());
    const std::size_t m = A.cols();
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < m; ++j)
            n.value.data[group[i] * m + j] += A.data[i * m + j];
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a, group = std::move(group), m](Graph& g, Node& self) {
            for (std::size_t i = 0; i < group.size(); ++i)
                for (std::size_t j = 0; j < m; ++j)
                    g.node(a).grad.data[i * m + j] += self.grad.data[group[i] * m + j];
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::gather_rows(NodeId a, std::vector<std::size_t> rows) {
    const Tensor& A = node(a).value;
    Node n;
    n.parents = {a};
    n.requires_grad = node(a).requires_grad;
    n.value = Tensor(rows.size(), A.cols());
    const std::size_t m = A.cols();
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) n.value.data[i * m + j] = A.data[rows[i] * m + j];
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a, rows = std::move(rows), m](Graph& g, Node& self) {
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < m; ++j)
                    g.node(a).grad.data[rows[i] * m + j] += self.grad.data[i * m + j];
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::concat_cols(NodeId a, NodeId b) {
    const Tensor& A = node(a).value;
    const Tensor& B = node(b).value;
    if (A.rows() != B.rows())
        throw std::invalid_argument("concat_cols: row mismatch " + Tensor::shape_str(A) + " vs " +
                                    Tensor::shape_str(B));
    Node n;
    n.parents = {a, b};
    n.requires_grad = node(a).requires_grad || node(b).requires_grad;
    const std::size_t ma = A.cols(), mb = B.cols();
    n.value = Tensor(A.rows(), ma + mb);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < ma; ++j) n.value.data[i * (ma + mb) + j] = A.data[i * ma + j];
        for (std::size_t j = 0; j < mb; ++j)
            n.value.data[i * (ma + mb) + ma + j] = B.data[i * mb + j];
    }
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a, b, ma, mb](Graph& g, Node& self) {
            const std::size_t rows = self.grad.rows();
            for (std::size_t i = 0; i < rows; ++i) {
                if (g.node(a).requires_grad)
                    for (std::size_t j = 0; j < ma; ++j)
                        g.node(a).grad.data[i * ma + j] += self.grad.data[i * (ma + mb) + j];
                if (g.node(b).requires_grad)
                    for (std::size_t j = 0; j < mb; ++j)
                        g.node(b).grad.data[i * mb + j] += self.grad.data[i * (ma + mb) + ma + j];
            }
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::mse_selected(NodeId pred, std::vector<std::size_t> col,
                                  std::vector<double> target) {
    const Tensor& P = node(pred).value;
    if (col.size() != P.rows() || target.size() != P.rows())
        throw std::invalid_argument("mse_selected: selection size does not match prediction rows");
    Node n;
    n.parents = {pred};
    n.requires_grad = node(pred).requires_grad;
    n.value = Tensor(std::vector<std::size_t>{1}, 0.0);
    const std::size_t m = P.cols(), k = P.rows();
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double d = P.data[i * m + col[i]] - target[i];
        acc += d * d;
    }
    n.value.data[0] = acc / static_cast<double>(k);
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [pred, col = std::move(col), target = std::move(target), m,
                         k](Graph& g, Node& self) {
            const Tensor& P2 = g.node(pred).value;
            const double go = self.grad.data[0] * 2.0 / static_cast<double>(k);
            for (std::size_t i = 0; i < k; ++i)
                g.node(pred).grad.data[i * m + col[i]] +=
                    go * (P2.data[i * m + col[i]] - target[i]);
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::sum(NodeId a) {
    Node n;
    n.parents = {a};
    n.requires_grad = node(a).requires_grad;
    n.value = Tensor(std::vector<std::size_t>{1}, 0.0);
    double acc = 0.0;
    for (double v : node(a).value.data) acc += v;
    n.value.data[0] = acc;
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a](Graph& g, Node& self) {
            for (auto& v : g.node(a).grad.data) v += self.grad.data[0];
        };
    }
    return push(std::move(n));
}

Graph::NodeId Graph::square(NodeId a) {
    Node n;
    n.parents = {a};
    n.requires_grad = node(a).requires_grad;
    n.value = node(a).value;
    for (auto& v : n.value.data) v *= v;
    if (n.requires_grad) {
        n.grad = Tensor(n.value.shape, 0.0);
        n.backward_fn = [a](Graph& g, Node& self) {
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                g.node(a).grad.data[i] += 2.0 * g.node(a).value.data[i] * self.grad.data[i];
        };
    }
    return push(std::move(n));
}

void Graph::backward(NodeId loss) {
    if (backward_done_) throw std::logic_error("backward already called on this graph");
    Node& top = node(loss);
    if (top.value.size() != 1) throw std::invalid_argument("backward requires a scalar loss");
    if (!top.requires_grad) throw std::invalid_argument("loss does not depend on any parameter");
    top.grad.data[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        Node& n = nodes_[i];
        if (n.backward_fn && static_cast<NodeId>(i) <= loss) n.backward_fn(*this, n);
    }
    backward_done_ = true;
}

} // namespace sparseset
