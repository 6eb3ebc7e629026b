#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparseset {

// Row-major dense tensor, double precision throughout (reductions included).
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
        : shape{rows, cols}, data(rows * cols, fill) {}
    explicit Tensor(std::vector<std::size_t> s, double fill = 0.0) : shape(std::move(s)) {
        std::size_t n = 1;
        for (auto e : shape) n *= e;
        data.assign(n, fill);
    }

    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
    std::size_t size() const { return data.size(); }

    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    static std::string shape_str(const Tensor& t) {
        std::string s = "(";
        for (std::size_t i = 0; i < t.shape.size(); ++i)
            s += (i ? "x" : "") + std::to_string(t.shape[i]);
        return s + ")";
    }
};

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + Tensor::shape_str(a) +
                                    " vs " + Tensor::shape_str(b));
}

// C += A * B  (A: n x k, B: k x m). ikj order for cache friendliness.
void matmul_acc(const Tensor& a, const Tensor& b, Tensor& c);
// C += A^T * B (A: k x n, B: k x m)
void matmul_at_acc(const Tensor& a, const Tensor& b, Tensor& c);
// C += A * B^T (A: n x k, B: m x k)
void matmul_bt_acc(const Tensor& a, const Tensor& b, Tensor& c);

} // namespace sparseset
