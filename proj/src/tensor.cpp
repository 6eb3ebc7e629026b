#include "sparseset/tensor.hpp"

namespace sparseset {

void matmul_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    if (b.rows() != k || c.rows() != n || c.cols() != m)
        throw std::invalid_argument("matmul: shape mismatch " + Tensor::shape_str(a) + " * " +
                                    Tensor::shape_str(b) + " -> " + Tensor::shape_str(c));
    const double* A = a.data.data();
    const double* B = b.data.data();
    double* C = c.data.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* Ai = A + i * k;
        double* Ci = C + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = Ai[p];
            if (aip == 0.0) continue;
            const double* Bp = B + p * m;
            for (std::size_t j = 0; j < m; ++j) Ci[j] += aip * Bp[j];
        }
    }
}

void matmul_at_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::size_t k = a.rows(), n = a.cols(), m = b.cols();
    if (b.rows() != k || c.rows() != n || c.cols() != m)
        throw std::invalid_argument("matmul_at: shape mismatch " + Tensor::shape_str(a) + "^T * " +
                                    Tensor::shape_str(b) + " -> " + Tensor::shape_str(c));
    const double* A = a.data.data();
    const double* B = b.data.data();
    double* C = c.data.data();
    for (std::size_t p = 0; p < k; ++p) {
        const double* Ap = A + p * n;
        const double* Bp = B + p * m;
        for (std::size_t i = 0; i < n; ++i) {
            const double api = Ap[i];
            if (api == 0.0) continue;
            double* Ci = C + i * m;
            for (std::size_t j = 0; j < m; ++j) Ci[j] += api * Bp[j];
        }
    }
}

void matmul_bt_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
    if (b.cols() != k || c.rows() != n || c.cols() != m)
        throw std::invalid_argument("matmul_bt: shape mismatch " + Tensor::shape_str(a) + " * " +
                                    Tensor::shape_str(b) + "^T -> " + Tensor::shape_str(c));
    const double* A = a.data.data();
    const double* B = b.data.data();
    double* C = c.data.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* Ai = A + i * k;
        double* Ci = C + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double* Bj = B + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += Ai[p] * Bj[p];
            Ci[j] += acc;
        }
    }
}

} // namespace sparseset
