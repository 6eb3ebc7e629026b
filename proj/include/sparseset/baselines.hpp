#pragma once

#include "sparseset/series.hpp"

#include <functional>
#include <vector>

namespace sparseset {

enum class ImputeMethod { LINEAR, RBF };

inline const char* to_string(ImputeMethod m) {
    return m == ImputeMethod::LINEAR ? "linear" : "rbf";
}

// Per-channel values imputed onto a regular grid over [0, t_split].
struct ImputedGrid {
    std::vector<double> times;
    std::vector<std::vector<double>> values; // [grid index][channel]
    ImputeMethod method = ImputeMethod::LINEAR;
};

std::vector<double> make_regular_grid(int n, double t_split);

// Linear interpolation per channel with flat extrapolation outside the
// observed hull. Channels with no observations are filled with
// fill_value[c] (the normalized train mean, i.e. 0, in the pipeline).
ImputedGrid impute_linear(const SparseSeries& context, const std::vector<double>& grid, int C,
                          const std::vector<double>& fill_value = {});

// Nadaraya-Watson with a Gaussian kernel; bandwidth = median pairwise gap of
// the channel's observation times, floored at t_split / (2 n).
ImputedGrid impute_rbf(const SparseSeries& context, const std::vector<double>& grid, int C,
                       const std::vector<double>& fill_value = {});

ImputedGrid impute(ImputeMethod method, const SparseSeries& context,
                   const std::vector<double>& grid, int C,
                   const std::vector<double>& fill_value = {});

// 1/2 sum of squared residuals weighted by 1/sigma_c^2; infinite when the
// integration fails.
double mechanistic_nll(const MechanisticParams& params, const SparseSeries& context,
                       ModelKind kind, const std::vector<double>& sigma);

struct BfgsOptions {
    int max_iterations = 200;
    double grad_tol = 1e-6;      // infinity norm
    double rel_f_tol = 1e-10;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 40;
    double fd_step = 1e-5; // scaled by max(|x_i|, 1)
};

struct BfgsResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
};

BfgsResult bfgs_minimize(const std::function<double(const std::vector<double>&)>& objective,
                         std::vector<double> x0, const BfgsOptions& options = {});

struct FitResult {
    MechanisticParams params;
    double loss = 0.0;
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
};

// ML fitting of the mechanistic model in log-parameter space; fixed prior
// entries (lo == hi) are pinned and excluded from the search. multistart > 1
// draws extra starting points from the prior and keeps the best fit.
FitResult fit_mechanistic_bfgs(const SparseSeries& context, ModelKind kind,
                               const PriorSpec& prior, const std::vector<double>& sigma,
                               int multistart = 1, std::uint64_t seed = 0,
                               const BfgsOptions& options = {});

} // namespace sparseset
