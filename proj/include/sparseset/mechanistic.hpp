#pragma once

#include "sparseset/rng.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparseset {

enum class ModelKind { MMK, ECOLI };

inline const char* to_string(ModelKind k) { return k == ModelKind::MMK ? "mmk" : "ecoli"; }

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "mmk") return ModelKind::MMK;
    if (s == "ecoli") return ModelKind::ECOLI;
    throw std::invalid_argument("unknown model kind: " + s);
}

// Parameter vector of a macrokinetic model, initial conditions included.
// Values are stored in a fixed canonical order per model kind.
struct MechanisticParams {
    ModelKind kind = ModelKind::MMK;
    std::vector<double> values; // aligned with param_names(kind)

    double get(const std::string& name) const;
    void set(const std::string& name, double v);
};

// Canonical parameter names. MMK state is (S, P); ECOLI state is (X, S, A, DOT).
const std::vector<std::string>& param_names(ModelKind kind);
std::size_t state_dim(ModelKind kind);
std::size_t n_channels(ModelKind kind);
const std::vector<std::string>& channel_names(ModelKind kind);

// Uniform box prior. Parameters may be pinned to a constant (lo == hi),
// e.g. P0 = 0; pinned parameters are excluded from fitting.
struct PriorSpec {
    ModelKind kind = ModelKind::MMK;
    std::vector<double> lo; // aligned with param_names(kind)
    std::vector<double> hi;

    bool is_fixed(std::size_t i) const { return lo[i] == hi[i]; }
    void validate() const;
};

PriorSpec default_prior(ModelKind kind);

MechanisticParams sample_params(ModelKind kind, const PriorSpec& prior, Rng& rng);

// RHS evaluations; dy must have state_dim(kind) entries.
void mmk_rhs(const double* state, const MechanisticParams& p, double* dstate);
void ecoli_rhs(const double* state, const MechanisticParams& p, double* dstate);
void model_rhs(ModelKind kind, const double* state, const MechanisticParams& p, double* dstate);

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using RhsFn = std::function<void(double, const double*, double*)>;
using ClampFn = std::function<void(double*, std::size_t)>;

// Accepted steps of an adaptive integration plus the data needed for
// cubic Hermite dense output between them.
struct DenseTrajectory {
    ModelKind kind = ModelKind::MMK;
    std::vector<double> times;               // strictly increasing, spans [0, t_max]
    std::vector<std::vector<double>> states; // one state vector per accepted time
    std::vector<std::vector<double>> derivs; // RHS at each accepted time, post clamping
    ClampFn clamp; // applied to interpolated states so physical bounds hold
                   // between accepted steps too

    double t_max() const { return times.back(); }

    // Dense-output evaluation; exact at accepted times.
    std::vector<double> eval(double t) const;
    // Channel view of the state: MMK (A=S, P), ECOLI (X, S, A, DOT).
    std::vector<double> eval_channels(double t) const { return eval(t); }
};

struct IntegrateOptions {
    double rtol = 1e-6;
    double atol = 1e-8;
};

DenseTrajectory integrate(ModelKind kind, const MechanisticParams& params, double t_max,
                          const IntegrateOptions& opts = {});

// Generic adaptive driver behind integrate(); clamp (may be null) is applied
// after each accepted step.
DenseTrajectory integrate_adaptive(const RhsFn& rhs, std::vector<double> y0, double t_max,
                                   const IntegrateOptions& opts = {}, const ClampFn& clamp = {});

// Single Dormand-Prince 5(4) step on a generic RHS. Writes the 5th-order
// solution to y5 and the embedded 4th-order solution to y4 (both length n).
// Exposed for the convergence-order tests of the embedded component.
template <typename Rhs>
void dopri5_step(Rhs&& rhs, double t, const double* y, double h, std::size_t n, double* y5,
                 double* y4, double* err_scratch = nullptr);

namespace detail {
// Butcher tableau of Dormand-Prince 5(4).
inline constexpr double DP_C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double DP_A[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double DP_B5[7] = {35.0 / 384,      0,           500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84,   0};
inline constexpr double DP_B4[7] = {5179.0 / 57600,  0,           7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
} // namespace detail

template <typename Rhs>
void dopri5_step(Rhs&& rhs, double t, const double* y, double h, std::size_t n, double* y5,
                 double* y4, double* /*err_scratch*/) {
    using namespace detail;
    std::vector<double> k(7 * n), ytmp(n);
    rhs(t, y, k.data());
    for (int s = 1; s < 7; ++s) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = y[j];
            for (int q = 0; q < s; ++q) acc += h * DP_A[s][q] * k[q * n + j];
            ytmp[j] = acc;
        }
        rhs(t + DP_C[s] * h, ytmp.data(), k.data() + s * n);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double a5 = y[j], a4 = y[j];
        for (int s = 0; s < 7; ++s) {
            a5 += h * DP_B5[s] * k[s * n + j];
            a4 += h * DP_B4[s] * k[s * n + j];
        }
        y5[j] = a5;
        y4[j] = a4;
    }
}

} // namespace sparseset
