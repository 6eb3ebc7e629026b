#pragma once

#include "sparseset/rng.hpp"
#include "sparseset/series.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sparseset {

struct ScoreRecord {
    std::string method;
    std::string dataset_id;
    double r2 = 0.0;
    double stderr_r2 = 0.0;
    std::size_t n_targets = 0;
    std::vector<double> per_channel_r2;
    std::size_t n_failed = 0;
};

// R^2 = 1 - sum((p-y)/sigma_c)^2 / sum((y-ybar_c)/sigma_c)^2, pooled over all
// targets of the split; ybar_c is the pooled target mean per channel.
double noise_normalized_r2(const std::vector<double>& predictions,
                           const std::vector<TripletRecord>& targets,
                           const std::vector<double>& sigma);

std::vector<double> per_channel_r2(const std::vector<double>& predictions,
                                   const std::vector<TripletRecord>& targets,
                                   const std::vector<double>& sigma, std::size_t n_channels);

// Forecasts of the generating mechanistic model with the true parameters,
// grouped per trajectory and aligned with each trajectory's target records.
std::vector<std::vector<double>> ground_truth_forecast(const std::vector<TrajectoryRecord>& split,
                                                       ModelKind kind);

// Nonparametric bootstrap over trajectories (targets within a trajectory are
// correlated through the shared parameters).
double bootstrap_stderr(const std::vector<std::vector<double>>& preds_by_traj,
                        const std::vector<TrajectoryRecord>& split,
                        const std::vector<double>& sigma, int resamples, Rng& rng);

ScoreRecord score_method(const std::string& method, const std::string& dataset_id,
                         const std::vector<std::vector<double>>& preds_by_traj,
                         const std::vector<TrajectoryRecord>& split,
                         const std::vector<double>& sigma, std::size_t n_channels,
                         std::size_t n_failed, int bootstrap_resamples, std::uint64_t seed);

// One example trajectory overlay: truth curve, context/target points, and a
// method's dense forecast.
struct ExamplePlot {
    std::string dataset_id;
    std::string method;
    int index = 0;
    TruthGrid truth;
    SparseSeries context;
    SparseSeries targets;
    std::vector<double> pred_times;
    std::vector<std::vector<double>> pred_values; // [channel][time index]
    std::vector<std::string> channel_names;
};

void render_report(const std::vector<ScoreRecord>& scores, const std::vector<ExamplePlot>& examples,
                   const std::filesystem::path& out_dir);

std::vector<ScoreRecord> parse_results_csv(const std::filesystem::path& path);

std::string render_svg(const ExamplePlot& plot);

} // namespace sparseset
