#pragma once

#include "sparseset/baselines.hpp"
#include "sparseset/mlp.hpp"
#include "sparseset/series.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sparseset {

enum class EncodingKind { TRIPLET, GRID };

inline const char* to_string(EncodingKind k) {
    return k == EncodingKind::TRIPLET ? "triplet" : "grid";
}

// h(X) = g(tau, sum_i f(x_i)) with per-record extractor f and
// timestamp-conditioned aggregator g. The GRID variant feeds the same
// machinery with imputed values on a regular grid instead of raw triplets.
struct DeepSetModel {
    MlpConfig extractor_cfg; // input C+2 (triplet) or C+1 (grid) -> latent m
    MlpConfig aggregator_cfg; // input m+1 -> C
    MlpParams extractor;
    MlpParams aggregator;
    std::size_t latent_dim = 0;
    std::size_t channels = 0;
    std::vector<ChannelSpec> channel_specs;
    NormalizationStats stats;
    EncodingKind encoding = EncodingKind::TRIPLET;
    ImputeMethod impute_method = ImputeMethod::LINEAR; // grid variant only
    int grid_points = 0;                               // grid variant only
    double t_split = 0.0;
};

// [normalized time, one-hot(channel), normalized value], dimension C+2.
std::vector<double> encode_triplet(const TripletRecord& r, std::size_t C,
                                   const NormalizationStats& stats);

// Encoded input rows for one context (triplet rows or imputed grid rows).
Tensor encode_context(const DeepSetModel& model, const SparseSeries& context);

// Sum of extractor outputs over the context; zero vector for empty contexts.
std::vector<double> aggregate_context(const DeepSetModel& model, const SparseSeries& context);

// Forecast all channels at time tau, denormalized. Mild extrapolation beyond
// t_max is allowed (up to 1.5 t_max).
std::vector<double> predict_at(const DeepSetModel& model, const SparseSeries& context, double tau);
std::vector<double> predict_at(const DeepSetModel& model, const std::vector<double>& latent,
                               double tau);

struct TrainConfig {
    double lr = 1e-3;
    std::size_t batch_size = 256; // trajectories
    std::size_t steps = 20000;
    std::uint64_t seed = 0;
    std::size_t latent_dim = 128;
    std::vector<std::size_t> extractor_hidden = {128, 128, 128};
    std::vector<std::size_t> aggregator_hidden = {128, 128};
    std::size_t val_every = 500;
    std::size_t val_max_trajectories = 1000;

    void validate() const;
};

struct TrainHistoryEntry {
    std::size_t step = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    DeepSetModel model; // best-validation checkpoint
    std::vector<TrainHistoryEntry> history;
    double best_val_loss = 0.0;
    std::size_t best_val_step = 0;
};

TrainResult train_forecaster(const Dataset& dataset, const TrainConfig& cfg,
                             EncodingKind encoding,
                             ImputeMethod impute_method = ImputeMethod::LINEAR);

// Mean squared error in normalized units over the target triplets of a split.
double forecaster_loss(const DeepSetModel& model, const std::vector<TrajectoryRecord>& split,
                       std::size_t max_trajectories = 0);

// Same loss plus analytic parameter gradients in the order extractor.all()
// followed by aggregator.all(); used for gradient checking.
double forecaster_loss_with_grads(const DeepSetModel& model,
                                  const std::vector<TrajectoryRecord>& batch,
                                  std::vector<Tensor>& grads);

constexpr int kCheckpointFormatVersion = 1;

void save_checkpoint(const DeepSetModel& model, const std::filesystem::path& path);
DeepSetModel load_checkpoint(const std::filesystem::path& path);

} // namespace sparseset
