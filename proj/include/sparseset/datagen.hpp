#pragma once

#include "sparseset/series.hpp"

#include <filesystem>
#include <utility>
#include <vector>

namespace sparseset {

struct GenerationConfig {
    ModelKind model_kind = ModelKind::MMK;
    int n_train = 100;
    int n_val = 10;
    int n_test = 10;
    int obs_per_part = 14; // 14 for MMK, 30 for E. coli
    std::vector<double> noise_std; // per channel
    PriorSpec prior;
    std::uint64_t seed = 0;
    double t_max = 4.0;
    double t_split = 2.0;
    int truth_grid_points = 101;

    void validate() const;
};

GenerationConfig default_generation_config(ModelKind kind);

// n times i.i.d. uniform on (lo, hi) sorted ascending, each paired with one
// uniformly drawn channel (single-channel measurements).
std::vector<std::pair<double, int>> sample_observation_schedule(int n, double lo, double hi,
                                                               int n_channels, Rng& rng);

std::vector<TripletRecord> simulate_observations(const DenseTrajectory& traj,
                                                 const std::vector<std::pair<double, int>>& schedule,
                                                 const std::vector<double>& noise_std, Rng& rng);

Dataset generate_dataset(const GenerationConfig& cfg);

constexpr int kDatasetFormatVersion = 1;

void write_dataset(const Dataset& d, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

bool datasets_equal(const Dataset& a, const Dataset& b);

} // namespace sparseset
