#pragma once

#include "sparseset/mechanistic.hpp"

#include <string>
#include <vector>

namespace sparseset {

struct ChannelSpec {
    int id = 0;
    std::string name;
    std::string unit;
    double noise_std = 1.0; // sigma_c, channel units
};

// One measurement: (timestamp, channel indicator, value).
struct TripletRecord {
    double time = 0.0; // hours
    int channel = 0;
    double value = 0.0;

    friend bool operator==(const TripletRecord&, const TripletRecord&) = default;
};

// Canonical order: (time, channel, value) ascending. Makes set equality and
// permutation-invariance checks bit-exact.
bool canonical_less(const TripletRecord& a, const TripletRecord& b);
void canonicalize(std::vector<TripletRecord>& records);

// A sparse multichannel series with its context/forecast boundary.
struct SparseSeries {
    std::vector<TripletRecord> records; // canonical order
    double t_split = 0.0;
    double t_max = 0.0;

    SparseSeries() = default;
    SparseSeries(std::vector<TripletRecord> recs, double split, double max);

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    friend bool operator==(const SparseSeries&, const SparseSeries&) = default;
};

// Dense noiseless reference curve, for diagnostics and plots only.
struct TruthGrid {
    std::vector<double> times;
    std::vector<std::vector<double>> values; // [channel][time index]

    friend bool operator==(const TruthGrid&, const TruthGrid&) = default;
};

struct TrajectoryRecord {
    MechanisticParams params;
    SparseSeries context; // times in [0, t_split]
    SparseSeries targets; // times in (t_split, t_max]
    TruthGrid truth;
};

struct NormalizationStats {
    std::vector<double> mean; // per channel
    std::vector<double> std;  // per channel, > 0
    double t_max = 1.0;

    friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

struct Dataset {
    ModelKind model_kind = ModelKind::MMK;
    std::vector<ChannelSpec> channels;
    std::vector<TrajectoryRecord> train;
    std::vector<TrajectoryRecord> val;
    std::vector<TrajectoryRecord> test;
    std::uint64_t seed = 0;
    NormalizationStats stats;
    int format_version = 1;
    double t_split = 0.0;
    double t_max = 0.0;
    int obs_per_part = 0;
    int resample_count = 0;
};

std::pair<SparseSeries, SparseSeries> split_by_horizon(const std::vector<TripletRecord>& records,
                                                       double t_split, double t_max);

NormalizationStats compute_normalization_stats(const std::vector<TrajectoryRecord>& train,
                                               std::size_t n_channels, double t_max);

TripletRecord normalize_record(const TripletRecord& r, const NormalizationStats& stats);
TripletRecord denormalize_record(const TripletRecord& r, const NormalizationStats& stats);

// Collects every invariant violation; never throws.
std::vector<std::string> validate_dataset(const Dataset& d);

} // namespace sparseset
