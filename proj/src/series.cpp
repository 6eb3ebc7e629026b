#include "sparseset/series.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace sparseset {

bool canonical_less(const TripletRecord& a, const TripletRecord& b) {
    return std::tie(a.time, a.channel, a.value) < std::tie(b.time, b.channel, b.value);
}

void canonicalize(std::vector<TripletRecord>& records) {
    std::stable_sort(records.begin(), records.end(), canonical_less);
}

SparseSeries::SparseSeries(std::vector<TripletRecord> recs, double split, double max)
    : records(std::move(recs)), t_split(split), t_max(max) {
    canonicalize(records);
}

std::pair<SparseSeries, SparseSeries> split_by_horizon(const std::vector<TripletRecord>& records,
                                                       double t_split, double t_max) {
    std::vector<TripletRecord> ctx, tgt;
    for (const auto& r : records) {
        if (!std::isfinite(r.time)) throw std::invalid_argument("non-finite record time");
        if (r.time < 0.0 || r.time > t_max)
            throw std::invalid_argument("record time outside [0, t_max]");
        // boundary records belong to the observed part
        (r.time <= t_split ? ctx : tgt).push_back(r);
    }
    return {SparseSeries(std::move(ctx), t_split, t_max),
            SparseSeries(std::move(tgt), t_split, t_max)};
}

NormalizationStats compute_normalization_stats(const std::vector<TrajectoryRecord>& train,
                                               std::size_t n_channels, double t_max) {
    if (train.empty()) throw std::invalid_argument("empty training split");
    std::vector<double> sum(n_channels, 0.0), sumsq(n_channels, 0.0);
    std::vector<std::size_t> count(n_channels, 0);
    auto accumulate = [&](const SparseSeries& s) {
        for (const auto& r : s.records) {
            sum[static_cast<std::size_t>(r.channel)] += r.value;
            sumsq[static_cast<std::size_t>(r.channel)] += r.value * r.value;
            ++count[static_cast<std::size_t>(r.channel)];
        }
    };
    for (const auto& t : train) {
        accumulate(t.context);
        accumulate(t.targets);
    }
    NormalizationStats stats;
    stats.t_max = t_max;
    stats.mean.resize(n_channels);
    stats.std.resize(n_channels);
    for (std::size_t c = 0; c < n_channels; ++c) {
        if (count[c] < 2)
            throw std::runtime_error("channel " + std::to_string(c) +
                                     " has fewer than 2 values in the training split");
        double n = static_cast<double>(count[c]);
        double mean = sum[c] / n;
        double var = std::max(0.0, sumsq[c] / n - mean * mean); // population convention
        stats.mean[c] = mean;
        stats.std[c] = std::max(std::sqrt(var), 1e-8);
    }
    return stats;
}

TripletRecord normalize_record(const TripletRecord& r, const NormalizationStats& stats) {
    auto c = static_cast<std::size_t>(r.channel);
    return {r.time / stats.t_max, r.channel, (r.value - stats.mean[c]) / stats.std[c]};
}

TripletRecord denormalize_record(const TripletRecord& r, const NormalizationStats& stats) {
    auto c = static_cast<std::size_t>(r.channel);
    return {r.time * stats.t_max, r.channel, r.value * stats.std[c] + stats.mean[c]};
}

namespace {

void validate_series(const SparseSeries& s, std::size_t n_channels, const std::string& where,
                     bool strictly_after_split, std::vector<std::string>& out) {
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        const auto& r = s.records[i];
        std::string tag = where + " record " + std::to_string(i);
        if (!std::isfinite(r.time) || r.time < 0.0) out.push_back(tag + ": bad time");
        if (r.time > s.t_max) out.push_back(tag + ": time beyond t_max");
        if (!std::isfinite(r.value)) out.push_back(tag + ": non-finite value");
        if (r.channel < 0 || static_cast<std::size_t>(r.channel) >= n_channels)
            out.push_back(tag + ": channel id out of range");
        if (i > 0 && canonical_less(r, s.records[i - 1]))
            out.push_back(tag + ": records not in canonical order");
        if (strictly_after_split && r.time <= s.t_split)
            out.push_back(tag + ": target time not after t_split");
        if (!strictly_after_split && r.time > s.t_split)
            out.push_back(tag + ": context time after t_split");
    }
    if (s.t_split < 0.0 || s.t_split > s.t_max)
        out.push_back(where + ": t_split outside [0, t_max]");
}

} // namespace

std::vector<std::string> validate_dataset(const Dataset& d) {
    std::vector<std::string> out;
    const std::size_t C = d.channels.size();
    for (std::size_t c = 0; c < C; ++c) {
        if (d.channels[c].id != static_cast<int>(c))
            out.push_back("channel ids not contiguous at index " + std::to_string(c));
        if (!(d.channels[c].noise_std > 0.0))
            out.push_back("channel " + d.channels[c].name + ": noise_std not positive");
        for (std::size_t c2 = c + 1; c2 < C; ++c2)
            if (d.channels[c].name == d.channels[c2].name)
                out.push_back("duplicate channel name " + d.channels[c].name);
    }
    auto check_split = [&](const std::vector<TrajectoryRecord>& split, const std::string& name) {
        for (std::size_t i = 0; i < split.size(); ++i) {
            const auto& t = split[i];
            std::string where = name + "[" + std::to_string(i) + "]";
            validate_series(t.context, C, where + ".context", false, out);
            validate_series(t.targets, C, where + ".targets", true, out);
            if (t.context.t_split != t.targets.t_split || t.context.t_max != t.targets.t_max)
                out.push_back(where + ": context/targets split metadata disagree");
            for (double v : t.params.values)
                if (!std::isfinite(v)) out.push_back(where + ": non-finite parameter");
        }
    };
    check_split(d.train, "train");
    check_split(d.val, "val");
    check_split(d.test, "test");

    if (!d.train.empty() && !d.stats.mean.empty()) {
        try {
            auto recomputed = compute_normalization_stats(d.train, C, d.t_max);
            for (std::size_t c = 0; c < C; ++c) {
                auto rel = [](double a, double b) {
                    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
                };
                if (rel(recomputed.mean[c], d.stats.mean[c]) > 1e-9 ||
                    rel(recomputed.std[c], d.stats.std[c]) > 1e-9)
                    out.push_back("stored stats disagree with recomputation for channel " +
                                  std::to_string(c));
            }
        } catch (const std::exception& e) {
            out.push_back(std::string("stats recomputation failed: ") + e.what());
        }
    }
    return out;
}

} // namespace sparseset
