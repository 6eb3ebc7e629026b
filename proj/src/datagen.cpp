#include "sparseset/datagen.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

using nlohmann::json;

namespace sparseset {

void GenerationConfig::validate() const {
    if (n_train <= 0 || n_val <= 0 || n_test <= 0)
        throw std::invalid_argument("split counts must be positive");
    if (obs_per_part < 1) throw std::invalid_argument("obs_per_part must be >= 1");
    if (noise_std.size() != n_channels(model_kind))
        throw std::invalid_argument("noise_std size must match channel count");
    for (double s : noise_std)
        if (!(s > 0.0)) throw std::invalid_argument("noise_std must be positive");
    if (!(0.0 < t_split && t_split < t_max))
        throw std::invalid_argument("need 0 < t_split < t_max");
    prior.validate();
}

GenerationConfig default_generation_config(ModelKind kind) {
    GenerationConfig cfg;
    cfg.model_kind = kind;
    cfg.prior = default_prior(kind);
    if (kind == ModelKind::MMK) {
        cfg.obs_per_part = 14;
        cfg.noise_std = {0.0454, 0.0454}; // calibrated: GT forecast R2 = 0.9797
        cfg.t_max = 4.0;
        cfg.t_split = 2.0;
    } else {
        cfg.obs_per_part = 30;
        cfg.noise_std = {0.106, 0.106, 0.0265, 1.06}; // calibrated: GT forecast R2 = 0.994
        cfg.t_max = 10.0;
        cfg.t_split = 5.0;
    }
    return cfg;
}

std::vector<std::pair<double, int>> sample_observation_schedule(int n, double lo, double hi,
                                                               int n_channels, Rng& rng) {
    if (!(lo < hi)) throw std::invalid_argument("schedule range empty");
    if (n < 1) throw std::invalid_argument("schedule needs at least one observation");
    std::vector<double> times(static_cast<std::size_t>(n));
    for (auto& t : times) {
        do {
            t = rng.uniform(lo, hi);
        } while (t <= lo); // open interval
    }
    std::sort(times.begin(), times.end());
    std::vector<std::pair<double, int>> out;
    out.reserve(times.size());
    for (double t : times)
        out.emplace_back(t, static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_channels))));
    return out;
}

std::vector<TripletRecord> simulate_observations(
    const DenseTrajectory& traj, const std::vector<std::pair<double, int>>& schedule,
    const std::vector<double>& noise_std, Rng& rng) {
    std::vector<TripletRecord> out;
    out.reserve(schedule.size());
    for (const auto& [t, c] : schedule) {
        const double truth = traj.eval(t)[static_cast<std::size_t>(c)];
        out.push_back({t, c, truth + rng.gaussian() * noise_std[static_cast<std::size_t>(c)]});
    }
    return out;
}

namespace {

std::vector<ChannelSpec> make_channels(ModelKind kind, const std::vector<double>& noise_std) {
    const auto& names = channel_names(kind);
    std::vector<ChannelSpec> out;
    for (std::size_t c = 0; c < names.size(); ++c) {
        std::string unit = (kind == ModelKind::ECOLI && names[c] == "DOT") ? "%" : "g/L";
        out.push_back({static_cast<int>(c), names[c], unit, noise_std[c]});
    }
    return out;
}

TrajectoryRecord generate_trajectory(const GenerationConfig& cfg, std::uint64_t stream,
                                     std::uint64_t index, int& resamples) {
    Rng rng(child_seed(cfg.seed, stream, index));
    const int C = static_cast<int>(n_channels(cfg.model_kind));
    for (int attempt = 0;; ++attempt) {
        auto params = sample_params(cfg.model_kind, cfg.prior, rng);
        DenseTrajectory traj;
        try {
            traj = integrate(cfg.model_kind, params, cfg.t_max);
        } catch (const IntegrationError&) {
            ++resamples;
            if (attempt > 100) throw;
            continue;
        }
        auto ctx_sched = sample_observation_schedule(cfg.obs_per_part, 0.0, cfg.t_split, C, rng);
        auto tgt_sched =
            sample_observation_schedule(cfg.obs_per_part, cfg.t_split, cfg.t_max, C, rng);
        TrajectoryRecord rec;
        rec.params = std::move(params);
        rec.context = SparseSeries(simulate_observations(traj, ctx_sched, cfg.noise_std, rng),
                                   cfg.t_split, cfg.t_max);
        rec.targets = SparseSeries(simulate_observations(traj, tgt_sched, cfg.noise_std, rng),
                                   cfg.t_split, cfg.t_max);
        rec.truth.times.resize(static_cast<std::size_t>(cfg.truth_grid_points));
        rec.truth.values.assign(static_cast<std::size_t>(C), {});
        for (auto& v : rec.truth.values) v.resize(rec.truth.times.size());
        for (std::size_t k = 0; k < rec.truth.times.size(); ++k) {
            double t = cfg.t_max * static_cast<double>(k) /
                       static_cast<double>(cfg.truth_grid_points - 1);
            rec.truth.times[k] = t;
            auto y = traj.eval(t);
            for (int c = 0; c < C; ++c) rec.truth.values[static_cast<std::size_t>(c)][k] = y[static_cast<std::size_t>(c)];
        }
        return rec;
    }
}

} // namespace

Dataset generate_dataset(const GenerationConfig& cfg) {
    cfg.validate();
    Dataset d;
    d.model_kind = cfg.model_kind;
    d.channels = make_channels(cfg.model_kind, cfg.noise_std);
    d.seed = cfg.seed;
    d.format_version = kDatasetFormatVersion;
    d.t_split = cfg.t_split;
    d.t_max = cfg.t_max;
    d.obs_per_part = cfg.obs_per_part;

    int resamples = 0;
    const int total = cfg.n_train + cfg.n_val + cfg.n_test;
    auto fill = [&](std::vector<TrajectoryRecord>& split, std::uint64_t stream, int count) {
        split.resize(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            split[static_cast<std::size_t>(i)] =
                generate_trajectory(cfg, stream, static_cast<std::uint64_t>(i), resamples);
    };
    fill(d.train, 0, cfg.n_train);
    fill(d.val, 1, cfg.n_val);
    fill(d.test, 2, cfg.n_test);
    d.resample_count = resamples;
    if (resamples > total / 100)
        throw std::runtime_error("resample rate above 1%: prior likely pathological (" +
                                 std::to_string(resamples) + " resamples for " +
                                 std::to_string(total) + " trajectories)");
    d.stats = compute_normalization_stats(d.train, n_channels(cfg.model_kind), cfg.t_max);
    return d;
}

namespace {

json stats_to_json(const NormalizationStats& s) {
    return json{{"mean", s.mean}, {"std", s.std}, {"t_max", s.t_max}};
}

NormalizationStats stats_from_json(const json& j) {
    NormalizationStats s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.std = j.at("std").get<std::vector<double>>();
    s.t_max = j.at("t_max").get<double>();
    return s;
}

json series_to_json(const SparseSeries& s) {
    json arr = json::array();
    for (const auto& r : s.records) arr.push_back(json::array({r.time, r.channel, r.value}));
    return arr;
}

std::vector<TripletRecord> series_records_from_json(const json& arr) {
    std::vector<TripletRecord> out;
    for (const auto& e : arr)
        out.push_back({e.at(0).get<double>(), e.at(1).get<int>(), e.at(2).get<double>()});
    return out;
}

json trajectory_to_json(const TrajectoryRecord& t, ModelKind kind) {
    json params = json::object();
    const auto& names = param_names(kind);
    for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = t.params.values[i];
    return json{{"params", params},
                {"context", series_to_json(t.context)},
                {"targets", series_to_json(t.targets)},
                {"truth", {{"t", t.truth.times}, {"y", t.truth.values}}}};
}

TrajectoryRecord trajectory_from_json(const json& j, ModelKind kind, double t_split,
                                      double t_max) {
    TrajectoryRecord t;
    t.params.kind = kind;
    const auto& names = param_names(kind);
    for (const auto& n : names) t.params.values.push_back(j.at("params").at(n).get<double>());
    t.context = SparseSeries(series_records_from_json(j.at("context")), t_split, t_max);
    t.targets = SparseSeries(series_records_from_json(j.at("targets")), t_split, t_max);
    t.truth.times = j.at("truth").at("t").get<std::vector<double>>();
    t.truth.values = j.at("truth").at("y").get<std::vector<std::vector<double>>>();
    return t;
}

void write_split(const std::filesystem::path& path, const std::vector<TrajectoryRecord>& split,
                 ModelKind kind) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& t : split) out << trajectory_to_json(t, kind).dump() << "\n";
}

std::vector<TrajectoryRecord> read_split(const std::filesystem::path& path, ModelKind kind,
                                         double t_split, double t_max) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<TrajectoryRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(trajectory_from_json(json::parse(line), kind, t_split, t_max));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": malformed trajectory line: " + e.what());
        }
    }
    return out;
}

} // namespace

void write_dataset(const Dataset& d, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json channels = json::array();
    for (const auto& c : d.channels)
        channels.push_back(
            {{"id", c.id}, {"name", c.name}, {"unit", c.unit}, {"noise_std", c.noise_std}});
    json meta{{"format_version", d.format_version},
              {"model_kind", to_string(d.model_kind)},
              {"channels", channels},
              {"seed", d.seed},
              {"stats", stats_to_json(d.stats)},
              {"obs_per_part", d.obs_per_part},
              {"t_split", d.t_split},
              {"t_max", d.t_max},
              {"resample_count", d.resample_count}};
    std::ofstream out(dir / "meta.json");
    if (!out) throw std::runtime_error("cannot open " + (dir / "meta.json").string());
    out << meta.dump(2) << "\n";
    write_split(dir / "train.jsonl", d.train, d.model_kind);
    write_split(dir / "val.jsonl", d.val, d.model_kind);
    write_split(dir / "test.jsonl", d.test, d.model_kind);
}

Dataset read_dataset(const std::filesystem::path& dir) {
    std::ifstream in(dir / "meta.json");
    if (!in) throw std::runtime_error("cannot open " + (dir / "meta.json").string());
    json meta = json::parse(in);
    Dataset d;
    d.format_version = meta.at("format_version").get<int>();
    if (d.format_version != kDatasetFormatVersion)
        throw std::runtime_error("dataset format_version " + std::to_string(d.format_version) +
                                 " does not match supported version " +
                                 std::to_string(kDatasetFormatVersion));
    d.model_kind = model_kind_from_string(meta.at("model_kind").get<std::string>());
    for (const auto& c : meta.at("channels"))
        d.channels.push_back({c.at("id").get<int>(), c.at("name").get<std::string>(),
                              c.at("unit").get<std::string>(), c.at("noise_std").get<double>()});
    d.seed = meta.at("seed").get<std::uint64_t>();
    d.stats = stats_from_json(meta.at("stats"));
    d.obs_per_part = meta.at("obs_per_part").get<int>();
    d.t_split = meta.at("t_split").get<double>();
    d.t_max = meta.at("t_max").get<double>();
    d.resample_count = meta.at("resample_count").get<int>();
    d.train = read_split(dir / "train.jsonl", d.model_kind, d.t_split, d.t_max);
    d.val = read_split(dir / "val.jsonl", d.model_kind, d.t_split, d.t_max);
    d.test = read_split(dir / "test.jsonl", d.model_kind, d.t_split, d.t_max);
    return d;
}

bool datasets_equal(const Dataset& a, const Dataset& b) {
    auto chan_eq = [](const ChannelSpec& x, const ChannelSpec& y) {
        return x.id == y.id && x.name == y.name && x.unit == y.unit && x.noise_std == y.noise_std;
    };
    if (a.channels.size() != b.channels.size()) return false;
    for (std::size_t i = 0; i < a.channels.size(); ++i)
        if (!chan_eq(a.channels[i], b.channels[i])) return false;
    auto traj_eq = [](const TrajectoryRecord& x, const TrajectoryRecord& y) {
        return x.params.kind == y.params.kind && x.params.values == y.params.values &&
               x.context == y.context && x.targets == y.targets && x.truth == y.truth;
    };
    auto split_eq = [&](const std::vector<TrajectoryRecord>& x,
                        const std::vector<TrajectoryRecord>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!traj_eq(x[i], y[i])) return false;
        return true;
    };
    return a.model_kind == b.model_kind && a.seed == b.seed && a.stats == b.stats &&
           a.format_version == b.format_version && a.t_split == b.t_split && a.t_max == b.t_max &&
           a.obs_per_part == b.obs_per_part && split_eq(a.train, b.train) &&
           split_eq(a.val, b.val) && split_eq(a.test, b.test);
}

} // namespace sparseset
