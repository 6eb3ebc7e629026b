#include "sparseset/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using nlohmann::json;

namespace sparseset {

namespace {

const std::vector<std::string> kAllMethods = {"ground_truth", "fit", "linear", "rbf", "triplet"};

Preset preset_from_string(const std::string& s) {
    if (s == "micro") return Preset::MICRO;
    if (s == "smoke") return Preset::SMOKE;
    if (s == "benchmark") return Preset::BENCHMARK;
    throw ConfigError("invalid preset '" + s + "' (expected micro|smoke|benchmark)");
}

const char* to_string(Preset p) {
    switch (p) {
        case Preset::MICRO: return "micro";
        case Preset::SMOKE: return "smoke";
        default: return "benchmark";
    }
}

void apply_preset(RunConfig& cfg) {
    cfg.generation = default_generation_config(cfg.model);
    cfg.train = TrainConfig{};
    switch (cfg.preset) {
        case Preset::MICRO:
            cfg.generation.n_train = 60;
            cfg.generation.n_val = 16;
            cfg.generation.n_test = 16;
            cfg.train.batch_size = 16;
            cfg.train.steps = 40;
            cfg.train.latent_dim = 16;
            cfg.train.extractor_hidden = {16};
            cfg.train.aggregator_hidden = {16};
            cfg.train.val_every = 20;
            cfg.bootstrap_resamples = 50;
            cfg.n_plot_examples = 1;
            break;
        case Preset::SMOKE:
            cfg.generation.n_train = 10000;
            cfg.generation.n_val = 1000;
            cfg.generation.n_test = 1000;
            // network sized for a single-core time budget; the benchmark
            // preset uses the full-width configuration
            cfg.train.batch_size = 128;
            cfg.train.latent_dim = 64;
            cfg.train.extractor_hidden = {64, 64};
            cfg.train.aggregator_hidden = {64};
            cfg.train.steps = 6000;
            cfg.train.val_every = 250;
            if (cfg.model == ModelKind::ECOLI) {
                // the 4-state model needs more steps to converge at this width
                cfg.train.steps = 14000;
                cfg.fit_max_trajectories = 300;
            }
            break;
        case Preset::BENCHMARK:
            cfg.generation.n_train = 50000;
            cfg.generation.n_val = 5000;
            cfg.generation.n_test = 5000;
            cfg.train.steps = 100000;
            break;
    }
}

std::vector<std::size_t> sizes_from_json(const json& j) {
    return j.get<std::vector<std::size_t>>();
}

} // namespace

RunConfig resolve_config(const std::string& config_json_text) {
    json j;
    try {
        j = json::parse(config_json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    static const std::set<std::string> known = {
        "model",          "preset",        "seed",
        "threads",        "out",           "methods",
        "multistart",     "bootstrap-resamples", "fit-max-trajectories",
        "n-plot-examples", "n-train",      "n-val",
        "n-test",         "obs-per-part",  "noise-std",
        "t-max",          "t-split",       "prior",
        "lr",             "batch-size",    "steps",
        "latent-dim",     "extractor-hidden", "aggregator-hidden",
        "val-every",      "val-max-trajectories"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

    RunConfig cfg;
    try {
        if (j.contains("model")) cfg.model = model_kind_from_string(j["model"].get<std::string>());
        if (j.contains("preset")) cfg.preset = preset_from_string(j["preset"].get<std::string>());
        apply_preset(cfg);
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
        if (j.contains("out")) cfg.out = j["out"].get<std::string>();
        cfg.methods = kAllMethods;
        if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
        if (cfg.methods.empty()) throw ConfigError("methods must be non-empty");
        for (const auto& m : cfg.methods)
            if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end())
                throw ConfigError("unknown method '" + m + "'");
        if (j.contains("multistart")) cfg.multistart = j["multistart"].get<int>();
        if (cfg.multistart < 1) throw ConfigError("multistart must be >= 1");
        if (j.contains("bootstrap-resamples"))
            cfg.bootstrap_resamples = j["bootstrap-resamples"].get<int>();
        if (j.contains("fit-max-trajectories"))
            cfg.fit_max_trajectories = j["fit-max-trajectories"].get<std::size_t>();
        if (j.contains("n-plot-examples")) cfg.n_plot_examples = j["n-plot-examples"].get<int>();

        auto& g = cfg.generation;
        if (j.contains("n-train")) g.n_train = j["n-train"].get<int>();
        if (j.contains("n-val")) g.n_val = j["n-val"].get<int>();
        if (j.contains("n-test")) g.n_test = j["n-test"].get<int>();
        if (j.contains("obs-per-part")) g.obs_per_part = j["obs-per-part"].get<int>();
        if (j.contains("noise-std")) g.noise_std = j["noise-std"].get<std::vector<double>>();
        if (j.contains("t-max")) g.t_max = j["t-max"].get<double>();
        if (j.contains("t-split")) g.t_split = j["t-split"].get<double>();
        if (j.contains("prior")) {
            const auto& names = param_names(cfg.model);
            for (const auto& [name, bounds] : j["prior"].items()) {
                auto it = std::find(names.begin(), names.end(), name);
                if (it == names.end())
                    throw ConfigError("unknown prior parameter '" + name + "'");
                auto i = static_cast<std::size_t>(it - names.begin());
                g.prior.lo[i] = bounds.at(0).get<double>();
                g.prior.hi[i] = bounds.at(1).get<double>();
            }
        }
        g.seed = cfg.seed;

        auto& t = cfg.train;
        if (j.contains("lr")) t.lr = j["lr"].get<double>();
        if (j.contains("batch-size")) t.batch_size = j["batch-size"].get<std::size_t>();
        if (j.contains("steps")) t.steps = j["steps"].get<std::size_t>();
        if (j.contains("latent-dim")) t.latent_dim = j["latent-dim"].get<std::size_t>();
        if (j.contains("extractor-hidden")) t.extractor_hidden = sizes_from_json(j["extractor-hidden"]);
        if (j.contains("aggregator-hidden"))
            t.aggregator_hidden = sizes_from_json(j["aggregator-hidden"]);
        if (j.contains("val-every")) t.val_every = j["val-every"].get<std::size_t>();
        if (j.contains("val-max-trajectories"))
            t.val_max_trajectories = j["val-max-trajectories"].get<std::size_t>();
        t.seed = cfg.seed;

        g.validate();
        t.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
    return cfg;
}

std::string resolved_config_json(const RunConfig& cfg) {
    json prior = json::object();
    const auto& names = param_names(cfg.model);
    for (std::size_t i = 0; i < names.size(); ++i)
        prior[names[i]] = json::array({cfg.generation.prior.lo[i], cfg.generation.prior.hi[i]});
    json j{{"model", to_string(cfg.model)},
           {"preset", to_string(cfg.preset)},
           {"seed", cfg.seed},
           {"threads", cfg.threads},
           {"out", cfg.out.string()},
           {"methods", cfg.methods},
           {"multistart", cfg.multistart},
           {"bootstrap-resamples", cfg.bootstrap_resamples},
           {"fit-max-trajectories", cfg.fit_max_trajectories},
           {"n-plot-examples", cfg.n_plot_examples},
           {"n-train", cfg.generation.n_train},
           {"n-val", cfg.generation.n_val},
           {"n-test", cfg.generation.n_test},
           {"obs-per-part", cfg.generation.obs_per_part},
           {"noise-std", cfg.generation.noise_std},
           {"t-max", cfg.generation.t_max},
           {"t-split", cfg.generation.t_split},
           {"prior", prior},
           {"lr", cfg.train.lr},
           {"batch-size", cfg.train.batch_size},
           {"steps", cfg.train.steps},
           {"latent-dim", cfg.train.latent_dim},
           {"extractor-hidden", cfg.train.extractor_hidden},
           {"aggregator-hidden", cfg.train.aggregator_hidden},
           {"val-every", cfg.train.val_every},
           {"val-max-trajectories", cfg.train.val_max_trajectories}};
    return j.dump(2);
}

std::string method_display_name(const std::string& method) {
    if (method == "ground_truth") return "Ground truth";
    if (method == "fit") return "Mechanistic Model";
    if (method == "linear") return "Deep Sets + linear splines";
    if (method == "rbf") return "Deep Sets + RBF kernel reg.";
    if (method == "triplet") return "Deep Sets + triplet encoding";
    throw ConfigError("unknown method '" + method + "'");
}

namespace {

struct StepLog {
    std::string name;
    std::chrono::steady_clock::time_point start;
    StepLog(const std::string& step, const RunConfig& cfg) : name(step) {
        start = std::chrono::steady_clock::now();
        std::cout << "[" << name << "] seed=" << cfg.seed << " config-hash=" << std::hex
                  << std::hash<std::string>{}(resolved_config_json(cfg)) << std::dec << "\n";
    }
    ~StepLog() {
        auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "[" << name << "] done in " << secs << " s\n";
    }
};

void echo_config(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out);
    std::ofstream out(cfg.out / "config.resolved.json");
    out << resolved_config_json(cfg) << "\n";
}

std::filesystem::path dataset_dir(const RunConfig& cfg) { return cfg.out / "dataset"; }
std::filesystem::path checkpoint_path(const RunConfig& cfg, const std::string& method) {
    return cfg.out / "checkpoints" / (method + ".json");
}
std::filesystem::path fits_path(const RunConfig& cfg) { return cfg.out / "fits.csv"; }
std::filesystem::path scores_path(const RunConfig& cfg) { return cfg.out / "scores.json"; }

Dataset require_dataset(const RunConfig& cfg) {
    if (!std::filesystem::exists(dataset_dir(cfg) / "meta.json"))
        throw MissingArtifactError("dataset not found at " + dataset_dir(cfg).string() +
                                   " (run `generate` first)");
    return read_dataset(dataset_dir(cfg));
}

std::string fmt17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

void run_generate(const RunConfig& cfg) {
    StepLog log("generate", cfg);
    echo_config(cfg);
    auto dir = dataset_dir(cfg);
    try {
        auto d = generate_dataset(cfg.generation);
        write_dataset(d, dir);
        if (d.resample_count > 0)
            std::cout << "[generate] resampled " << d.resample_count << " stiff parameter draws\n";
    } catch (...) {
        std::filesystem::remove_all(dir);
        throw;
    }
}

void run_train(const RunConfig& cfg, const std::string& method) {
    StepLog log("train:" + method, cfg);
    echo_config(cfg);
    EncodingKind encoding;
    ImputeMethod impute_method = ImputeMethod::LINEAR;
    if (method == "triplet") {
        encoding = EncodingKind::TRIPLET;
    } else if (method == "linear") {
        encoding = EncodingKind::GRID;
    } else if (method == "rbf") {
        encoding = EncodingKind::GRID;
        impute_method = ImputeMethod::RBF;
    } else {
        throw ConfigError("train expects method triplet|linear|rbf, got '" + method + "'");
    }
    auto dataset = require_dataset(cfg);
    auto ckpt = checkpoint_path(cfg, method);
    try {
        auto result = train_forecaster(dataset, cfg.train, encoding, impute_method);
        save_checkpoint(result.model, ckpt);
        json hist = json::array();
        for (const auto& h : result.history)
            hist.push_back({{"step", h.step}, {"train_loss", h.train_loss}, {"val_loss", h.val_loss}});
        std::ofstream out(cfg.out / "checkpoints" / (method + ".history.json"));
        out << json{{"best_val_loss", result.best_val_loss},
                    {"best_val_step", result.best_val_step},
                    {"history", hist}}
                   .dump(2)
            << "\n";
        std::cout << "[train:" << method << "] best val loss " << result.best_val_loss
                  << " at step " << result.best_val_step << "\n";
    } catch (...) {
        std::filesystem::remove(ckpt);
        std::filesystem::remove(cfg.out / "checkpoints" / (method + ".history.json"));
        throw;
    }
}

void run_fit(const RunConfig& cfg) {
    StepLog log("fit", cfg);
    echo_config(cfg);
    auto dataset = require_dataset(cfg);
    std::vector<double> sigma;
    for (const auto& c : dataset.channels) sigma.push_back(c.noise_std);
    std::size_t n = dataset.test.size();
    if (cfg.fit_max_trajectories > 0) n = std::min(n, cfg.fit_max_trajectories);
    auto path = fits_path(cfg);
    std::string header = "index,converged,iterations,loss,grad_norm";
    for (const auto& name : param_names(dataset.model_kind)) header += ',' + name;

    // Each fit is seeded independently, so an interrupted run can resume from a
    // partial fits.csv with bit-identical results. Keep the longest prefix of
    // complete rows with contiguous indices 0..k-1 and redo the rest.
    std::vector<std::string> done;
    if (std::ifstream in(path); in) {
        std::string line;
        if (std::getline(in, line) && line == header) {
            const std::size_t n_cols = 5 + param_names(dataset.model_kind).size();
            while (std::getline(in, line)) {
                const std::size_t cols =
                    std::count(line.begin(), line.end(), ',') + 1;
                if (cols != n_cols ||
                    line.rfind(std::to_string(done.size()) + ',', 0) != 0)
                    break;
                done.push_back(line);
            }
        }
    }
    if (done.size() > n) done.resize(n);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << header << "\n";
    for (const auto& line : done) out << line << "\n";
    out.flush();
    if (!done.empty())
        std::cout << "[fit] resuming after " << done.size() << " completed fits\n";
    for (std::size_t i = done.size(); i < n; ++i) {
        auto fit = fit_mechanistic_bfgs(dataset.test[i].context, dataset.model_kind,
                                        cfg.generation.prior, sigma, cfg.multistart,
                                        child_seed(cfg.seed, 0xf1, i));
        out << i << ',' << (fit.converged ? 1 : 0) << ',' << fit.iterations << ','
            << fmt17(fit.loss) << ',' << fmt17(fit.grad_norm);
        for (double v : fit.params.values) out << ',' << fmt17(v);
        out << "\n";
        out.flush();
    }
}

std::vector<FitRow> read_fit_csv(const std::filesystem::path& path, ModelKind kind) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("fit results not found at " + path.string() +
                                        " (run `fit` first)");
    std::string line;
    std::getline(in, line);
    std::vector<FitRow> rows;
    const std::size_t n_params = param_names(kind).size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        FitRow r;
        std::getline(ss, tok, ',');
        r.index = std::stoi(tok);
        std::getline(ss, tok, ',');
        r.converged = tok == "1";
        std::getline(ss, tok, ',');
        r.iterations = std::stoi(tok);
        std::getline(ss, tok, ',');
        r.loss = std::stod(tok);
        std::getline(ss, tok, ',');
        r.grad_norm = std::stod(tok);
        while (std::getline(ss, tok, ',')) r.params.push_back(std::stod(tok));
        if (r.params.size() != n_params)
            throw std::runtime_error("fit CSV row has wrong parameter count");
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

// Pooled per-channel target means, the D27 fallback prediction.
std::vector<double> pooled_target_means(const std::vector<TrajectoryRecord>& split,
                                        std::size_t C) {
    std::vector<double> sum(C, 0.0);
    std::vector<std::size_t> count(C, 0);
    for (const auto& t : split)
        for (const auto& r : t.targets.records) {
            sum[static_cast<std::size_t>(r.channel)] += r.value;
            ++count[static_cast<std::size_t>(r.channel)];
        }
    for (std::size_t c = 0; c < C; ++c)
        if (count[c]) sum[c] /= static_cast<double>(count[c]);
    return sum;
}

struct MethodPredictions {
    std::vector<std::vector<double>> preds_by_traj;
    std::size_t n_failed = 0;
};

MethodPredictions predict_deepset(const DeepSetModel& model,
                                  const std::vector<TrajectoryRecord>& split) {
    MethodPredictions out;
    for (const auto& traj : split) {
        auto latent = aggregate_context(model, traj.context);
        std::vector<double> preds;
        preds.reserve(traj.targets.size());
        bool ok = true;
        for (const auto& r : traj.targets.records) {
            auto p = predict_at(model, latent, r.time);
            const double v = p[static_cast<std::size_t>(r.channel)];
            if (!std::isfinite(v)) ok = false;
            preds.push_back(v);
        }
        if (!ok) ++out.n_failed;
        out.preds_by_traj.push_back(std::move(preds));
    }
    return out;
}

MethodPredictions predict_fit(const std::vector<FitRow>& fits,
                              const std::vector<TrajectoryRecord>& split, ModelKind kind,
                              const std::vector<double>& fallback) {
    MethodPredictions out;
    out.preds_by_traj.resize(split.size());
    for (std::size_t i = 0; i < split.size(); ++i) {
        const auto& traj = split[i];
        auto use_fallback = [&] {
            std::vector<double> preds;
            for (const auto& r : traj.targets.records)
                preds.push_back(fallback[static_cast<std::size_t>(r.channel)]);
            ++out.n_failed;
            out.preds_by_traj[i] = std::move(preds);
        };
        if (i >= fits.size()) {
            use_fallback();
            continue;
        }
        MechanisticParams p;
        p.kind = kind;
        p.values = fits[i].params;
        try {
            auto dense = integrate(kind, p, traj.targets.t_max);
            std::vector<double> preds;
            bool ok = true;
            for (const auto& r : traj.targets.records) {
                const double v = dense.eval(r.time)[static_cast<std::size_t>(r.channel)];
                if (!std::isfinite(v)) ok = false;
                preds.push_back(v);
            }
            if (!ok) {
                use_fallback();
            } else {
                out.preds_by_traj[i] = std::move(preds);
            }
        } catch (const IntegrationError&) {
            use_fallback();
        }
    }
    return out;
}

} // namespace

void run_evaluate(const RunConfig& cfg) {
    StepLog log("evaluate", cfg);
    echo_config(cfg);
    auto dataset = require_dataset(cfg);
    std::vector<double> sigma;
    for (const auto& c : dataset.channels) sigma.push_back(c.noise_std);
    const std::size_t C = dataset.channels.size();
    auto fallback = pooled_target_means(dataset.test, C);

    json scores = json::array();
    for (const auto& method : cfg.methods) {
        MethodPredictions mp;
        const std::vector<TrajectoryRecord>* split = &dataset.test;
        std::vector<TrajectoryRecord> subset;
        if (method == "ground_truth") {
            mp.preds_by_traj = ground_truth_forecast(dataset.test, dataset.model_kind);
        } else if (method == "fit") {
            auto fits = read_fit_csv(fits_path(cfg), dataset.model_kind);
            if (fits.size() < dataset.test.size()) {
                subset.assign(dataset.test.begin(),
                              dataset.test.begin() + static_cast<std::ptrdiff_t>(fits.size()));
                split = &subset;
            }
            mp = predict_fit(fits, *split, dataset.model_kind, fallback);
        } else {
            auto ckpt = checkpoint_path(cfg, method);
            if (!std::filesystem::exists(ckpt))
                throw MissingArtifactError("checkpoint not found at " + ckpt.string() +
                                           " (run `train` for method '" + method + "' first)");
            mp = predict_deepset(load_checkpoint(ckpt), dataset.test);
        }
        auto rec = score_method(method_display_name(method), to_string(dataset.model_kind),
                                mp.preds_by_traj, *split, sigma, C, mp.n_failed,
                                cfg.bootstrap_resamples, cfg.seed);
        std::cout << "[evaluate] " << rec.method << ": R^2 = " << rec.r2 << " +- "
                  << rec.stderr_r2 << " (" << rec.n_targets << " targets, " << rec.n_failed
                  << " failed)\n";
        scores.push_back({{"method", method},
                          {"display", rec.method},
                          {"dataset", rec.dataset_id},
                          {"r2", rec.r2},
                          {"stderr", rec.stderr_r2},
                          {"n_targets", rec.n_targets},
                          {"n_failed", rec.n_failed},
                          {"per_channel_r2", rec.per_channel_r2}});
    }
    std::ofstream out(scores_path(cfg));
    out << scores.dump(2) << "\n";
}

void run_report(const RunConfig& cfg) {
    StepLog log("report", cfg);
    echo_config(cfg);
    if (!std::filesystem::exists(scores_path(cfg)))
        throw MissingArtifactError("scores not found at " + scores_path(cfg).string() +
                                   " (run `evaluate` first)");
    std::ifstream in(scores_path(cfg));
    json scores_json = json::parse(in);
    std::vector<ScoreRecord> scores;
    for (const auto& s : scores_json) {
        ScoreRecord r;
        r.method = s.at("display").get<std::string>();
        r.dataset_id = s.at("dataset").get<std::string>();
        r.r2 = s.at("r2").get<double>();
        r.stderr_r2 = s.at("stderr").get<double>();
        r.n_targets = s.at("n_targets").get<std::size_t>();
        r.n_failed = s.at("n_failed").get<std::size_t>();
        r.per_channel_r2 = s.at("per_channel_r2").get<std::vector<double>>();
        scores.push_back(std::move(r));
    }

    auto dataset = require_dataset(cfg);
    std::vector<ExamplePlot> examples;
    const auto& names = channel_names(dataset.model_kind);
    const int n_examples =
        std::min<int>(cfg.n_plot_examples, static_cast<int>(dataset.test.size()));
    for (const auto& method : cfg.methods) {
        DeepSetModel model;
        bool have_model = false;
        std::vector<FitRow> fits;
        if (method == "linear" || method == "rbf" || method == "triplet") {
            auto ckpt = checkpoint_path(cfg, method);
            if (!std::filesystem::exists(ckpt)) continue;
            model = load_checkpoint(ckpt);
            have_model = true;
        } else if (method == "fit") {
            if (!std::filesystem::exists(fits_path(cfg))) continue;
            fits = read_fit_csv(fits_path(cfg), dataset.model_kind);
        }
        for (int i = 0; i < n_examples; ++i) {
            const auto& traj = dataset.test[static_cast<std::size_t>(i)];
            ExamplePlot ex;
            ex.dataset_id = to_string(dataset.model_kind);
            ex.method = method;
            ex.index = i;
            ex.truth = traj.truth;
            ex.context = traj.context;
            ex.targets = traj.targets;
            ex.channel_names = names;
            ex.pred_times = traj.truth.times;
            ex.pred_values.assign(names.size(), {});
            if (method == "ground_truth") {
                ex.pred_values = traj.truth.values;
            } else if (have_model) {
                auto latent = aggregate_context(model, traj.context);
                for (auto& v : ex.pred_values) v.reserve(ex.pred_times.size());
                for (double t : ex.pred_times) {
                    auto p = predict_at(model, latent, t);
                    for (std::size_t c = 0; c < names.size(); ++c)
                        ex.pred_values[c].push_back(p[c]);
                }
            } else if (method == "fit" && static_cast<std::size_t>(i) < fits.size()) {
                MechanisticParams p;
                p.kind = dataset.model_kind;
                p.values = fits[static_cast<std::size_t>(i)].params;
                try {
                    auto dense = integrate(dataset.model_kind, p, dataset.t_max);
                    for (double t : ex.pred_times) {
                        auto y = dense.eval(t);
                        for (std::size_t c = 0; c < names.size(); ++c)
                            ex.pred_values[c].push_back(y[c]);
                    }
                } catch (const IntegrationError&) {
                    ex.pred_times.clear();
                    ex.pred_values.assign(names.size(), {});
                }
            } else {
                ex.pred_times.clear();
            }
            examples.push_back(std::move(ex));
        }
    }
    render_report(scores, examples, cfg.out);
}

void run_all(const RunConfig& cfg) {
    run_generate(cfg);
    for (const auto& m : cfg.methods)
        if (m == "triplet" || m == "linear" || m == "rbf") run_train(cfg, m);
    if (std::find(cfg.methods.begin(), cfg.methods.end(), "fit") != cfg.methods.end())
        run_fit(cfg);
    run_evaluate(cfg);
    run_report(cfg);
}

} // namespace sparseset
