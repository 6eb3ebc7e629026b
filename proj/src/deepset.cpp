#include "sparseset/deepset.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

using nlohmann::json;

namespace sparseset {

void TrainConfig::validate() const {
    if (!(lr > 0.0) || batch_size == 0 || steps == 0 || latent_dim == 0 || val_every == 0)
        throw std::invalid_argument("train config values must be positive");
}

std::vector<double> encode_triplet(const TripletRecord& r, std::size_t C,
                                   const NormalizationStats& stats) {
    auto n = normalize_record(r, stats);
    std::vector<double> out(C + 2, 0.0);
    out[0] = n.time;
    out[1 + static_cast<std::size_t>(n.channel)] = 1.0;
    out[C + 1] = n.value;
    return out;
}

namespace {

SparseSeries normalized_context(const SparseSeries& context, const NormalizationStats& stats) {
    std::vector<TripletRecord> recs;
    recs.reserve(context.records.size());
    for (const auto& r : context.records) recs.push_back(normalize_record(r, stats));
    return SparseSeries(std::move(recs), context.t_split / stats.t_max,
                        context.t_max / stats.t_max);
}

} // namespace

Tensor encode_context(const DeepSetModel& model, const SparseSeries& context) {
    const std::size_t C = model.channels;
    if (model.encoding == EncodingKind::TRIPLET) {
        Tensor rows(context.records.size(), C + 2);
        for (std::size_t i = 0; i < context.records.size(); ++i) {
            auto e = encode_triplet(context.records[i], C, model.stats);
            std::copy(e.begin(), e.end(), rows.data.begin() + static_cast<std::ptrdiff_t>(i * (C + 2)));
        }
        return rows;
    }
    // GRID: impute the normalized context on a regular grid over [0, t_split]
    auto norm_ctx = normalized_context(context, model.stats);
    auto grid = make_regular_grid(model.grid_points, norm_ctx.t_split);
    auto imputed = impute(model.impute_method, norm_ctx, grid, static_cast<int>(C));
    Tensor rows(grid.size(), C + 1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        rows.data[k * (C + 1)] = grid[k];
        for (std::size_t c = 0; c < C; ++c) rows.data[k * (C + 1) + 1 + c] = imputed.values[k][c];
    }
    return rows;
}

std::vector<double> aggregate_context(const DeepSetModel& model, const SparseSeries& context) {
    Tensor rows = encode_context(model, context);
    std::vector<double> latent(model.latent_dim, 0.0);
    if (rows.rows() == 0) return latent;
    Tensor f = mlp_forward(model.extractor, rows);
    for (std::size_t i = 0; i < f.rows(); ++i)
        for (std::size_t j = 0; j < model.latent_dim; ++j) latent[j] += f.at(i, j);
    return latent;
}

std::vector<double> predict_at(const DeepSetModel& model, const std::vector<double>& latent,
                               double tau) {
    const double t_max = model.stats.t_max;
    if (tau < 0.0 || tau > 1.5 * t_max)
        throw std::out_of_range("query time " + std::to_string(tau) +
                                " outside [0, 1.5 t_max]");
    Tensor q(1, model.latent_dim + 1);
    q.data[0] = tau / t_max;
    std::copy(latent.begin(), latent.end(), q.data.begin() + 1);
    Tensor p = mlp_forward(model.aggregator, q);
    std::vector<double> out(model.channels);
    for (std::size_t c = 0; c < model.channels; ++c)
        out[c] = p.data[c] * model.stats.std[c] + model.stats.mean[c];
    return out;
}

std::vector<double> predict_at(const DeepSetModel& model, const SparseSeries& context,
                               double tau) {
    return predict_at(model, aggregate_context(model, context), tau);
}

namespace {

struct EncodedSplit {
    std::vector<Tensor> context_rows;                 // per trajectory
    std::vector<std::vector<double>> target_tau;      // normalized query times
    std::vector<std::vector<std::size_t>> target_col; // channel per target
    std::vector<std::vector<double>> target_val;      // normalized values
};

EncodedSplit encode_split(const DeepSetModel& model, const std::vector<TrajectoryRecord>& split) {
    EncodedSplit out;
    out.context_rows.reserve(split.size());
    for (const auto& traj : split) {
        out.context_rows.push_back(encode_context(model, traj.context));
        std::vector<double> taus, vals;
        std::vector<std::size_t> cols;
        for (const auto& r : traj.targets.records) {
            auto n = normalize_record(r, model.stats);
            taus.push_back(n.time);
            cols.push_back(static_cast<std::size_t>(n.channel));
            vals.push_back(n.value);
        }
        out.target_tau.push_back(std::move(taus));
        out.target_col.push_back(std::move(cols));
        out.target_val.push_back(std::move(vals));
    }
    return out;
}

double split_loss(const DeepSetModel& model, const EncodedSplit& enc, std::size_t max_traj) {
    std::size_t n = enc.context_rows.size();
    if (max_traj > 0) n = std::min(n, max_traj);
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rows = enc.context_rows[i];
        std::vector<double> latent(model.latent_dim, 0.0);
        if (rows.rows() > 0) {
            Tensor f = mlp_forward(model.extractor, rows);
            for (std::size_t r = 0; r < f.rows(); ++r)
                for (std::size_t j = 0; j < model.latent_dim; ++j) latent[j] += f.at(r, j);
        }
        const auto& taus = enc.target_tau[i];
        if (taus.empty()) continue;
        Tensor q(taus.size(), model.latent_dim + 1);
        for (std::size_t k = 0; k < taus.size(); ++k) {
            q.data[k * (model.latent_dim + 1)] = taus[k];
            std::copy(latent.begin(), latent.end(),
                      q.data.begin() + static_cast<std::ptrdiff_t>(k * (model.latent_dim + 1) + 1));
        }
        Tensor p = mlp_forward(model.aggregator, q);
        for (std::size_t k = 0; k < taus.size(); ++k) {
            const double d = p.at(k, enc.target_col[i][k]) - enc.target_val[i][k];
            acc += d * d;
            ++count;
        }
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

} // namespace

double forecaster_loss(const DeepSetModel& model, const std::vector<TrajectoryRecord>& split,
                       std::size_t max_trajectories) {
    return split_loss(model, encode_split(model, split), max_trajectories);
}

double forecaster_loss_with_grads(const DeepSetModel& model,
                                  const std::vector<TrajectoryRecord>& batch,
                                  std::vector<Tensor>& grads) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    auto enc = encode_split(model, batch);
    const std::size_t in_cols = model.extractor_cfg.input_dim;
    std::size_t total_rows = 0, total_targets = 0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        total_rows += enc.context_rows[b].rows();
        total_targets += enc.target_tau[b].size();
    }
    if (total_targets == 0) throw std::invalid_argument("batch has no targets");
    Tensor enc_rows(total_rows, in_cols);
    std::vector<std::size_t> group(total_rows);
    Tensor tau_col(total_targets, 1);
    std::vector<std::size_t> tgt_group(total_targets), tgt_col(total_targets);
    std::vector<double> tgt_val(total_targets);
    std::size_t ri = 0, ti = 0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto& rows = enc.context_rows[b];
        std::copy(rows.data.begin(), rows.data.end(),
                  enc_rows.data.begin() + static_cast<std::ptrdiff_t>(ri * in_cols));
        std::fill(group.begin() + static_cast<std::ptrdiff_t>(ri),
                  group.begin() + static_cast<std::ptrdiff_t>(ri + rows.rows()), b);
        ri += rows.rows();
        for (std::size_t k = 0; k < enc.target_tau[b].size(); ++k) {
            tau_col.data[ti] = enc.target_tau[b][k];
            tgt_group[ti] = b;
            tgt_col[ti] = enc.target_col[b][k];
            tgt_val[ti] = enc.target_val[b][k];
            ++ti;
        }
    }

    Graph g;
    std::vector<Graph::NodeId> we, be, wa, ba;
    for (const auto& w : model.extractor.weights) we.push_back(g.leaf(w));
    for (const auto& b : model.extractor.biases) be.push_back(g.leaf(b));
    for (const auto& w : model.aggregator.weights) wa.push_back(g.leaf(w));
    for (const auto& b : model.aggregator.biases) ba.push_back(g.leaf(b));
    auto f = mlp_forward(g, we, be, g.leaf(enc_rows, false));
    auto latent = g.segment_sum(f, group, batch.size());
    auto latent_q = g.gather_rows(latent, tgt_group);
    auto queries = g.concat_cols(g.leaf(tau_col, false), latent_q);
    auto preds = mlp_forward(g, wa, ba, queries);
    auto loss = g.mse_selected(preds, tgt_col, tgt_val);
    const double value = g.value(loss).data[0];
    g.backward(loss);
    grads.clear();
    for (auto id : we) grads.push_back(g.grad(id));
    for (auto id : be) grads.push_back(g.grad(id));
    for (auto id : wa) grads.push_back(g.grad(id));
    for (auto id : ba) grads.push_back(g.grad(id));
    return value;
}

TrainResult train_forecaster(const Dataset& dataset, const TrainConfig& cfg,
                             EncodingKind encoding, ImputeMethod impute_method) {
    cfg.validate();
    if (dataset.train.empty()) throw std::invalid_argument("dataset has no training split");

    const std::size_t C = dataset.channels.size();
    DeepSetModel model;
    model.encoding = encoding;
    model.impute_method = impute_method;
    model.grid_points = dataset.obs_per_part;
    model.t_split = dataset.t_split;
    model.latent_dim = cfg.latent_dim;
    model.channels = C;
    model.channel_specs = dataset.channels;
    model.stats = dataset.stats;
    const std::size_t in_dim = encoding == EncodingKind::TRIPLET ? C + 2 : C + 1;
    model.extractor_cfg = {in_dim, cfg.extractor_hidden, cfg.latent_dim,
                           child_seed(cfg.seed, 0xe, 0)};
    model.aggregator_cfg = {cfg.latent_dim + 1, cfg.aggregator_hidden, C,
                            child_seed(cfg.seed, 0xa, 0)};
    model.extractor = init_mlp(model.extractor_cfg);
    model.aggregator = init_mlp(model.aggregator_cfg);

    auto train_enc = encode_split(model, dataset.train);
    auto val_enc = encode_split(model, dataset.val);

    auto params = model.extractor.all();
    {
        auto agg = model.aggregator.all();
        params.insert(params.end(), agg.begin(), agg.end());
    }
    auto adam = AdamState::init(params, AdamHyper{cfg.lr, 0.9, 0.999, 1e-8});
    Rng batch_rng(child_seed(cfg.seed, 0xb, 0));

    TrainResult result;
    result.best_val_loss = split_loss(model, val_enc, cfg.val_max_trajectories);
    result.best_val_step = 0;
    result.history.push_back({0, 0.0, result.best_val_loss});
    MlpParams best_extractor = model.extractor;
    MlpParams best_aggregator = model.aggregator;

    const std::size_t n_train = dataset.train.size();
    const std::size_t in_cols = in_dim;
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        // assemble batch
        std::vector<std::size_t> batch(cfg.batch_size);
        for (auto& b : batch) b = batch_rng.uniform_int(n_train);
        std::size_t total_rows = 0, total_targets = 0;
        for (auto b : batch) {
            total_rows += train_enc.context_rows[b].rows();
            total_targets += train_enc.target_tau[b].size();
        }
        Tensor enc_rows(total_rows, in_cols);
        std::vector<std::size_t> group(total_rows);
        Tensor tau_col(total_targets, 1);
        std::vector<std::size_t> tgt_group(total_targets), tgt_col(total_targets);
        std::vector<double> tgt_val(total_targets);
        std::size_t ri = 0, ti = 0;
        for (std::size_t slot = 0; slot < batch.size(); ++slot) {
            const auto b = batch[slot];
            const auto& rows = train_enc.context_rows[b];
            std::copy(rows.data.begin(), rows.data.end(),
                      enc_rows.data.begin() + static_cast<std::ptrdiff_t>(ri * in_cols));
            std::fill(group.begin() + static_cast<std::ptrdiff_t>(ri),
                      group.begin() + static_cast<std::ptrdiff_t>(ri + rows.rows()), slot);
            ri += rows.rows();
            for (std::size_t k = 0; k < train_enc.target_tau[b].size(); ++k) {
                tau_col.data[ti] = train_enc.target_tau[b][k];
                tgt_group[ti] = slot;
                tgt_col[ti] = train_enc.target_col[b][k];
                tgt_val[ti] = train_enc.target_val[b][k];
                ++ti;
            }
        }

        Graph g;
        std::vector<Graph::NodeId> we, be, wa, ba;
        for (auto& w : model.extractor.weights) we.push_back(g.leaf(w));
        for (auto& b : model.extractor.biases) be.push_back(g.leaf(b));
        for (auto& w : model.aggregator.weights) wa.push_back(g.leaf(w));
        for (auto& b : model.aggregator.biases) ba.push_back(g.leaf(b));
        auto f = mlp_forward(g, we, be, g.leaf(enc_rows, false));
        auto latent = g.segment_sum(f, group, batch.size());
        auto latent_q = g.gather_rows(latent, tgt_group);
        auto queries = g.concat_cols(g.leaf(tau_col, false), latent_q);
        auto preds = mlp_forward(g, wa, ba, queries);
        auto loss = g.mse_selected(preds, tgt_col, tgt_val);
        const double train_loss = g.value(loss).data[0];
        if (!std::isfinite(train_loss))
            throw std::runtime_error("non-finite training loss at step " + std::to_string(step) +
                                     " (seed " + std::to_string(cfg.seed) + ")");
        g.backward(loss);
        std::vector<const Tensor*> grads;
        for (auto id : we) grads.push_back(&g.grad(id));
        for (auto id : be) grads.push_back(&g.grad(id));
        for (auto id : wa) grads.push_back(&g.grad(id));
        for (auto id : ba) grads.push_back(&g.grad(id));
        adam_step(params, grads, adam);

        if (step % cfg.val_every == 0 || step == cfg.steps) {
            const double val_loss = split_loss(model, val_enc, cfg.val_max_trajectories);
            result.history.push_back({step, train_loss, val_loss});
            if (val_loss < result.best_val_loss) {
                result.best_val_loss = val_loss;
                result.best_val_step = step;
                best_extractor = model.extractor;
                best_aggregator = model.aggregator;
            }
        }
    }

    model.extractor = std::move(best_extractor);
    model.aggregator = std::move(best_aggregator);
    result.model = std::move(model);
    return result;
}

namespace {

json tensor_to_json(const Tensor& t) { return json{{"shape", t.shape}, {"data", t.data}}; }

Tensor tensor_from_json(const json& j) {
    Tensor t(j.at("shape").get<std::vector<std::size_t>>());
    t.data = j.at("data").get<std::vector<double>>();
    std::size_t n = 1;
    for (auto e : t.shape) n *= e;
    if (t.data.size() != n) throw std::runtime_error("tensor data does not match shape");
    return t;
}

json mlp_to_json(const MlpParams& p) {
    json tensors = json::object();
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        tensors["w" + std::to_string(l)] = tensor_to_json(p.weights[l]);
        tensors["b" + std::to_string(l)] = tensor_to_json(p.biases[l]);
    }
    return tensors;
}

MlpParams mlp_from_json(const json& j) {
    MlpParams p;
    for (std::size_t l = 0; j.contains("w" + std::to_string(l)); ++l) {
        p.weights.push_back(tensor_from_json(j.at("w" + std::to_string(l))));
        p.biases.push_back(tensor_from_json(j.at("b" + std::to_string(l))));
    }
    return p;
}

json mlp_cfg_to_json(const MlpConfig& c) {
    return json{{"input_dim", c.input_dim},
                {"hidden_dims", c.hidden_dims},
                {"output_dim", c.output_dim},
                {"init_seed", c.init_seed}};
}

MlpConfig mlp_cfg_from_json(const json& j) {
    return {j.at("input_dim").get<std::size_t>(),
            j.at("hidden_dims").get<std::vector<std::size_t>>(),
            j.at("output_dim").get<std::size_t>(), j.at("init_seed").get<std::uint64_t>()};
}

} // namespace

void save_checkpoint(const DeepSetModel& model, const std::filesystem::path& path) {
    json channels = json::array();
    for (const auto& c : model.channel_specs)
        channels.push_back(
            {{"id", c.id}, {"name", c.name}, {"unit", c.unit}, {"noise_std", c.noise_std}});
    json j{{"format_version", kCheckpointFormatVersion},
           {"config",
            {{"encoding", to_string(model.encoding)},
             {"impute_method", to_string(model.impute_method)},
             {"grid_points", model.grid_points},
             {"t_split", model.t_split},
             {"latent_dim", model.latent_dim},
             {"channels", model.channels},
             {"channel_specs", channels},
             {"stats",
              {{"mean", model.stats.mean}, {"std", model.stats.std}, {"t_max", model.stats.t_max}}},
             {"extractor", mlp_cfg_to_json(model.extractor_cfg)},
             {"aggregator", mlp_cfg_to_json(model.aggregator_cfg)}}},
           {"tensors",
            {{"extractor", mlp_to_json(model.extractor)},
             {"aggregator", mlp_to_json(model.aggregator)}}}};
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump() << "\n";
}

DeepSetModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
    json j = json::parse(in);
    if (j.at("format_version").get<int>() != kCheckpointFormatVersion)
        throw std::runtime_error("checkpoint format_version mismatch: file has " +
                                 std::to_string(j.at("format_version").get<int>()) +
                                 ", supported is " + std::to_string(kCheckpointFormatVersion));
    const auto& cfg = j.at("config");
    DeepSetModel m;
    m.encoding = cfg.at("encoding").get<std::string>() == "triplet" ? EncodingKind::TRIPLET
                                                                    : EncodingKind::GRID;
    m.impute_method = cfg.at("impute_method").get<std::string>() == "linear"
                          ? ImputeMethod::LINEAR
                          : ImputeMethod::RBF;
    m.grid_points = cfg.at("grid_points").get<int>();
    m.t_split = cfg.at("t_split").get<double>();
    m.latent_dim = cfg.at("latent_dim").get<std::size_t>();
    m.channels = cfg.at("channels").get<std::size_t>();
    for (const auto& c : cfg.at("channel_specs"))
        m.channel_specs.push_back({c.at("id").get<int>(), c.at("name").get<std::string>(),
                                   c.at("unit").get<std::string>(),
                                   c.at("noise_std").get<double>()});
    m.stats.mean = cfg.at("stats").at("mean").get<std::vector<double>>();
    m.stats.std = cfg.at("stats").at("std").get<std::vector<double>>();
    m.stats.t_max = cfg.at("stats").at("t_max").get<double>();
    m.extractor_cfg = mlp_cfg_from_json(cfg.at("extractor"));
    m.aggregator_cfg = mlp_cfg_from_json(cfg.at("aggregator"));
    m.extractor = mlp_from_json(j.at("tensors").at("extractor"));
    m.aggregator = mlp_from_json(j.at("tensors").at("aggregator"));
    return m;
}

} // namespace sparseset
