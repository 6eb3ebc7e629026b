#include "sparseset/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sparseset {

namespace {

std::vector<double> pooled_channel_means(const std::vector<TripletRecord>& targets,
                                         std::size_t n_channels) {
    std::vector<double> sum(n_channels, 0.0);
    std::vector<std::size_t> count(n_channels, 0);
    for (const auto& t : targets) {
        sum[static_cast<std::size_t>(t.channel)] += t.value;
        ++count[static_cast<std::size_t>(t.channel)];
    }
    std::vector<double> mean(n_channels, 0.0);
    for (std::size_t c = 0; c < n_channels; ++c)
        if (count[c]) mean[c] = sum[c] / static_cast<double>(count[c]);
    return mean;
}

double r2_from_pairs(const std::vector<double>& preds, const std::vector<TripletRecord>& targets,
                     const std::vector<double>& sigma, std::size_t n_channels) {
    auto mean = pooled_channel_means(targets, n_channels);
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto c = static_cast<std::size_t>(targets[i].channel);
        const double e = (preds[i] - targets[i].value) / sigma[c];
        const double d = (targets[i].value - mean[c]) / sigma[c];
        sse += e * e;
        sst += d * d;
    }
    if (sst == 0.0) throw std::runtime_error("constant targets: R^2 undefined");
    return 1.0 - sse / sst;
}

} // namespace

double noise_normalized_r2(const std::vector<double>& predictions,
                           const std::vector<TripletRecord>& targets,
                           const std::vector<double>& sigma) {
    if (predictions.size() != targets.size())
        throw std::invalid_argument("predictions not aligned with targets");
    return r2_from_pairs(predictions, targets, sigma, sigma.size());
}

std::vector<double> per_channel_r2(const std::vector<double>& predictions,
                                   const std::vector<TripletRecord>& targets,
                                   const std::vector<double>& sigma, std::size_t n_channels) {
    auto mean = pooled_channel_means(targets, n_channels);
    std::vector<double> sse(n_channels, 0.0), sst(n_channels, 0.0);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto c = static_cast<std::size_t>(targets[i].channel);
        const double e = (predictions[i] - targets[i].value) / sigma[c];
        const double d = (targets[i].value - mean[c]) / sigma[c];
        sse[c] += e * e;
        sst[c] += d * d;
    }
    std::vector<double> out(n_channels, 0.0);
    for (std::size_t c = 0; c < n_channels; ++c)
        out[c] = sst[c] > 0.0 ? 1.0 - sse[c] / sst[c] : 0.0;
    return out;
}

std::vector<std::vector<double>> ground_truth_forecast(const std::vector<TrajectoryRecord>& split,
                                                       ModelKind kind) {
    std::vector<std::vector<double>> out;
    out.reserve(split.size());
    for (const auto& traj : split) {
        auto dense = integrate(kind, traj.params, traj.targets.t_max);
        std::vector<double> preds;
        preds.reserve(traj.targets.size());
        for (const auto& r : traj.targets.records)
            preds.push_back(dense.eval(r.time)[static_cast<std::size_t>(r.channel)]);
        out.push_back(std::move(preds));
    }
    return out;
}

double bootstrap_stderr(const std::vector<std::vector<double>>& preds_by_traj,
                        const std::vector<TrajectoryRecord>& split,
                        const std::vector<double>& sigma, int resamples, Rng& rng) {
    const std::size_t n = split.size();
    if (n < 2) throw std::invalid_argument("bootstrap needs at least 2 trajectories");
    std::vector<double> r2s;
    r2s.reserve(static_cast<std::size_t>(resamples));
    std::vector<double> preds;
    std::vector<TripletRecord> targets;
    for (int b = 0; b < resamples; ++b) {
        preds.clear();
        targets.clear();
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = rng.uniform_int(n);
            preds.insert(preds.end(), preds_by_traj[i].begin(), preds_by_traj[i].end());
            for (const auto& r : split[i].targets.records) targets.push_back(r);
        }
        r2s.push_back(r2_from_pairs(preds, targets, sigma, sigma.size()));
    }
    double mean = 0.0;
    for (double v : r2s) mean += v;
    mean /= static_cast<double>(r2s.size());
    double var = 0.0;
    for (double v : r2s) var += (v - mean) * (v - mean);
    var /= static_cast<double>(r2s.size());
    return std::sqrt(var);
}

ScoreRecord score_method(const std::string& method, const std::string& dataset_id,
                         const std::vector<std::vector<double>>& preds_by_traj,
                         const std::vector<TrajectoryRecord>& split,
                         const std::vector<double>& sigma, std::size_t n_channels,
                         std::size_t n_failed, int bootstrap_resamples, std::uint64_t seed) {
    std::vector<double> preds;
    std::vector<TripletRecord> targets;
    for (std::size_t i = 0; i < split.size(); ++i) {
        preds.insert(preds.end(), preds_by_traj[i].begin(), preds_by_traj[i].end());
        for (const auto& r : split[i].targets.records) targets.push_back(r);
    }
    ScoreRecord rec;
    rec.method = method;
    rec.dataset_id = dataset_id;
    rec.r2 = noise_normalized_r2(preds, targets, sigma);
    rec.per_channel_r2 = per_channel_r2(preds, targets, sigma, n_channels);
    rec.n_targets = targets.size();
    rec.n_failed = n_failed;
    Rng rng(child_seed(seed, 0xb007, 0));
    rec.stderr_r2 = bootstrap_stderr(preds_by_traj, split, sigma, bootstrap_resamples, rng);
    return rec;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt4(double v) {
    std::ostringstream os;
    os.precision(4);
    os << std::fixed << v;
    return os.str();
}

} // namespace

void render_report(const std::vector<ScoreRecord>& scores, const std::vector<ExamplePlot>& examples,
                   const std::filesystem::path& out_dir) {
    if (scores.empty()) throw std::invalid_argument("no scores to report");
    std::filesystem::create_directories(out_dir);

    {
        std::ofstream csv(out_dir / "results.csv");
        if (!csv) throw std::runtime_error("cannot write " + (out_dir / "results.csv").string());
        csv << "method,dataset,r2,stderr,n_targets,n_failed\n";
        for (const auto& s : scores)
            csv << '"' << s.method << "\"," << s.dataset_id << ',' << fmt(s.r2) << ','
                << fmt(s.stderr_r2) << ',' << s.n_targets << ',' << s.n_failed << "\n";
    }

    {
        // method x dataset table in the row order the scores arrive in
        std::vector<std::string> methods, datasets;
        std::map<std::pair<std::string, std::string>, const ScoreRecord*> cell;
        for (const auto& s : scores) {
            if (std::find(methods.begin(), methods.end(), s.method) == methods.end())
                methods.push_back(s.method);
            if (std::find(datasets.begin(), datasets.end(), s.dataset_id) == datasets.end())
                datasets.push_back(s.dataset_id);
            cell[{s.method, s.dataset_id}] = &s;
        }
        std::ofstream md(out_dir / "results.md");
        if (!md) throw std::runtime_error("cannot write " + (out_dir / "results.md").string());
        md << "# Forecasting results\n\n";
        md << "Squared errors are normalized by the noise variance of the corresponding "
              "channel.\n\n";
        md << "| Method |";
        for (const auto& d : datasets) md << ' ' << (d == "mmk" ? "MMK" : "E. coli") << ", R² |";
        md << "\n|---|";
        for (std::size_t i = 0; i < datasets.size(); ++i) md << "---|";
        md << "\n";
        for (const auto& m : methods) {
            md << "| " << m << " |";
            for (const auto& d : datasets) {
                auto it = cell.find({m, d});
                if (it == cell.end())
                    md << " - |";
                else
                    md << ' ' << fmt4(it->second->r2) << " ± " << fmt4(it->second->stderr_r2)
                       << " |";
            }
            md << "\n";
        }
    }

    for (const auto& ex : examples) {
        auto dir = out_dir / "plots" / ex.dataset_id / ex.method;
        std::filesystem::create_directories(dir);
        std::ofstream svg(dir / (std::to_string(ex.index) + ".svg"));
        if (!svg) throw std::runtime_error("cannot write plot for " + ex.method);
        svg << render_svg(ex);
    }
}

std::vector<ScoreRecord> parse_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line); // header
    std::vector<ScoreRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ScoreRecord s;
        std::size_t pos = 0;
        if (line[0] == '"') {
            std::size_t end = line.find('"', 1);
            s.method = line.substr(1, end - 1);
            pos = end + 2;
        } else {
            std::size_t end = line.find(',');
            s.method = line.substr(0, end);
            pos = end + 1;
        }
        std::stringstream ss(line.substr(pos));
        std::string tok;
        std::getline(ss, s.dataset_id, ',');
        std::getline(ss, tok, ',');
        s.r2 = std::stod(tok);
        std::getline(ss, tok, ',');
        s.stderr_r2 = std::stod(tok);
        std::getline(ss, tok, ',');
        s.n_targets = std::stoul(tok);
        std::getline(ss, tok, ',');
        s.n_failed = std::stoul(tok);
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

struct Mapper {
    double lo, hi, px0, px1;
    double operator()(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

} // namespace

std::string render_svg(const ExamplePlot& plot) {
    const std::size_t C = plot.truth.values.size();
    const int panel_h = 160, panel_w = 560, margin = 40;
    const int width = panel_w + 2 * margin;
    const int height = static_cast<int>(C) * (panel_h + margin) + margin;
    const double t_max = plot.truth.times.empty() ? 1.0 : plot.truth.times.back();

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n";
    for (std::size_t c = 0; c < C; ++c) {
        double lo = 1e300, hi = -1e300;
        auto widen = [&](double v) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        };
        for (double v : plot.truth.values[c]) widen(v);
        for (const auto& r : plot.context.records)
            if (static_cast<std::size_t>(r.channel) == c) widen(r.value);
        for (const auto& r : plot.targets.records)
            if (static_cast<std::size_t>(r.channel) == c) widen(r.value);
        if (c < plot.pred_values.size())
            for (double v : plot.pred_values[c]) widen(v);
        if (lo >= hi) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double pad = 0.05 * (hi - lo);
        Mapper mx{0.0, t_max, static_cast<double>(margin), static_cast<double>(margin + panel_w)};
        const double top = margin + static_cast<double>(c) * (panel_h + margin);
        Mapper my{lo - pad, hi + pad, top + panel_h, top};

        s << "<rect x=\"" << margin << "\" y=\"" << top << "\" width=\"" << panel_w
          << "\" height=\"" << panel_h << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
        std::string label = c < plot.channel_names.size() ? plot.channel_names[c]
                                                          : "ch" + std::to_string(c);
        s << "<text x=\"" << margin + 4 << "\" y=\"" << top + 14 << "\" font-size=\"12\">" << label
          << "</text>\n";

        auto polyline = [&](const std::vector<double>& ts, const std::vector<double>& vs,
                            const char* color, const char* dash) {
            s << "<polyline fill=\"none\" stroke=\"" << color << "\"" << dash << " points=\"";
            for (std::size_t k = 0; k < ts.size(); ++k)
                s << mx(ts[k]) << ',' << my(vs[k]) << ' ';
            s << "\"/>\n";
        };
        polyline(plot.truth.times, plot.truth.values[c], "#444", "");
        if (c < plot.pred_values.size() && !plot.pred_times.empty())
            polyline(plot.pred_times, plot.pred_values[c], "#d62728",
                     " stroke-dasharray=\"5,3\"");
        for (const auto& r : plot.context.records)
            if (static_cast<std::size_t>(r.channel) == c)
                s << "<circle cx=\"" << mx(r.time) << "\" cy=\"" << my(r.value)
                  << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
        for (const auto& r : plot.targets.records)
            if (static_cast<std::size_t>(r.channel) == c)
                s << "<circle cx=\"" << mx(r.time) << "\" cy=\"" << my(r.value)
                  << "\" r=\"3\" fill=\"none\" stroke=\"#2ca02c\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace sparseset
