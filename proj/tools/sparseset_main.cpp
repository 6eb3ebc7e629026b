#include "sparseset/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using nlohmann::json;
using namespace sparseset;

namespace {

struct FlagValues {
    std::string config_path;
    std::string model, preset, out;
    std::vector<std::string> methods;
    // numeric flags are kept as strings so that "unset" is distinguishable
    std::string seed, threads, multistart, bootstrap_resamples, fit_max_trajectories,
        n_plot_examples, n_train, n_val, n_test, obs_per_part, t_max, t_split, lr, batch_size,
        steps, latent_dim, val_every, val_max_trajectories;
    std::vector<double> noise_std;
    std::vector<std::size_t> extractor_hidden, aggregator_hidden;
};

void add_common_flags(CLI::App* cmd, FlagValues& v) {
    cmd->add_option("--config", v.config_path, "JSON config file; flags override file values");
    cmd->add_option("--model", v.model, "mmk|ecoli");
    cmd->add_option("--preset", v.preset, "micro|smoke|benchmark");
    cmd->add_option("--seed", v.seed);
    cmd->add_option("--threads", v.threads);
    cmd->add_option("--out", v.out, "output directory");
    cmd->add_option("--method", v.methods, "methods to run (repeatable)");
    cmd->add_option("--multistart", v.multistart);
    cmd->add_option("--bootstrap-resamples", v.bootstrap_resamples);
    cmd->add_option("--fit-max-trajectories", v.fit_max_trajectories);
    cmd->add_option("--n-plot-examples", v.n_plot_examples);
    cmd->add_option("--n-train", v.n_train);
    cmd->add_option("--n-val", v.n_val);
    cmd->add_option("--n-test", v.n_test);
    cmd->add_option("--obs-per-part", v.obs_per_part);
    cmd->add_option("--noise-std", v.noise_std, "per-channel noise sigma");
    cmd->add_option("--t-max", v.t_max);
    cmd->add_option("--t-split", v.t_split);
    cmd->add_option("--lr", v.lr);
    cmd->add_option("--batch-size", v.batch_size);
    cmd->add_option("--steps", v.steps);
    cmd->add_option("--latent-dim", v.latent_dim);
    cmd->add_option("--extractor-hidden", v.extractor_hidden);
    cmd->add_option("--aggregator-hidden", v.aggregator_hidden);
    cmd->add_option("--val-every", v.val_every);
    cmd->add_option("--val-max-trajectories", v.val_max_trajectories);
}

json merged_config(const FlagValues& v) {
    json j = json::object();
    if (!v.config_path.empty()) {
        std::ifstream in(v.config_path);
        if (!in) throw ConfigError("cannot open config file " + v.config_path);
        try {
            j = json::parse(in);
        } catch (const std::exception& e) {
            throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
        }
    }
    auto set_str = [&](const char* key, const std::string& val) {
        if (!val.empty()) j[key] = val;
    };
    auto set_u64 = [&](const char* key, const std::string& val) {
        if (!val.empty()) j[key] = std::stoull(val);
    };
    auto set_dbl = [&](const char* key, const std::string& val) {
        if (!val.empty()) j[key] = std::stod(val);
    };
    set_str("model", v.model);
    set_str("preset", v.preset);
    set_str("out", v.out);
    set_u64("seed", v.seed);
    set_u64("threads", v.threads);
    if (!v.methods.empty()) j["methods"] = v.methods;
    set_u64("multistart", v.multistart);
    set_u64("bootstrap-resamples", v.bootstrap_resamples);
    set_u64("fit-max-trajectories", v.fit_max_trajectories);
    set_u64("n-plot-examples", v.n_plot_examples);
    set_u64("n-train", v.n_train);
    set_u64("n-val", v.n_val);
    set_u64("n-test", v.n_test);
    set_u64("obs-per-part", v.obs_per_part);
    if (!v.noise_std.empty()) j["noise-std"] = v.noise_std;
    set_dbl("t-max", v.t_max);
    set_dbl("t-split", v.t_split);
    set_dbl("lr", v.lr);
    set_u64("batch-size", v.batch_size);
    set_u64("steps", v.steps);
    set_u64("latent-dim", v.latent_dim);
    if (!v.extractor_hidden.empty()) j["extractor-hidden"] = v.extractor_hidden;
    if (!v.aggregator_hidden.empty()) j["aggregator-hidden"] = v.aggregator_hidden;
    set_u64("val-every", v.val_every);
    set_u64("val-max-trajectories", v.val_max_trajectories);
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse irregular time-series forecasting benchmark"};
    app.require_subcommand(1);

    FlagValues v;
    std::vector<CLI::App*> cmds;
    for (const char* name :
         {"generate", "train", "fit", "evaluate", "report", "run-all"}) {
        auto* cmd = app.add_subcommand(name);
        add_common_flags(cmd, v);
        cmds.push_back(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // command-line errors are config errors
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = resolve_config(merged_config(v).dump());
        if (cmd == "generate") {
            run_generate(cfg);
        } else if (cmd == "train") {
            bool any = false;
            for (const auto& m : cfg.methods)
                if (m == "triplet" || m == "linear" || m == "rbf") {
                    run_train(cfg, m);
                    any = true;
                }
            if (!any) throw ConfigError("train: no trainable method selected");
        } else if (cmd == "fit") {
            run_fit(cfg);
        } else if (cmd == "evaluate") {
            run_evaluate(cfg);
        } else if (cmd == "report") {
            run_report(cfg);
        } else {
            run_all(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const MissingArtifactError& e) {
        std::cerr << "missing prerequisite: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IntegrationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
