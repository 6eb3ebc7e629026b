#pragma once

#include "sparseset/datagen.hpp"
#include "sparseset/deepset.hpp"
#include "sparseset/eval.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sparseset {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingArtifactError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Preset { MICRO, SMOKE, BENCHMARK };

// Fully resolved run configuration; every knob lives here so that the echoed
// config.resolved.json reproduces the run byte for byte.
struct RunConfig {
    ModelKind model = ModelKind::MMK;
    Preset preset = Preset::SMOKE;
    std::uint64_t seed = 0;
    int threads = 1;
    std::filesystem::path out = "out";
    std::vector<std::string> methods; // subset of {ground_truth, fit, linear, rbf, triplet}
    int multistart = 1;
    int bootstrap_resamples = 1000;
    std::size_t fit_max_trajectories = 0; // 0 = all
    int n_plot_examples = 3;
    GenerationConfig generation;
    TrainConfig train;
};

// Parses a config JSON object (already merged with CLI flag overrides).
// Unknown keys are errors; defaults depend on model and preset.
RunConfig resolve_config(const std::string& config_json_text);
std::string resolved_config_json(const RunConfig& cfg);

// Subcommand implementations; they communicate only via files under cfg.out.
void run_generate(const RunConfig& cfg);
void run_train(const RunConfig& cfg, const std::string& method); // triplet | linear | rbf
void run_fit(const RunConfig& cfg);
void run_evaluate(const RunConfig& cfg);
void run_report(const RunConfig& cfg);
void run_all(const RunConfig& cfg);

// Display names matching the results-table rows.
std::string method_display_name(const std::string& method);

// Fit CSV access (one row per test trajectory).
struct FitRow {
    int index = 0;
    bool converged = false;
    int iterations = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    std::vector<double> params;
};
std::vector<FitRow> read_fit_csv(const std::filesystem::path& path, ModelKind kind);

} // namespace sparseset
