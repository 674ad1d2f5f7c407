#pragma once

// Experiment orchestration: configuration files, seeded multi-run experiments,
// report files and the literature comparison table.

#include "rpnn/dataset.hpp"
#include "rpnn/metrics.hpp"
#include "rpnn/network.hpp"
#include "rpnn/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rpnn {

/// Where the out-of-sample rollout takes its first feedback values from.
enum class EvalStart {
    warm, // state reached by replaying the training patterns with fixed weights
    cold, // e = y = 0.5
};

enum class SweepSampling {
    log_uniform, // eta and r log-uniform, so small values are drawn as often as large ones
    uniform,
};

/// In-range values used when a config file leaves the training parameters unset.
inline TrainerConfig default_trainer()
{
    TrainerConfig t;
    t.eta = 0.2;
    t.momentum = 0.6;
    t.r_threshold = 1e-4;
    t.r_decay = 0.05;
    return t;
}

struct ExperimentConfig {
    MgParams mg;
    std::optional<std::filesystem::path> series_file; // load instead of generating
    std::vector<std::size_t> lags{0, 6, 12, 18};
    std::size_t horizon = 6;
    SplitRule split = SplitRule::by_anchor;
    std::size_t split_boundary = 500;
    double norm_min = 0.2;
    double norm_max = 0.8;
    FeedbackMode mode = FeedbackMode::error_output;
    std::optional<FeedbackMode> baseline; // trained under the identical protocol when set
    TrainerConfig trainer = default_trainer();
    std::size_t n_seeds = 1; // seeds trainer.seed, trainer.seed + 1, ...
    std::size_t sweep = 0;   // sampled hyperparameter sets; 0 uses `trainer` as is
    std::uint64_t sweep_seed = 1;
    SweepSampling sweep_sampling = SweepSampling::log_uniform;
    EvalStart eval_start = EvalStart::warm;
    std::size_t threads = 0; // 0 = hardware concurrency
    std::filesystem::path out_dir = "out";
    bool strict = false;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and malformed
/// values raise ParseError with the line number. With `strict` (or `strict = true`
/// in the file) training parameters must lie in the published ranges.
ExperimentConfig parse_config(std::string_view content, bool strict = false);
ExperimentConfig load_config(const std::filesystem::path& path, bool strict = false);

/// Every key, one per line, in a form parse_config reads back identically.
std::string write_config(const ExperimentConfig& cfg);

/// Checks cross-field invariants; with cfg.strict also the published ranges.
void validate_config(const ExperimentConfig& cfg);

/// Hyperparameter sets drawn from the published ranges: eta on [0.01, 1],
/// momentum uniform on [0.4, 0.8], r on [1e-5, 0.1], r_decay 0.05 or 0.2 with
/// equal odds. Other fields are copied from `base`.
std::vector<TrainerConfig> sample_sweep(const TrainerConfig& base, std::size_t count, std::uint64_t seed,
  SweepSampling sampling = SweepSampling::log_uniform);

enum class RunStatus { ok, diverged };

struct RunResult {
    std::size_t seed_index = 0;
    std::size_t config_index = 0;
    FeedbackMode mode = FeedbackMode::none;
    TrainerConfig trainer;
    RunStatus status = RunStatus::ok;
    std::string failure;
    std::optional<RidgePolyNet> net;
    GrowthHistory history;
    EvalResult eval;
    double wall_seconds = 0.0;
};

struct ModeSummary {
    FeedbackMode mode = FeedbackMode::none;
    std::vector<double> per_seed_best; // best de-normalized RMSE over configs, per seed
    double best = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t best_run = 0; // index into ExperimentReport::runs
};

struct ExperimentReport {
    ExperimentConfig config;
    Series series;
    NormParams norm;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::vector<TrainerConfig> configs;
    std::vector<RunResult> runs; // seed-major, then config, then mode
    ModeSummary primary;
    std::optional<ModeSummary> baseline;
    std::size_t baseline_wins = 0; // seeds where the primary mode beat the baseline
};

/// Generates or loads the series, normalizes over all observations, builds and
/// splits patterns, then trains and evaluates every (seed, config, mode) cell.
/// Cells run in parallel; results do not depend on the thread count.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct LiteratureResult {
    const char* model;
    const char* source;
    double rmse;
};

/// Published out-of-sample RMSE values on the same Mackey-Glass benchmark.
const std::vector<LiteratureResult>& literature_results();

/// The literature rows plus one row for `run_rmse`, sorted by RMSE descending,
/// with the run's rank marked (rank 1 = lowest RMSE).
std::string emit_comparison(double run_rmse, const std::string& run_label = "RPNN-EOF (this run)");

/// Rank of `run_rmse` among the literature rows plus itself, 1 = lowest.
std::size_t comparison_rank(double run_rmse);

/// report.csv body (deterministic: contains no timing).
std::string report_csv(const ExperimentReport& report);

/// Writes report.csv, timing.csv, series.csv, growth.csv, forecast.csv,
/// model.txt and comparison.txt under `dir` (growth/forecast/model for the best
/// primary run).
void write_outputs(const ExperimentReport& report, const std::filesystem::path& dir);

} // namespace rpnn
