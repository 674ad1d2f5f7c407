#pragma once

// Online real-time recurrent learning for ridge polynomial networks, and the
// constructive controller that grows the network one Pi-Sigma block at a time.
//
// The sensitivity D^Y_p(t) = dy(t)/dw_p is carried forward in time for every
// trainable weight p. Feedback inputs depend on earlier outputs, so
//
//     dh_j/dw_p = [p feeds unit j] * Z_g + c_j * D^Y_p(t-1)
//
// where c_j is the unit's net weight on y(t-1): w_out - w_err for RPNN-EOF,
// w_out for DRPNN, -w_err for RPNN-EF and 0 for a plain RPNN (the error input
// e(t-1) = d(t-1) - y(t-1) has sensitivity D^E = -D^Y).

#include "rpnn/dataset.hpp"
#include "rpnn/error.hpp"
#include "rpnn/network.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace rpnn {

enum class GradientMode {
    /// Only the feedback path through the weight's own sigma unit is kept:
    ///   D^Y_p(t) = y' * prod_{j != l} h_j * (Z_g + c_l * D^Y_p(t-1)).
    /// Exact for a lone order-1 block, approximate otherwise.
    paper,
    /// Full product rule over every unit of every block.
    exact,
};

std::string_view gradient_name(GradientMode mode) noexcept;
GradientMode parse_gradient(std::string_view name);

struct TrainerConfig {
    double eta = 0.1;
    double momentum = 0.5;
    double r_threshold = 1e-4;
    double eta_decay = 0.8;
    double r_decay = 0.2;
    std::size_t max_epochs = 3000;
    std::size_t max_blocks = 5;
    InitRange init_range;
    std::uint64_t seed = 1;
    GradientMode gradient = GradientMode::paper;
    bool freeze_previous = true; // false trains every block after growth

    bool operator==(const TrainerConfig& o) const
    {
        return eta == o.eta && momentum == o.momentum && r_threshold == o.r_threshold
          && eta_decay == o.eta_decay && r_decay == o.r_decay && max_epochs == o.max_epochs
          && max_blocks == o.max_blocks && init_range.lo == o.init_range.lo
          && init_range.hi == o.init_range.hi && seed == o.seed && gradient == o.gradient
          && freeze_previous == o.freeze_previous;
    }
};

struct RtrlState {
    std::vector<double> dy;         // D^Y per trainable weight
    double prev_error = 0.5;        // e(t-1)
    double prev_output = 0.5;       // y(t-1)
    std::vector<double> prev_delta; // last weight change, for momentum
    long step = 0;                  // steps taken since the run started
};

/// D^E = -D^Y; never stored.
std::vector<double> error_sensitivity(const RtrlState& state);

RtrlState reset_state(const RidgePolyNet& net);

struct StepResult {
    double error = 0.0;  // e(t) = d(t) - y(t)
    double output = 0.0; // y(t)
};

/// Snapshot handed to a step observer after the weights were updated.
struct StepRecord {
    long step = 0;
    double error = 0.0;
    double output = 0.0;
    std::span<const double> dy;
};
using StepObserver = std::function<void(const StepRecord&)>;

/// One online RTRL step. Updates the non-frozen weights and the state in place.
/// Throws InvalidInput on dimension mismatch and NumericDivergence when a block
/// product leaves [-1e100, 1e100] or any quantity becomes non-finite.
StepResult rtrl_step(RidgePolyNet& net, RtrlState& state, const Pattern& pattern, const TrainerConfig& cfg);

struct EpochStats {
    std::size_t epoch = 0;
    double sse = 0.0; // sum over the epoch of e(t)^2 / 2
    std::size_t block_count = 0;
    double eta_used = 0.0;
    double r_used = 0.0;
    // sse of the previous epoch at the same block count minus this sse; +inf on
    // the first epoch after a (re)start or growth.
    double improvement = std::numeric_limits<double>::infinity();
    bool block_added = false;
};

/// Applies rtrl_step to every pattern in order. Throws NumericDivergence if the
/// sigmoid slope underflowed to zero on every step.
EpochStats train_epoch(RidgePolyNet& net, RtrlState& state, std::span<const Pattern> patterns,
  const TrainerConfig& cfg, const StepObserver& observer = {});

struct BlockAddition {
    std::size_t epoch = 0; // epoch after which the block was added
    std::size_t new_order = 0;
    double eta_after = 0.0;
    double r_after = 0.0;
};

enum class StopReason { max_epochs, growth_complete };

struct GrowthHistory {
    std::vector<EpochStats> epochs;
    std::vector<BlockAddition> additions;
    std::size_t best_epoch = 0;
    StopReason stop = StopReason::max_epochs;
};

struct FitResult {
    RidgePolyNet net; // snapshot after the epoch with the lowest sse
    GrowthHistory history;
};

class TrainingDiverged : public NumericDivergence {
public:
    TrainingDiverged(const NumericDivergence& cause, GrowthHistory history)
      : NumericDivergence(cause)
      , history_{std::move(history)}
    {
    }

    const GrowthHistory& history() const noexcept { return history_; }

private:
    GrowthHistory history_;
};

/// Called after every epoch with the live network, before any growth.
using EpochObserver = std::function<void(const EpochStats&, const RidgePolyNet&)>;

/// Starts from one order-1 block. After each epoch whose improvement is below r,
/// adds a block (eta *= eta_decay, r *= r_decay) or, at max_blocks, stops.
/// Stops at max_epochs otherwise.
FitResult constructive_fit(std::span<const Pattern> patterns, const TrainerConfig& cfg, FeedbackMode mode,
  const EpochObserver& observer = {});

struct GradientCheckEntry {
    std::size_t block = 0; // zero-based
    std::size_t unit = 0;
    std::size_t input = 0; // == input_dim for the bias
    double numeric = 0.0;
    double paper = 0.0;
    double exact = 0.0;
    double paper_rel_error = 0.0;
    double exact_rel_error = 0.0;
};

struct GradientCheckReport {
    std::vector<GradientCheckEntry> entries;
    double paper_max_rel_error = 0.0;
    double paper_mean_rel_error = 0.0;
    double exact_max_rel_error = 0.0;
    double exact_mean_rel_error = 0.0;
};

/// |a - b| / max(|a|, |b|, 1e-6).
double relative_error(double a, double b) noexcept;

/// Runs the sequence with learning switched off and compares D^Y at the final
/// step, for both gradient modes, with the central difference of y(T) obtained
/// by re-running the whole sequence from reset_state with each weight nudged by
/// +-epsilon.
GradientCheckReport gradient_check(const RidgePolyNet& net, std::span<const Pattern> patterns, double epsilon);

/// Recurrent inputs carried from one step to the next.
struct FeedbackState {
    double prev_error = 0.5;
    double prev_output = 0.5;
};

struct Rollout {
    std::vector<double> outputs;
    FeedbackState final_state;
};

/// Forward-only pass over `patterns` in order with weights fixed; feedback is
/// driven by the recorded targets, e(t-1) = d(t-1) - y(t-1).
Rollout rollout(const RidgePolyNet& net, std::span<const Pattern> patterns, FeedbackState start = {});

/// CSV with columns epoch,sse,block_count,eta_used,block_added.
void write_growth_csv(const std::filesystem::path& path, const GrowthHistory& history);

} // namespace rpnn
