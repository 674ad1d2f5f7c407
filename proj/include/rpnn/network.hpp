#pragma once

// Ridge polynomial networks: a sum of Pi-Sigma blocks of orders 1..k squashed by a
// single sigmoid. Optional recurrent inputs feed back the previous forecast error
// and/or the previous forecast, giving the four architectures
//
//   none          RPNN      inputs: x_1..x_M
//   output        DRPNN     inputs: x_1..x_M, y(t-1)
//   error         RPNN-EF   inputs: x_1..x_M, e(t-1)
//   error_output  RPNN-EOF  inputs: x_1..x_M, e(t-1), y(t-1)
//
// with e(t-1) = d(t-1) - y(t-1).

#include "rpnn/random.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rpnn {

enum class FeedbackMode { none, output, error, error_output };

/// Number of recurrent inputs F appended after the M external inputs.
constexpr std::size_t feedback_count(FeedbackMode mode) noexcept
{
    switch (mode) {
    case FeedbackMode::none: return 0;
    case FeedbackMode::output:
    case FeedbackMode::error: return 1;
    case FeedbackMode::error_output: return 2;
    }
    return 0;
}

constexpr bool has_error_feedback(FeedbackMode mode) noexcept
{
    return mode == FeedbackMode::error || mode == FeedbackMode::error_output;
}

constexpr bool has_output_feedback(FeedbackMode mode) noexcept
{
    return mode == FeedbackMode::output || mode == FeedbackMode::error_output;
}

/// "rpnn", "drpnn", "rpnn-ef" or "rpnn-eof".
std::string_view mode_name(FeedbackMode mode) noexcept;
FeedbackMode parse_mode(std::string_view name);

struct InitRange {
    double lo = -0.5;
    double hi = 0.5;
};

struct SigmaUnit {
    std::vector<double> weights; // one per assembled input
    double bias = 0.0;

    bool operator==(const SigmaUnit&) const = default;
};

struct PiSigmaBlock {
    std::vector<SigmaUnit> units;

    std::size_t order() const noexcept { return units.size(); }
    bool operator==(const PiSigmaBlock&) const = default;
};

class RidgePolyNet {
public:
    /// Validates block orders (1..k), weight lengths and frozen_count < k.
    RidgePolyNet(FeedbackMode mode, std::size_t m_external, std::vector<PiSigmaBlock> blocks,
      std::size_t frozen_count = 0);

    /// A network holding one order-1 block drawn uniformly from `range`.
    static RidgePolyNet initial(FeedbackMode mode, std::size_t m_external, InitRange range, Rng& rng);

    /// All-zero network with blocks of order 1..k.
    static RidgePolyNet zeros(FeedbackMode mode, std::size_t m_external, std::size_t k,
      std::size_t frozen_count = 0);

    FeedbackMode mode() const noexcept { return mode_; }
    std::size_t m_external() const noexcept { return m_external_; }
    std::size_t input_dim() const noexcept { return m_external_ + feedback_count(mode_); }
    std::size_t block_count() const noexcept { return blocks_.size(); }
    std::size_t frozen_count() const noexcept { return frozen_count_; }
    void set_frozen_count(std::size_t n);

    const std::vector<PiSigmaBlock>& blocks() const noexcept { return blocks_; }
    const PiSigmaBlock& block(std::size_t b) const { return blocks_.at(b); }

    // Mutable access that cannot change the shape.
    std::span<double> weights(std::size_t b, std::size_t j) { return blocks_.at(b).units.at(j).weights; }
    std::span<const double> weights(std::size_t b, std::size_t j) const
    {
        return blocks_.at(b).units.at(j).weights;
    }
    double& bias(std::size_t b, std::size_t j) { return blocks_.at(b).units.at(j).bias; }
    double bias(std::size_t b, std::size_t j) const { return blocks_.at(b).units.at(j).bias; }

    /// Weights plus biases of every non-frozen block.
    std::size_t trainable_weight_count() const noexcept;

    bool operator==(const RidgePolyNet&) const = default;

private:
    friend RidgePolyNet add_block(RidgePolyNet net, InitRange range, Rng& rng, std::size_t max_blocks);

    FeedbackMode mode_;
    std::size_t m_external_;
    std::vector<PiSigmaBlock> blocks_;
    std::size_t frozen_count_;
};

struct ForwardTrace {
    std::vector<double> z;              // assembled inputs
    std::vector<std::vector<double>> h; // per block, per unit net sums
    std::vector<double> p;              // per block products
    double net_sum = 0.0;               // sum of p
    double y = 0.0;
};

double sigmoid(double x) noexcept;

/// External inputs first, then e(t-1) if present, then y(t-1) if present.
std::vector<double> assemble_inputs(std::span<const double> x, double prev_error, double prev_output,
  FeedbackMode mode, std::size_t m_external);

/// Units are multiplied and blocks summed in index order, so traces are bit-reproducible.
ForwardTrace forward(const RidgePolyNet& net, std::span<const double> z);

/// Same as forward() but reuses the buffers already held by `out`.
void forward_into(const RidgePolyNet& net, std::span<const double> z, ForwardTrace& out);

/// Appends a block of order k+1 with weights drawn from `range` and freezes the
/// k existing blocks. Existing weights are untouched. Throws GrowthExhausted when
/// k == max_blocks.
RidgePolyNet add_block(RidgePolyNet net, InitRange range, Rng& rng, std::size_t max_blocks = 5);

// Flat text model format, version 1:
//
//   rpnn-model 1 <mode> <M> <k> <frozen_count>
//   <block order> <unit index> <bias> <w_1> ... <w_{M+F}>      (one line per unit)
//
// Numbers use the shortest round-trip decimal form.
std::string to_text(const RidgePolyNet& net);
RidgePolyNet from_text(std::string_view text);
void save_model(const RidgePolyNet& net, const std::filesystem::path& path);
RidgePolyNet load_model(const std::filesystem::path& path);

} // namespace rpnn
