#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace rpnn {

/// Mackey-Glass delay differential equation
///
///     dx/dt = beta * x(t) + alpha * x(t - tau) / (1 + x(t - tau)^10)
///
/// integrated with classical RK4 on a fixed step. Delayed values needed at the
/// RK4 half-step are cubic Hermite interpolants of the stored history, so the
/// scheme keeps fourth-order accuracy. The emitted series holds every
/// `sample_every`-th integrator point, starting at t = 0 unless `transient_skip`
/// emitted points are discarded first.
struct MgParams {
    double alpha = 0.2;
    double beta = -0.1;
    double tau = 17.0;
    double x0 = 1.2;
    double dt = 0.1;
    std::size_t sample_every = 10;
    std::size_t n_points = 1000;
    std::size_t transient_skip = 0;

    bool operator==(const MgParams&) const = default;
};

struct Series {
    std::vector<double> values;
    std::optional<MgParams> params; // empty for externally loaded data
};

/// Affine map [min1, max1] -> [min2, max2].
struct NormParams {
    double min1 = 0.0;
    double max1 = 1.0;
    double min2 = 0.2;
    double max2 = 0.8;
};

struct Pattern {
    std::vector<double> inputs; // x(t - lags[0]), x(t - lags[1]), ...
    double target = 0.0;        // x(t + horizon)
    std::size_t t_index = 0;    // anchor t

    bool operator==(const Pattern&) const = default;
};

enum class SplitRule {
    by_anchor,  // anchors t < boundary train, the rest test
    by_pattern, // first `boundary` patterns train
};

struct PatternSplit {
    std::vector<Pattern> train;
    std::vector<Pattern> test;
};

/// Throws InvalidInput when tau/dt is not an integer or sizes are zero,
/// NumericDivergence when the state stops being finite.
Series generate_mackey_glass(const MgParams& p);

/// Extrema taken over every value given; throws DegenerateRange on a constant series.
NormParams fit_norm(std::span<const double> values, double min2 = 0.2, double max2 = 0.8);

double normalize(double x, const NormParams& np);
double denormalize(double v, const NormParams& np);
std::vector<double> normalize(std::span<const double> xs, const NormParams& np);
std::vector<double> denormalize(std::span<const double> vs, const NormParams& np);

/// One pattern per anchor t in [max(lags), n - 1 - horizon], ascending.
std::vector<Pattern> build_patterns(std::span<const double> s, std::span<const std::size_t> lags,
  std::size_t horizon);

PatternSplit split_patterns(std::span<const Pattern> patterns, SplitRule rule, std::size_t boundary);

// CSV with header `t,x`.
void write_series_csv(const std::filesystem::path& path, std::span<const double> values);
Series read_series_csv(const std::filesystem::path& path);

// CSV with header `t,x0,x6,x12,x18,target` (column names follow the lags).
void write_patterns_csv(const std::filesystem::path& path, std::span<const Pattern> patterns,
  std::span<const std::size_t> lags);

} // namespace rpnn
