#pragma once

#include "rpnn/dataset.hpp"
#include "rpnn/network.hpp"
#include "rpnn/trainer.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace rpnn {

struct EvalResult {
    std::vector<double> per_step_errors; // target - forecast, normalized scale
    std::vector<double> forecasts;       // normalized scale
    std::vector<double> targets;         // normalized scale
    std::vector<std::size_t> t_index;
    double rmse_normalized = 0.0;
    double rmse_denormalized = 0.0;
    std::size_t n = 0;
};

/// sqrt(mean((actual - forecast)^2)). Throws InvalidInput on empty or unequal lists.
double rmse(std::span<const double> actual, std::span<const double> forecast);

/// Rolls the network over `patterns` in order with weights fixed. Feedback
/// inputs start at `start` (e = y = 0.5 unless given) and are then driven by the
/// recorded targets: e(t-1) = d(t-1) - y(t-1).
EvalResult evaluate(const RidgePolyNet& net, std::span<const Pattern> patterns, const NormParams& np,
  FeedbackState start = {});

/// CSV `t,actual,forecast,error` on the de-normalized scale.
void write_forecast_csv(const std::filesystem::path& path, const EvalResult& result, const NormParams& np);

} // namespace rpnn
