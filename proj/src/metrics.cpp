#include "rpnn/metrics.hpp"

#include "rpnn/error.hpp"
#include "rpnn/text.hpp"

#include <cmath>
#include <fstream>
#include <string>

namespace rpnn {

double rmse(std::span<const double> actual, std::span<const double> forecast)
{
    if (actual.size() != forecast.size())
        throw InvalidInput("rmse needs equal lengths, got " + std::to_string(actual.size()) + " and "
          + std::to_string(forecast.size()));
    if (actual.empty()) throw InvalidInput("rmse of an empty list");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - forecast[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

EvalResult evaluate(const RidgePolyNet& net, std::span<const Pattern> patterns, const NormParams& np,
  FeedbackState start)
{
    EvalResult result;
    result.forecasts = rollout(net, patterns, start).outputs;
    result.n = patterns.size();
    result.targets.reserve(result.n);
    result.per_step_errors.reserve(result.n);
    result.t_index.reserve(result.n);
    for (std::size_t i = 0; i < result.n; ++i) {
        result.targets.push_back(patterns[i].target);
        result.per_step_errors.push_back(patterns[i].target - result.forecasts[i]);
        result.t_index.push_back(patterns[i].t_index);
    }
    result.rmse_normalized = rmse(result.targets, result.forecasts);
    result.rmse_denormalized = rmse(denormalize(result.targets, np), denormalize(result.forecasts, np));
    return result;
}

void write_forecast_csv(const std::filesystem::path& path, const EvalResult& result, const NormParams& np)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t,actual,forecast,error\n";
    for (std::size_t i = 0; i < result.n; ++i) {
        const double actual = denormalize(result.targets[i], np);
        const double forecast = denormalize(result.forecasts[i], np);
        out << result.t_index[i] << ',' << text::format_double(actual) << ','
            << text::format_double(forecast) << ',' << text::format_double(actual - forecast) << '\n';
    }
}

} // namespace rpnn
