#include "oracle.hpp"

#include "rpnn/error.hpp"
#include "rpnn/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace rpnn;

TEST_CASE("rmse examples")
{
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(rmse(a, a) == 0.0);
    CHECK(rmse(a, std::vector<double>{1.0, 2.0, 5.0}) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));
    CHECK(rmse(a, std::vector<double>{1.25, 2.25, 3.25}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rmse(a, std::vector<double>{0.5, 1.5, 2.5}) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("rmse errors")
{
    CHECK_THROWS_AS(rmse(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), InvalidInput);
    CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), InvalidInput);
}

TEST_CASE("rmse symmetry and scaling")
{
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a, b;
        const int n = 1 + trial;
        for (int i = 0; i < n; ++i) {
            a.push_back(rng.uniform(-2.0, 2.0));
            b.push_back(rng.uniform(-2.0, 2.0));
        }
        REQUIRE(rmse(a, b) == rmse(b, a));
        const double c = rng.uniform(-5.0, 5.0);
        std::vector<double> ca, cb;
        for (int i = 0; i < n; ++i) {
            ca.push_back(c * a[i]);
            cb.push_back(c * b[i]);
        }
        REQUIRE(rmse(ca, cb) == doctest::Approx(std::abs(c) * rmse(a, b)).epsilon(1e-12));
    }
}

namespace {

RidgePolyNet trained_like_net(FeedbackMode mode)
{
    Rng rng(31);
    auto net = RidgePolyNet::initial(mode, 4, {}, rng);
    return add_block(std::move(net), {}, rng);
}

} // namespace

TEST_CASE("evaluate on a constant network with matching targets")
{
    const auto net = RidgePolyNet::zeros(FeedbackMode::error_output, 4, 2);
    auto patterns = oracle::synthetic(4, 20);
    for (auto& p : patterns) p.target = 0.5;
    const auto r = evaluate(net, patterns, NormParams{0.4, 1.3, 0.2, 0.8});
    CHECK(r.rmse_normalized == 0.0);
    CHECK(r.rmse_denormalized == 0.0);
    CHECK(r.n == 20);
}

TEST_CASE("evaluate without feedback does not depend on pattern order")
{
    const auto net = trained_like_net(FeedbackMode::none);
    auto patterns = oracle::synthetic(4, 50);
    const NormParams np{0.4, 1.3, 0.2, 0.8};
    const auto forward_order = evaluate(net, patterns, np);
    std::reverse(patterns.begin(), patterns.end());
    const auto reversed = evaluate(net, patterns, np);
    CHECK(forward_order.rmse_normalized == doctest::Approx(reversed.rmse_normalized).epsilon(1e-14));
}

TEST_CASE("evaluate against the reference rollout and the denormalization identity")
{
    const auto net = trained_like_net(FeedbackMode::error_output);
    const auto patterns = oracle::synthetic(4, 80);
    const NormParams np{0.41849474763221384, 1.3189922875629991, 0.2, 0.8};
    const auto r = evaluate(net, patterns, np);

    const auto ys = oracle::run(oracle::copy(net), patterns);
    double sum_n = 0.0;
    double sum_d = 0.0;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        CHECK(r.forecasts[i] == doctest::Approx(ys[i]).epsilon(1e-13));
        CHECK(r.per_step_errors[i] == patterns[i].target - r.forecasts[i]);
        const double dn = patterns[i].target - ys[i];
        // affine map written out independently of the library
        const double da = (patterns[i].target - 0.2) / 0.6 * (np.max1 - np.min1) + np.min1;
        const double df = (ys[i] - 0.2) / 0.6 * (np.max1 - np.min1) + np.min1;
        sum_n += dn * dn;
        sum_d += (da - df) * (da - df);
    }
    const double n = static_cast<double>(patterns.size());
    CHECK(r.rmse_normalized == doctest::Approx(std::sqrt(sum_n / n)).epsilon(1e-12));
    CHECK(r.rmse_denormalized == doctest::Approx(std::sqrt(sum_d / n)).epsilon(1e-10));
    CHECK(r.rmse_denormalized == doctest::Approx(rmse(denormalize(r.targets, np), denormalize(r.forecasts, np))));
    const double scale = (np.max1 - np.min1) / (np.max2 - np.min2);
    CHECK(std::abs(r.rmse_denormalized - r.rmse_normalized * scale) <= 1e-12);
}

TEST_CASE("evaluate honours the starting feedback state")
{
    const auto net = trained_like_net(FeedbackMode::error_output);
    const auto patterns = oracle::synthetic(4, 10);
    const NormParams np{0.4, 1.3, 0.2, 0.8};
    const auto cold = evaluate(net, patterns, np);
    const auto warm = evaluate(net, patterns, np, FeedbackState{0.0, 0.6});
    CHECK(cold.forecasts.front() != warm.forecasts.front());
    CHECK_THROWS_AS(evaluate(net, std::vector<Pattern>{}, np), InvalidInput);
}

TEST_CASE("write_forecast_csv")
{
    const auto net = trained_like_net(FeedbackMode::error_output);
    const auto patterns = oracle::synthetic(4, 12);
    const NormParams np{0.4, 1.3, 0.2, 0.8};
    const auto r = evaluate(net, patterns, np);
    const auto path = std::filesystem::temp_directory_path() / "rpnn_forecast_test.csv";
    write_forecast_csv(path, r, np);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,actual,forecast,error");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 12);
    std::filesystem::remove(path);
}
