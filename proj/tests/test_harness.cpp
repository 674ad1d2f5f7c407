#include "rpnn/error.hpp"
#include "rpnn/harness.hpp"
#include "rpnn/text.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace rpnn;
namespace fs = std::filesystem;

namespace {

// Small enough to train in well under a second.
ExperimentConfig quick_config()
{
    ExperimentConfig cfg;
    cfg.mg.n_points = 200;
    cfg.split_boundary = 100;
    cfg.trainer.max_epochs = 30;
    cfg.trainer.r_threshold = 1e-3;
    cfg.threads = 1;
    return cfg;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("empty config gives the benchmark defaults")
{
    const auto cfg = parse_config("");
    CHECK(cfg.mg.alpha == 0.2);
    CHECK(cfg.mg.beta == -0.1);
    CHECK(cfg.mg.tau == 17.0);
    CHECK(cfg.mg.x0 == 1.2);
    CHECK(cfg.mg.n_points == 1000);
    CHECK(cfg.lags == std::vector<std::size_t>{0, 6, 12, 18});
    CHECK(cfg.horizon == 6);
    CHECK(cfg.norm_min == 0.2);
    CHECK(cfg.norm_max == 0.8);
    CHECK(cfg.split_boundary == 500);
    CHECK(cfg.trainer.max_epochs == 3000);
    CHECK(cfg.trainer.max_blocks == 5);
    CHECK(cfg.trainer.eta_decay == 0.8);
    CHECK(cfg.trainer.init_range.lo == -0.5);
    CHECK(cfg.trainer.init_range.hi == 0.5);
    CHECK(cfg.mode == FeedbackMode::error_output);
    // defaults lie inside the strict ranges
    auto strict = cfg;
    strict.strict = true;
    CHECK_NOTHROW(validate_config(strict));
}

TEST_CASE("load_config reads files and comments")
{
    const auto path = fs::temp_directory_path() / "rpnn_cfg_test.cfg";
    std::ofstream(path) << "# experiment\n\nmode = rpnn   # plain network\neta=0.3\nlags = 0, 3,9\n";
    const auto cfg = load_config(path);
    CHECK(cfg.mode == FeedbackMode::none);
    CHECK(cfg.trainer.eta == 0.3);
    CHECK(cfg.lags == std::vector<std::size_t>{0, 3, 9});
    fs::remove(path);
    CHECK_THROWS_AS(load_config(path), IoError);
}

TEST_CASE("strict mode names the violated range")
{
    try {
        parse_config("eta = 0\n", true);
        FAIL("expected out-of-range");
    } catch (const OutOfRange& e) {
        CHECK(std::string(e.what()).find("[0.01, 1]") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("strict = true\nmomentum = 0.9\n"), OutOfRange);
    CHECK_THROWS_AS(parse_config("r_threshold = 0.5\n", true), OutOfRange);
    CHECK_THROWS_AS(parse_config("r_decay = 0.1\n", true), OutOfRange);
    CHECK_THROWS_AS(parse_config("max_blocks = 6\n", true), OutOfRange);
    CHECK_NOTHROW(parse_config("eta = 0\n"));
    CHECK_NOTHROW(parse_config("eta = 1\nmomentum = 0.4\nr_threshold = 1e-5\nr_decay = 0.2\n", true));
}

TEST_CASE("config parse errors carry line numbers")
{
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_config(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("# ok\nmode = rpnn\netaa = 0.1\n") == 3);
    CHECK(line_of("eta 0.1\n") == 1);
    CHECK(line_of("\n\neta = fast\n") == 3);
    CHECK(line_of("mode = lstm\n") == 1);
    CHECK(line_of("eta = 0.1\neta = 0.2\n") == 2);
    CHECK(line_of("freeze_previous = maybe\n") == 1);
    CHECK(line_of("n_seeds = -2\n") == 1);
    CHECK_THROWS_AS(parse_config("n_seeds = 0\n"), InvalidInput);
    CHECK_THROWS_AS(parse_config("norm_min = 0.8\nnorm_max = 0.2\n"), DegenerateRange);
}

TEST_CASE("write_config round trip")
{
    ExperimentConfig cfg;
    cfg.mg.tau = 30.0;
    cfg.mg.transient_skip = 12;
    cfg.series_file = "data/series.csv";
    cfg.lags = {0, 1, 5};
    cfg.horizon = 3;
    cfg.split = SplitRule::by_pattern;
    cfg.split_boundary = 321;
    cfg.mode = FeedbackMode::output;
    cfg.baseline = FeedbackMode::none;
    cfg.trainer.eta = 0.123456789012345;
    cfg.trainer.momentum = 0.41;
    cfg.trainer.r_threshold = 3.3e-5;
    cfg.trainer.gradient = GradientMode::exact;
    cfg.trainer.freeze_previous = false;
    cfg.trainer.seed = 99;
    cfg.n_seeds = 4;
    cfg.sweep = 3;
    cfg.sweep_seed = 7;
    cfg.sweep_sampling = SweepSampling::uniform;
    cfg.eval_start = EvalStart::cold;
    cfg.threads = 2;
    cfg.out_dir = "runs/a";
    CHECK(parse_config(write_config(cfg)) == cfg);
    CHECK(parse_config(write_config(ExperimentConfig{})) == ExperimentConfig{});

    const auto path = fs::temp_directory_path() / "rpnn_roundtrip.cfg";
    std::ofstream(path) << write_config(cfg);
    CHECK(load_config(path) == cfg);
    fs::remove(path);
}

TEST_CASE("sample_sweep stays inside the published ranges")
{
    TrainerConfig base;
    base.max_epochs = 77;
    for (auto sampling : {SweepSampling::log_uniform, SweepSampling::uniform}) {
        const auto configs = sample_sweep(base, 200, 5, sampling);
        REQUIRE(configs.size() == 200);
        for (const auto& c : configs) {
            REQUIRE((c.eta >= 0.01 && c.eta <= 1.0));
            REQUIRE((c.momentum >= 0.4 && c.momentum <= 0.8));
            REQUIRE((c.r_threshold >= 1e-5 && c.r_threshold <= 0.1));
            REQUIRE((c.r_decay == 0.05 || c.r_decay == 0.2));
            REQUIRE(c.max_epochs == 77);
        }
        CHECK(sample_sweep(base, 5, 9, sampling) == sample_sweep(base, 5, 9, sampling));
    }
}

TEST_CASE("run_experiment is deterministic")
{
    auto cfg = quick_config();
    cfg.n_seeds = 2;
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    CHECK(report_csv(a) == report_csv(b));
    CHECK(a.n_train == 82);
    CHECK(a.n_test == 94);
    REQUIRE(a.runs.size() == 2);
    CHECK(a.runs[0].trainer.seed == 1);
    CHECK(a.runs[1].trainer.seed == 2);

    auto threaded = cfg;
    threaded.threads = 3;
    auto text = report_csv(run_experiment(threaded));
    // only the echoed thread count differs
    const auto pos = text.find("threads = 3");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 11, "threads = 1");
    CHECK(text == report_csv(a));
}

TEST_CASE("aggregate best is the minimum of the per-seed values")
{
    auto cfg = quick_config();
    cfg.n_seeds = 3;
    cfg.sweep = 2;
    const auto r = run_experiment(cfg);
    CHECK(r.runs.size() == 6);
    double best = INFINITY;
    for (double v : r.primary.per_seed_best) best = std::min(best, v);
    CHECK(r.primary.best == best);
    CHECK(r.runs[r.primary.best_run].eval.rmse_denormalized == best);
    for (std::size_t s = 0; s < 3; ++s) {
        double seed_best = INFINITY;
        for (const auto& run : r.runs)
            if (run.seed_index == s) seed_best = std::min(seed_best, run.eval.rmse_denormalized);
        CHECK(r.primary.per_seed_best[s] == seed_best);
    }
}

TEST_CASE("mode switch changes only mode-dependent report fields")
{
    auto cfg = quick_config();
    const auto eof = report_csv(run_experiment(cfg));
    cfg.mode = FeedbackMode::none;
    const auto plain = report_csv(run_experiment(cfg));
    CHECK(eof != plain);
    CHECK(eof.find("# config: mode = rpnn-eof") != std::string::npos);
    CHECK(plain.find("# config: mode = rpnn\n") != std::string::npos);

    std::istringstream a(eof), b(plain);
    std::string la, lb;
    while (std::getline(a, la) && std::getline(b, lb)) {
        if (la.rfind("# config: mode", 0) == 0 || la.rfind("# summary", 0) == 0 || la.rfind("# per-seed", 0) == 0
          || la.find(",rpnn") != std::string::npos)
            continue;
        CHECK(la == lb);
    }
}

TEST_CASE("baseline comparison counts wins")
{
    auto cfg = quick_config();
    cfg.n_seeds = 2;
    cfg.baseline = FeedbackMode::none;
    const auto r = run_experiment(cfg);
    REQUIRE(r.baseline);
    CHECK(r.runs.size() == 4);
    std::size_t wins = 0;
    for (std::size_t s = 0; s < 2; ++s)
        if (r.primary.per_seed_best[s] < r.baseline->per_seed_best[s]) ++wins;
    CHECK(r.baseline_wins == wins);
    CHECK(report_csv(r).find("beats rpnn on") != std::string::npos);
}

TEST_CASE("run_experiment errors name the seed")
{
    auto cfg = quick_config();
    cfg.trainer.eta = 1e9;
    cfg.trainer.momentum = 0.0;
    try {
        run_experiment(cfg);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::numeric_divergence);
        CHECK(std::string(e.what()).rfind("seed 0 (1): ", 0) == 0);
    }

    cfg = quick_config();
    cfg.series_file = "/nonexistent/series.csv";
    CHECK_THROWS_AS(run_experiment(cfg), IoError);
}

TEST_CASE("report embeds config and provenance")
{
    const auto text = report_csv(run_experiment(quick_config()));
    CHECK(text.find("# config: dt = 0.1") != std::string::npos);
    CHECK(text.find("# config: sample_every = 10") != std::string::npos);
    CHECK(text.find("# config: transient_skip = 0") != std::string::npos);
    CHECK(text.find("# series: mackey-glass rk4 dt=0.1 sample_every=10 transient_skip=0") != std::string::npos);
    CHECK(text.find("# normalization: min1=") != std::string::npos);
    CHECK(text.find("warm start") != std::string::npos);
    CHECK(text.find("seed_index,seed,mode,config,") != std::string::npos);
}

TEST_CASE("write_outputs produces every file")
{
    auto cfg = quick_config();
    const auto dir = fs::temp_directory_path() / "rpnn_outputs_test";
    fs::remove_all(dir);
    const auto report = run_experiment(cfg);
    write_outputs(report, dir);
    for (const char* name :
      {"report.csv", "timing.csv", "series.csv", "growth.csv", "forecast.csv", "model.txt", "comparison.txt"})
        CHECK(fs::exists(dir / name));
    CHECK(read_file(dir / "report.csv") == report_csv(report));
    CHECK(load_model(dir / "model.txt") == *report.runs[report.primary.best_run].net);
    fs::remove_all(dir);
}

TEST_CASE("comparison table ordering")
{
    CHECK(literature_results().size() == 12);

    const auto table = emit_comparison(0.00416);
    std::size_t rows = 0;
    std::istringstream in(table);
    std::string line;
    std::vector<std::string> body;
    while (std::getline(in, line)) {
        if (line.size() > 4 && (line[0] == ' ' || line[0] == '*') && std::isdigit(static_cast<unsigned char>(line[3]))) {
            ++rows;
            body.push_back(line);
        }
    }
    CHECK(rows == 13);
    CHECK(comparison_rank(0.00416) == 3);
    std::size_t run_row = 0;
    for (std::size_t i = 0; i < body.size(); ++i)
        if (body[i][0] == '*') run_row = i;
    CHECK(body[run_row - 1].find("MLMVN") != std::string::npos);
    CHECK(body[run_row + 1].find("192 rules") != std::string::npos);

    CHECK(comparison_rank(1.0) == 13);
    const auto worst = emit_comparison(1.0);
    std::istringstream w(worst);
    std::getline(w, line);
    std::getline(w, line);
    std::getline(w, line);
    CHECK(line[0] == '*');

    CHECK(comparison_rank(0.001) == 1);
    CHECK(emit_comparison(0.001).find("ranks 1 of 13") != std::string::npos);
}

TEST_CASE("text helpers")
{
    CHECK(text::format_double(0.1) == "0.1");
    CHECK(text::parse_double(text::format_double(0.1 + 0.2)) == 0.1 + 0.2);
    CHECK(!text::parse_double("1.5x"));
    CHECK(!text::parse_double(""));
    CHECK(text::parse_int("+42") == 42);
    CHECK(!text::parse_int("4.2"));
    CHECK(text::trim("  a b \t") == "a b");
    CHECK(text::split("a,,b", ',') == std::vector<std::string_view>{"a", "", "b"});
    CHECK(text::split_ws(" a \t b  ") == std::vector<std::string_view>{"a", "b"});
}

TEST_CASE("error categories have stable names")
{
    CHECK(category_name(ErrorCategory::invalid_input) == "invalid-input");
    CHECK(category_name(ErrorCategory::growth_exhausted) == "growth-exhausted");
    CHECK(category_name(ErrorCategory::numeric_divergence) == "numeric-divergence");
    CHECK(category_name(ErrorCategory::degenerate_range) == "degenerate-range");
    CHECK(category_name(ErrorCategory::parse_error) == "parse-error");
    CHECK(category_name(ErrorCategory::out_of_range) == "out-of-range");
    CHECK(category_name(ErrorCategory::io_error) == "io-error");
}
