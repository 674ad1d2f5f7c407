#include "rpnn/dataset.hpp"
#include "rpnn/error.hpp"
#include "rpnn/harness.hpp"
#include "rpnn/metrics.hpp"
#include "rpnn/network.hpp"
#include "rpnn/text.hpp"
#include "rpnn/trainer.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace rpnn;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> seeds;
    std::string mode;
    std::string gradient;
    std::string out;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config, "experiment config file (key = value)");
    cmd->add_option("--seed", f.seed, "first seed");
    cmd->add_option("--seeds", f.seeds, "number of seeds");
    cmd->add_option("--mode", f.mode, "rpnn, drpnn, rpnn-ef or rpnn-eof")
      ->check(CLI::IsMember({"rpnn", "drpnn", "rpnn-ef", "rpnn-eof"}));
    cmd->add_option("--gradient", f.gradient, "paper or exact")->check(CLI::IsMember({"paper", "exact"}));
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_flag("--strict", f.strict, "require training parameters inside the published ranges");
}

ExperimentConfig resolve(const CommonFlags& f)
{
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config, f.strict);
    if (f.strict) cfg.strict = true;
    if (f.seed) cfg.trainer.seed = *f.seed;
    if (f.seeds) cfg.n_seeds = *f.seeds;
    if (!f.mode.empty()) cfg.mode = parse_mode(f.mode);
    if (!f.gradient.empty()) cfg.trainer.gradient = parse_gradient(f.gradient);
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (cfg.baseline && *cfg.baseline == cfg.mode) cfg.baseline.reset();
    validate_config(cfg);
    return cfg;
}

struct Data {
    Series series;
    NormParams norm;
    PatternSplit split;
};

Data load_data(const ExperimentConfig& cfg)
{
    Data d;
    d.series = cfg.series_file ? read_series_csv(*cfg.series_file) : generate_mackey_glass(cfg.mg);
    d.norm = fit_norm(d.series.values, cfg.norm_min, cfg.norm_max);
    const auto patterns = build_patterns(normalize(d.series.values, d.norm), cfg.lags, cfg.horizon);
    d.split = split_patterns(patterns, cfg.split, cfg.split_boundary);
    return d;
}

void print_summary(const ExperimentReport& report)
{
    auto line = [](const ModeSummary& s) {
        std::cout << mode_name(s.mode) << ": best " << text::format_double(s.best) << "  mean "
                  << text::format_double(s.mean) << "  std " << text::format_double(s.stddev)
                  << "  (de-normalized test RMSE)\n";
    };
    line(report.primary);
    if (report.baseline) {
        line(*report.baseline);
        std::cout << mode_name(report.config.mode) << " beats " << mode_name(report.baseline->mode) << " on "
                  << report.baseline_wins << " of " << report.config.n_seeds << " seeds\n";
    }
    const auto& best = report.runs.at(report.primary.best_run);
    std::cout << "best run: seed " << best.trainer.seed << ", k = " << best.net->block_count() << ", best epoch "
              << best.history.best_epoch << "\n";
    std::cout << "outputs in " << report.config.out_dir.string() << "\n";
}

int run_experiment_cmd(const ExperimentConfig& cfg)
{
    const auto report = run_experiment(cfg);
    write_outputs(report, cfg.out_dir);
    print_summary(report);
    return 0;
}

int error_exit(std::string_view category, const std::string& message)
{
    std::string flat = message;
    for (char& c : flat)
        if (c == '\n') c = ' ';
    std::cerr << "error: " << category << ": " << flat << '\n';
    return 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ridge polynomial networks with error-output feedback on the Mackey-Glass benchmark"};
    app.require_subcommand(1);

    CommonFlags gen_f, train_f, bench_f, eval_f, grad_f, cmp_f;

    auto* gen = app.add_subcommand("generate", "write the Mackey-Glass series and lag patterns");
    add_common(gen, gen_f);

    auto* train = app.add_subcommand("train", "train and evaluate with the configured hyperparameters");
    add_common(train, train_f);

    std::size_t sweep = 8;
    std::uint64_t sweep_seed = 1;
    std::string baseline = "rpnn";
    auto* bench = app.add_subcommand("benchmark", "multi-seed sweep against a baseline architecture");
    add_common(bench, bench_f);
    bench_f.seeds = 10;
    bench->add_option("--sweep", sweep, "sampled hyperparameter sets (0 = use the config values)")->capture_default_str();
    bench->add_option("--sweep-seed", sweep_seed, "seed for the hyperparameter sampler")->capture_default_str();
    bench->add_option("--baseline", baseline, "baseline mode or off")->capture_default_str()
      ->check(CLI::IsMember({"off", "rpnn", "drpnn", "rpnn-ef", "rpnn-eof"}));

    std::string model_path;
    auto* eval = app.add_subcommand("evaluate", "evaluate a saved model on the test patterns");
    add_common(eval, eval_f);
    eval->add_option("--model", model_path, "model file written by train")->required();

    std::size_t gc_blocks = 3;
    std::size_t gc_frozen = 0;
    std::size_t gc_steps = 30;
    double gc_epsilon = 1e-6;
    auto* grad = app.add_subcommand("gradcheck", "compare RTRL sensitivities with finite differences");
    add_common(grad, grad_f);
    grad->add_option("--blocks", gc_blocks, "number of Pi-Sigma blocks (orders 1..k)")->capture_default_str();
    grad->add_option("--frozen", gc_frozen, "leading blocks held fixed")->capture_default_str();
    grad->add_option("--steps", gc_steps, "length of the pattern sequence")->capture_default_str();
    grad->add_option("--epsilon", gc_epsilon, "finite-difference step")->capture_default_str();

    std::optional<double> cmp_rmse;
    std::string cmp_report;
    auto* cmp = app.add_subcommand("compare", "print the literature comparison table");
    add_common(cmp, cmp_f);
    cmp->add_option("--rmse", cmp_rmse, "de-normalized test RMSE to rank");
    cmp->add_option("--report", cmp_report, "report.csv whose primary best RMSE is ranked");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        return error_exit("usage", e.what());
    }

    try {
        if (*gen) {
            const auto cfg = resolve(gen_f);
            const auto d = load_data(cfg);
            fs::create_directories(cfg.out_dir);
            write_series_csv(cfg.out_dir / "series.csv", d.series.values);
            const auto patterns = build_patterns(normalize(d.series.values, d.norm), cfg.lags, cfg.horizon);
            write_patterns_csv(cfg.out_dir / "patterns.csv", patterns, cfg.lags);
            std::cout << d.series.values.size() << " points, " << patterns.size() << " patterns ("
                      << d.split.train.size() << " train, " << d.split.test.size() << " test) written to "
                      << cfg.out_dir.string() << "\n";
            return 0;
        }
        if (*train) return run_experiment_cmd(resolve(train_f));
        if (*bench) {
            auto cfg = resolve(bench_f);
            cfg.sweep = sweep;
            cfg.sweep_seed = sweep_seed;
            if (baseline == "off") cfg.baseline.reset();
            else cfg.baseline = parse_mode(baseline);
            if (cfg.baseline && *cfg.baseline == cfg.mode) cfg.baseline.reset();
            return run_experiment_cmd(cfg);
        }
        if (*eval) {
            const auto cfg = resolve(eval_f);
            const auto net = load_model(model_path);
            const auto d = load_data(cfg);
            FeedbackState start;
            if (cfg.eval_start == EvalStart::warm) start = rollout(net, d.split.train).final_state;
            const auto result = evaluate(net, d.split.test, d.norm, start);
            fs::create_directories(cfg.out_dir);
            write_forecast_csv(cfg.out_dir / "forecast.csv", result, d.norm);
            std::cout << "rmse_normalized " << text::format_double(result.rmse_normalized) << "\n"
                      << "rmse_denormalized " << text::format_double(result.rmse_denormalized) << "\n";
            return 0;
        }
        if (*grad) {
            const auto cfg = resolve(grad_f);
            const auto d = load_data(cfg);
            if (d.split.train.size() < gc_steps) throw InvalidInput("not enough training patterns for --steps");
            Rng rng(cfg.trainer.seed);
            auto net = RidgePolyNet::initial(cfg.mode, cfg.lags.size(), cfg.trainer.init_range, rng);
            for (std::size_t k = 1; k < gc_blocks; ++k)
                net = add_block(std::move(net), cfg.trainer.init_range, rng, gc_blocks);
            net.set_frozen_count(gc_frozen);
            const std::span<const Pattern> seq(d.split.train.data(), gc_steps);
            const auto report = gradient_check(net, seq, gc_epsilon);
            std::cout << "block,unit,input,numeric,paper,exact,paper_rel_error,exact_rel_error\n";
            for (const auto& e : report.entries)
                std::cout << e.block << ',' << e.unit << ',' << e.input << ',' << text::format_double(e.numeric) << ','
                          << text::format_double(e.paper) << ',' << text::format_double(e.exact) << ','
                          << text::format_double(e.paper_rel_error) << ',' << text::format_double(e.exact_rel_error)
                          << '\n';
            std::cout << "# paper: max " << text::format_double(report.paper_max_rel_error) << " mean "
                      << text::format_double(report.paper_mean_rel_error) << "\n# exact: max "
                      << text::format_double(report.exact_max_rel_error) << " mean "
                      << text::format_double(report.exact_mean_rel_error) << '\n';
            return 0;
        }
        if (*cmp) {
            double value = 0.0;
            if (cmp_rmse) {
                value = *cmp_rmse;
            } else if (!cmp_report.empty()) {
                std::ifstream in(cmp_report);
                if (!in) throw IoError("cannot read " + cmp_report);
                std::optional<double> found;
                for (std::string line; std::getline(in, line);) {
                    const auto pos = line.find("# summary ");
                    const auto best = line.find(": best=");
                    if (pos != 0 || best == std::string::npos) continue;
                    const auto start = best + 7;
                    found = text::parse_double(line.substr(start, line.find(' ', start) - start));
                    break;
                }
                if (!found) throw ParseError("no summary line in " + cmp_report, 0);
                value = *found;
            } else {
                throw InvalidInput("compare needs --rmse or --report");
            }
            const auto table = emit_comparison(value, "this run");
            std::cout << table;
            if (!cmp_f.out.empty()) {
                fs::create_directories(cmp_f.out);
                std::ofstream(fs::path(cmp_f.out) / "comparison.txt") << table;
            }
            return 0;
        }
    } catch (const Error& e) {
        return error_exit(category_name(e.category()), e.what());
    } catch (const fs::filesystem_error& e) {
        return error_exit(category_name(ErrorCategory::io_error), e.what());
    } catch (const std::exception& e) {
        return error_exit("internal", e.what());
    }
    return 0;
}
