#include "rpnn/harness.hpp"

#include "rpnn/error.hpp"
#include "rpnn/text.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace rpnn {

namespace {

std::string fmt(double v) { return text::format_double(v); }

std::string_view split_name(SplitRule rule) { return rule == SplitRule::by_anchor ? "anchor" : "pattern"; }

std::string_view eval_start_name(EvalStart s) { return s == EvalStart::warm ? "warm" : "cold"; }

std::string_view sampling_name(SweepSampling s) { return s == SweepSampling::log_uniform ? "log" : "linear"; }

std::string_view stop_name(StopReason s) { return s == StopReason::max_epochs ? "max_epochs" : "growth_complete"; }

struct Field {
    std::function<void(ExperimentConfig&, std::string_view)> read;
    std::function<std::string(const ExperimentConfig&)> write;
};

// Readers throw InvalidInput with a bare message; parse_config adds the line.
double read_double(std::string_view v)
{
    const auto d = text::parse_double(v);
    if (!d || !std::isfinite(*d)) throw InvalidInput("expected a finite number, got '" + std::string(v) + "'");
    return *d;
}

std::size_t read_count(std::string_view v)
{
    const auto n = text::parse_int(v);
    if (!n || *n < 0) throw InvalidInput("expected a non-negative integer, got '" + std::string(v) + "'");
    return static_cast<std::size_t>(*n);
}

std::uint64_t read_seed(std::string_view v)
{
    const auto n = text::parse_int(v);
    if (!n || *n < 0) throw InvalidInput("expected a non-negative integer seed, got '" + std::string(v) + "'");
    return static_cast<std::uint64_t>(*n);
}

bool read_bool(std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidInput("expected true or false, got '" + std::string(v) + "'");
}

std::string write_bool(bool b) { return b ? "true" : "false"; }

const std::vector<std::pair<std::string, Field>>& fields()
{
    using C = ExperimentConfig;
    using V = std::string_view;
    static const std::vector<std::pair<std::string, Field>> table{
      {"alpha", {[](C& c, V v) { c.mg.alpha = read_double(v); }, [](const C& c) { return fmt(c.mg.alpha); }}},
      {"beta", {[](C& c, V v) { c.mg.beta = read_double(v); }, [](const C& c) { return fmt(c.mg.beta); }}},
      {"tau", {[](C& c, V v) { c.mg.tau = read_double(v); }, [](const C& c) { return fmt(c.mg.tau); }}},
      {"x0", {[](C& c, V v) { c.mg.x0 = read_double(v); }, [](const C& c) { return fmt(c.mg.x0); }}},
      {"dt", {[](C& c, V v) { c.mg.dt = read_double(v); }, [](const C& c) { return fmt(c.mg.dt); }}},
      {"sample_every",
        {[](C& c, V v) { c.mg.sample_every = read_count(v); },
          [](const C& c) { return std::to_string(c.mg.sample_every); }}},
      {"n_points",
        {[](C& c, V v) { c.mg.n_points = read_count(v); }, [](const C& c) { return std::to_string(c.mg.n_points); }}},
      {"transient_skip",
        {[](C& c, V v) { c.mg.transient_skip = read_count(v); },
          [](const C& c) { return std::to_string(c.mg.transient_skip); }}},
      {"series_file",
        {[](C& c, V v) {
             if (v.empty()) c.series_file.reset();
             else c.series_file = std::filesystem::path(std::string(v));
         },
          [](const C& c) { return c.series_file ? c.series_file->string() : std::string(); }}},
      {"lags",
        {[](C& c, V v) {
             c.lags.clear();
             for (auto part : text::split(v, ',')) c.lags.push_back(read_count(text::trim(part)));
         },
          [](const C& c) {
              std::string s;
              for (std::size_t i = 0; i < c.lags.size(); ++i) s += (i ? "," : "") + std::to_string(c.lags[i]);
              return s;
          }}},
      {"horizon",
        {[](C& c, V v) { c.horizon = read_count(v); }, [](const C& c) { return std::to_string(c.horizon); }}},
      {"split",
        {[](C& c, V v) {
             if (v == "anchor") c.split = SplitRule::by_anchor;
             else if (v == "pattern") c.split = SplitRule::by_pattern;
             else throw InvalidInput("split must be anchor or pattern, got '" + std::string(v) + "'");
         },
          [](const C& c) { return std::string(split_name(c.split)); }}},
      {"split_boundary",
        {[](C& c, V v) { c.split_boundary = read_count(v); },
          [](const C& c) { return std::to_string(c.split_boundary); }}},
      {"norm_min", {[](C& c, V v) { c.norm_min = read_double(v); }, [](const C& c) { return fmt(c.norm_min); }}},
      {"norm_max", {[](C& c, V v) { c.norm_max = read_double(v); }, [](const C& c) { return fmt(c.norm_max); }}},
      {"mode",
        {[](C& c, V v) { c.mode = parse_mode(v); }, [](const C& c) { return std::string(mode_name(c.mode)); }}},
      {"baseline",
        {[](C& c, V v) {
             if (v == "off") c.baseline.reset();
             else c.baseline = parse_mode(v);
         },
          [](const C& c) { return c.baseline ? std::string(mode_name(*c.baseline)) : std::string("off"); }}},
      {"gradient",
        {[](C& c, V v) { c.trainer.gradient = parse_gradient(v); },
          [](const C& c) { return std::string(gradient_name(c.trainer.gradient)); }}},
      {"eta", {[](C& c, V v) { c.trainer.eta = read_double(v); }, [](const C& c) { return fmt(c.trainer.eta); }}},
      {"momentum",
        {[](C& c, V v) { c.trainer.momentum = read_double(v); }, [](const C& c) { return fmt(c.trainer.momentum); }}},
      {"r_threshold",
        {[](C& c, V v) { c.trainer.r_threshold = read_double(v); },
          [](const C& c) { return fmt(c.trainer.r_threshold); }}},
      {"eta_decay",
        {[](C& c, V v) { c.trainer.eta_decay = read_double(v); },
          [](const C& c) { return fmt(c.trainer.eta_decay); }}},
      {"r_decay",
        {[](C& c, V v) { c.trainer.r_decay = read_double(v); }, [](const C& c) { return fmt(c.trainer.r_decay); }}},
      {"max_epochs",
        {[](C& c, V v) { c.trainer.max_epochs = read_count(v); },
          [](const C& c) { return std::to_string(c.trainer.max_epochs); }}},
      {"max_blocks",
        {[](C& c, V v) { c.trainer.max_blocks = read_count(v); },
          [](const C& c) { return std::to_string(c.trainer.max_blocks); }}},
      {"init_min",
        {[](C& c, V v) { c.trainer.init_range.lo = read_double(v); },
          [](const C& c) { return fmt(c.trainer.init_range.lo); }}},
      {"init_max",
        {[](C& c, V v) { c.trainer.init_range.hi = read_double(v); },
          [](const C& c) { return fmt(c.trainer.init_range.hi); }}},
      {"freeze_previous",
        {[](C& c, V v) { c.trainer.freeze_previous = read_bool(v); },
          [](const C& c) { return write_bool(c.trainer.freeze_previous); }}},
      {"seed",
        {[](C& c, V v) { c.trainer.seed = read_seed(v); }, [](const C& c) { return std::to_string(c.trainer.seed); }}},
      {"n_seeds",
        {[](C& c, V v) { c.n_seeds = read_count(v); }, [](const C& c) { return std::to_string(c.n_seeds); }}},
      {"sweep", {[](C& c, V v) { c.sweep = read_count(v); }, [](const C& c) { return std::to_string(c.sweep); }}},
      {"sweep_seed",
        {[](C& c, V v) { c.sweep_seed = read_seed(v); }, [](const C& c) { return std::to_string(c.sweep_seed); }}},
      {"sweep_sampling",
        {[](C& c, V v) {
             if (v == "log") c.sweep_sampling = SweepSampling::log_uniform;
             else if (v == "linear") c.sweep_sampling = SweepSampling::uniform;
             else throw InvalidInput("sweep_sampling must be log or linear, got '" + std::string(v) + "'");
         },
          [](const C& c) { return std::string(sampling_name(c.sweep_sampling)); }}},
      {"eval_start",
        {[](C& c, V v) {
             if (v == "warm") c.eval_start = EvalStart::warm;
             else if (v == "cold") c.eval_start = EvalStart::cold;
             else throw InvalidInput("eval_start must be warm or cold, got '" + std::string(v) + "'");
         },
          [](const C& c) { return std::string(eval_start_name(c.eval_start)); }}},
      {"threads",
        {[](C& c, V v) { c.threads = read_count(v); }, [](const C& c) { return std::to_string(c.threads); }}},
      {"out_dir",
        {[](C& c, V v) { c.out_dir = std::filesystem::path(std::string(v)); },
          [](const C& c) { return c.out_dir.string(); }}},
      {"strict", {[](C& c, V v) { c.strict = read_bool(v); }, [](const C& c) { return write_bool(c.strict); }}},
    };
    return table;
}

void require_range(std::string_view name, double v, double lo, double hi, std::string_view bound)
{
    if (!(v >= lo && v <= hi))
        throw OutOfRange(std::string(name) + " = " + fmt(v) + " is outside the strict range " + std::string(bound));
}

double mean_of(std::span<const double> xs)
{
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev_of(std::span<const double> xs)
{
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

ModeSummary summarize(const std::vector<RunResult>& runs, FeedbackMode mode, std::size_t n_seeds)
{
    ModeSummary s;
    s.mode = mode;
    const double inf = std::numeric_limits<double>::infinity();
    s.per_seed_best.assign(n_seeds, inf);
    double best = inf;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        if (r.mode != mode || r.status != RunStatus::ok) continue;
        const double v = r.eval.rmse_denormalized;
        if (v < s.per_seed_best[r.seed_index]) s.per_seed_best[r.seed_index] = v;
        if (v < best) {
            best = v;
            s.best_run = i;
        }
    }
    if (!std::isfinite(best)) throw NumericDivergence("every run of mode " + std::string(mode_name(mode)) + " diverged", 0);
    std::vector<double> finite;
    for (double v : s.per_seed_best)
        if (std::isfinite(v)) finite.push_back(v);
    s.best = best;
    s.mean = mean_of(finite);
    s.stddev = stddev_of(finite);
    return s;
}

struct Cell {
    std::size_t seed_index;
    std::size_t config_index;
    FeedbackMode mode;
};

RunResult run_cell(const Cell& cell, const ExperimentConfig& cfg, const TrainerConfig& trainer,
  const PatternSplit& split, const NormParams& np, bool record_divergence)
{
    RunResult r;
    r.seed_index = cell.seed_index;
    r.config_index = cell.config_index;
    r.mode = cell.mode;
    r.trainer = trainer;
    r.trainer.seed = cfg.trainer.seed + cell.seed_index;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto fit = constructive_fit(split.train, r.trainer, cell.mode);
        FeedbackState start;
        if (cfg.eval_start == EvalStart::warm) start = rollout(fit.net, split.train).final_state;
        r.eval = evaluate(fit.net, split.test, np, start);
        if (!std::isfinite(r.eval.rmse_denormalized))
            throw NumericDivergence("out-of-sample forecasts are not finite", 0);
        r.history = std::move(fit.history);
        r.net = std::move(fit.net);
    } catch (const TrainingDiverged& e) {
        if (!record_divergence) throw;
        r.status = RunStatus::diverged;
        r.failure = e.what();
        r.history = e.history();
    } catch (const NumericDivergence& e) {
        if (!record_divergence) throw;
        r.status = RunStatus::diverged;
        r.failure = e.what();
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace

ExperimentConfig parse_config(std::string_view content, bool strict)
{
    ExperimentConfig cfg;
    std::map<std::string, std::size_t> seen;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const auto end = std::min(content.find('\n', pos), content.size());
        std::string_view line = content.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected `key = value`", lineno);
        const std::string key(text::trim(line.substr(0, eq)));
        const auto value = text::trim(line.substr(eq + 1));
        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
        if (it == table.end()) throw ParseError("unknown key '" + key + "'", lineno);
        if (const auto dup = seen.find(key); dup != seen.end())
            throw ParseError("duplicate key '" + key + "' (first set on line " + std::to_string(dup->second) + ")",
              lineno);
        seen.emplace(key, lineno);
        try {
            it->second.read(cfg, value);
        } catch (const Error& e) {
            throw ParseError(key + ": " + e.what(), lineno);
        }
    }
    if (strict) cfg.strict = true;
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, bool strict)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), strict);
}

std::string write_config(const ExperimentConfig& cfg)
{
    std::string out;
    for (const auto& [key, field] : fields()) out += key + " = " + field.write(cfg) + "\n";
    return out;
}

void validate_config(const ExperimentConfig& cfg)
{
    if (cfg.lags.empty()) throw InvalidInput("lags must not be empty");
    if (cfg.horizon == 0) throw InvalidInput("horizon must be at least 1");
    if (!(cfg.norm_max > cfg.norm_min)) throw DegenerateRange("norm_max must exceed norm_min");
    if (cfg.n_seeds == 0) throw InvalidInput("n_seeds must be at least 1");
    if (cfg.mg.n_points == 0 || cfg.mg.sample_every == 0) throw InvalidInput("n_points and sample_every must be positive");
    if (!(cfg.mg.dt > 0.0) || !(cfg.mg.tau > 0.0)) throw InvalidInput("dt and tau must be positive");
    const auto& t = cfg.trainer;
    if (t.eta < 0.0 || t.momentum < 0.0 || t.r_threshold < 0.0)
        throw InvalidInput("eta, momentum and r_threshold must be non-negative");
    if (!(t.eta_decay > 0.0) || !(t.r_decay > 0.0)) throw InvalidInput("eta_decay and r_decay must be positive");
    if (t.max_epochs == 0 || t.max_blocks == 0) throw InvalidInput("max_epochs and max_blocks must be positive");
    if (!(t.init_range.lo <= t.init_range.hi)) throw InvalidInput("init_min must not exceed init_max");
    if (cfg.baseline && *cfg.baseline == cfg.mode) throw InvalidInput("baseline must differ from mode");

    if (!cfg.strict) return;
    require_range("eta", t.eta, 0.01, 1.0, "[0.01, 1]");
    require_range("momentum", t.momentum, 0.4, 0.8, "[0.4, 0.8]");
    require_range("r_threshold", t.r_threshold, 1e-5, 0.1, "[1e-05, 0.1]");
    if (t.r_decay != 0.05 && t.r_decay != 0.2)
        throw OutOfRange("r_decay = " + fmt(t.r_decay) + " is outside the strict set {0.05, 0.2}");
    if (t.eta_decay != 0.8) throw OutOfRange("eta_decay = " + fmt(t.eta_decay) + " must be 0.8 in strict mode");
    require_range("init_min", t.init_range.lo, -0.5, 0.5, "[-0.5, 0.5]");
    require_range("init_max", t.init_range.hi, -0.5, 0.5, "[-0.5, 0.5]");
    if (t.max_epochs > 3000)
        throw OutOfRange("max_epochs = " + std::to_string(t.max_epochs) + " exceeds the strict limit 3000");
    if (t.max_blocks > 5)
        throw OutOfRange("max_blocks = " + std::to_string(t.max_blocks) + " exceeds the strict limit 5");
}

std::vector<TrainerConfig> sample_sweep(const TrainerConfig& base, std::size_t count, std::uint64_t seed,
  SweepSampling sampling)
{
    Rng rng(seed);
    const bool log = sampling == SweepSampling::log_uniform;
    std::vector<TrainerConfig> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        TrainerConfig c = base;
        c.eta = log ? std::exp(rng.uniform(std::log(0.01), 0.0)) : rng.uniform(0.01, 1.0);
        c.momentum = rng.uniform(0.4, 0.8);
        c.r_threshold = log ? std::exp(rng.uniform(std::log(1e-5), std::log(0.1))) : rng.uniform(1e-5, 0.1);
        c.r_decay = rng.uniform(0.0, 1.0) < 0.5 ? 0.05 : 0.2;
        out.push_back(c);
    }
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    ExperimentReport report;
    report.config = cfg;
    report.series = cfg.series_file ? read_series_csv(*cfg.series_file) : generate_mackey_glass(cfg.mg);
    report.norm = fit_norm(report.series.values, cfg.norm_min, cfg.norm_max);
    const auto scaled = normalize(report.series.values, report.norm);
    const auto patterns = build_patterns(scaled, cfg.lags, cfg.horizon);
    const auto split = split_patterns(patterns, cfg.split, cfg.split_boundary);
    if (split.train.empty() || split.test.empty())
        throw InvalidInput("split leaves " + std::to_string(split.train.size()) + " training and "
          + std::to_string(split.test.size()) + " test patterns");
    report.n_train = split.train.size();
    report.n_test = split.test.size();
    report.configs = cfg.sweep == 0 ? std::vector<TrainerConfig>{cfg.trainer}
                                    : sample_sweep(cfg.trainer, cfg.sweep, cfg.sweep_seed, cfg.sweep_sampling);

    std::vector<FeedbackMode> modes{cfg.mode};
    if (cfg.baseline) modes.push_back(*cfg.baseline);
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < cfg.n_seeds; ++s)
        for (std::size_t c = 0; c < report.configs.size(); ++c)
            for (auto m : modes) cells.push_back({s, c, m});

    // Sampled hyperparameters may land on unstable corners; such cells are kept
    // as diverged rows instead of aborting the sweep.
    const bool record_divergence = cfg.sweep > 0;
    std::vector<RunResult> results(cells.size());
    std::vector<std::exception_ptr> failures(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                results[i] = run_cell(cells[i], cfg, report.configs[cells[i].config_index], split, report.norm,
                  record_divergence);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::size_t n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, cells.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!failures[i]) continue;
        const std::string where = "seed " + std::to_string(cells[i].seed_index) + " ("
          + std::to_string(cfg.trainer.seed + cells[i].seed_index) + ")";
        try {
            std::rethrow_exception(failures[i]);
        } catch (const Error& e) {
            throw Error(e.category(), where + ": " + e.what());
        }
    }

    report.runs = std::move(results);
    report.primary = summarize(report.runs, cfg.mode, cfg.n_seeds);
    if (cfg.baseline) {
        report.baseline = summarize(report.runs, *cfg.baseline, cfg.n_seeds);
        for (std::size_t s = 0; s < cfg.n_seeds; ++s)
            if (report.primary.per_seed_best[s] < report.baseline->per_seed_best[s]) ++report.baseline_wins;
    }
    return report;
}

const std::vector<LiteratureResult>& literature_results()
{
    static const std::vector<LiteratureResult> rows{
      {"Differential evolution beta basis function NN (DE-BBFNN)", "Dhahri & Alimi, 2008", 0.030},
      {"Dynamic evolving computation system (DECS)", "Chen & Lin, 2007", 0.0289},
      {"Orthogonal function neural network", "Wang & Gu, 2009", 0.016},
      {"Multilayer feedforward NN, backpropagation (MLFBP)", "Aizenberg et al., 2012", 0.0155},
      {"Backpropagation network with hybrid K-means-greedy", "Tan et al., 2012", 0.015},
      {"Modified differential evolution RBF (MDE-RBF)", "Dhahri & Alimi, 2006", 0.013},
      {"Functional-link neural fuzzy network (FLNFN-CCPSO)", "Lin et al., 2009", 0.008274},
      {"Multi-valued neuron network, QR learning (MLMVN-QR)", "Aizenberg et al., 2012", 0.0065},
      {"Wavelet NN with hybrid learning (WNN-HLA)", "Lin, 2006", 0.006},
      {"Multi-valued neuron network (MLMVN)", "Aizenberg et al., 2012", 0.0056},
      {"Grid-based fuzzy system, 192 rules", "Herrera et al., 2007", 0.0041},
      {"Multigrid-based fuzzy system, 3 sub-grids, 120 rules", "Herrera et al., 2007", 0.0031},
    };
    return rows;
}

std::size_t comparison_rank(double run_rmse)
{
    std::size_t better = 0;
    for (const auto& row : literature_results())
        if (row.rmse < run_rmse) ++better;
    return better + 1;
}

std::string emit_comparison(double run_rmse, const std::string& run_label)
{
    struct Row {
        std::string model;
        std::string source;
        double rmse;
        bool run;
    };
    std::vector<Row> rows;
    for (const auto& r : literature_results()) rows.push_back({r.model, r.source, r.rmse, false});
    rows.push_back({run_label, "", run_rmse, true});
    // Ties put the run below the literature row, matching comparison_rank.
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.rmse != b.rmse) return a.rmse > b.rmse;
        return !a.run && b.run;
    });
    const std::size_t rank = comparison_rank(run_rmse);
    const std::size_t total = rows.size();

    std::ostringstream out;
    out << "Mackey-Glass out-of-sample RMSE, sorted descending (rank 1 = lowest)\n\n";
    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.model.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << (r.run ? "* " : "  ") << std::setw(2) << (total - i) << "  " << r.model
            << std::string(width - r.model.size() + 2, ' ') << std::setw(10) << std::left << fmt(r.rmse) << std::right;
        if (!r.source.empty()) out << "  " << r.source;
        out << '\n';
    }
    out << "\nthis run ranks " << rank << " of " << total << '\n';
    return out.str();
}

std::string report_csv(const ExperimentReport& report)
{
    const auto& cfg = report.config;
    std::ostringstream out;
    out << "# rpnn experiment report\n";
    std::istringstream echo(write_config(cfg));
    for (std::string line; std::getline(echo, line);) out << "# config: " << line << '\n';
    if (cfg.series_file) {
        out << "# series: loaded from " << cfg.series_file->string() << ", " << report.series.values.size()
            << " points\n";
    } else {
        const auto& mg = cfg.mg;
        out << "# series: mackey-glass rk4 dt=" << fmt(mg.dt) << " sample_every=" << mg.sample_every
            << " transient_skip=" << mg.transient_skip << " delay_interpolation=cubic-hermite points="
            << report.series.values.size() << '\n';
    }
    out << "# normalization: min1=" << fmt(report.norm.min1) << " max1=" << fmt(report.norm.max1)
        << " min2=" << fmt(report.norm.min2) << " max2=" << fmt(report.norm.max2) << '\n';
    out << "# patterns: train=" << report.n_train << " test=" << report.n_test << '\n';
    out << "# test feedback: driven by recorded targets, " << eval_start_name(cfg.eval_start) << " start\n";

    out << "seed_index,seed,mode,config,eta,momentum,r_threshold,r_decay,status,final_k,best_epoch,epochs_run,"
           "additions,stop,best_train_sse,rmse_normalized,rmse_denormalized\n";
    for (const auto& r : report.runs) {
        out << r.seed_index << ',' << r.trainer.seed << ',' << mode_name(r.mode) << ',' << r.config_index << ','
            << fmt(r.trainer.eta) << ',' << fmt(r.trainer.momentum) << ',' << fmt(r.trainer.r_threshold) << ','
            << fmt(r.trainer.r_decay) << ',';
        if (r.status == RunStatus::ok) {
            const auto& h = r.history;
            out << "ok," << r.net->block_count() << ',' << h.best_epoch << ',' << h.epochs.size() << ','
                << h.additions.size() << ',' << stop_name(h.stop) << ',' << fmt(h.epochs.at(h.best_epoch - 1).sse)
                << ',' << fmt(r.eval.rmse_normalized) << ',' << fmt(r.eval.rmse_denormalized) << '\n';
        } else {
            out << "diverged,,," << r.history.epochs.size() << ',' << r.history.additions.size() << ",,,,\n";
        }
    }

    auto summary = [&](const ModeSummary& s) {
        out << "# summary " << mode_name(s.mode) << ": best=" << fmt(s.best) << " mean=" << fmt(s.mean)
            << " std=" << fmt(s.stddev) << " (de-normalized RMSE over per-seed bests; std is the sample std)\n";
        out << "# per-seed best " << mode_name(s.mode) << ':';
        for (double v : s.per_seed_best) out << ' ' << fmt(v);
        out << '\n';
    };
    summary(report.primary);
    if (report.baseline) {
        summary(*report.baseline);
        out << "# " << mode_name(cfg.mode) << " beats " << mode_name(report.baseline->mode) << " on "
            << report.baseline_wins << " of " << cfg.n_seeds << " seeds\n";
    }
    return out.str();
}

void write_outputs(const ExperimentReport& report, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    auto write_text = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw IoError("cannot write " + (dir / name).string());
        out << body;
    };
    write_text("report.csv", report_csv(report));

    std::ostringstream timing;
    timing << "seed_index,mode,config,wall_seconds\n";
    for (const auto& r : report.runs)
        timing << r.seed_index << ',' << mode_name(r.mode) << ',' << r.config_index << ',' << r.wall_seconds << '\n';
    write_text("timing.csv", timing.str());

    write_series_csv(dir / "series.csv", report.series.values);
    const auto& best = report.runs.at(report.primary.best_run);
    write_growth_csv(dir / "growth.csv", best.history);
    write_forecast_csv(dir / "forecast.csv", best.eval, report.norm);
    save_model(*best.net, dir / "model.txt");
    write_text("comparison.txt", emit_comparison(report.primary.best, std::string(mode_name(report.config.mode))
      + " (this run)"));
}

} // namespace rpnn
