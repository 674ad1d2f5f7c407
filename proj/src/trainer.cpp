#include "rpnn/trainer.hpp"

#include "rpnn/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace rpnn {

namespace {

constexpr double product_limit = 1e100;

struct Workspace {
    std::vector<double> z;
    ForwardTrace trace;
};

thread_local Workspace workspace;

// Net weight of a sigma unit on y(t-1), counting e(t-1) = d(t-1) - y(t-1) as -y(t-1).
double feedback_coefficient(std::span<const double> w, FeedbackMode mode, std::size_t m)
{
    switch (mode) {
    case FeedbackMode::none: return 0.0;
    case FeedbackMode::output: return w[m];
    case FeedbackMode::error: return -w[m];
    case FeedbackMode::error_output: return w[m + 1] - w[m];
    }
    return 0.0;
}

double product_except(std::span<const double> h, std::size_t skip)
{
    double p = 1.0;
    for (std::size_t j = 0; j < h.size(); ++j)
        if (j != skip) p *= h[j];
    return p;
}

void assemble_into(std::vector<double>& z, std::span<const double> x, double prev_error, double prev_output,
  FeedbackMode mode)
{
    z.assign(x.begin(), x.end());
    if (has_error_feedback(mode)) z.push_back(prev_error);
    if (has_output_feedback(mode)) z.push_back(prev_output);
}

void check_products(const ForwardTrace& trace, long step)
{
    for (double p : trace.p) {
        if (!std::isfinite(p) || std::abs(p) > product_limit)
            throw NumericDivergence("Pi-Sigma block product left [-1e100, 1e100]", step);
    }
    if (!std::isfinite(trace.y)) throw NumericDivergence("network output is not finite", step);
}

double& param_at(RidgePolyNet& net, std::size_t b, std::size_t j, std::size_t g)
{
    return g < net.input_dim() ? net.weights(b, j)[g] : net.bias(b, j);
}

void validate(const TrainerConfig& cfg)
{
    if (!(cfg.eta >= 0.0) || !(cfg.momentum >= 0.0) || !(cfg.r_threshold >= 0.0))
        throw InvalidInput("eta, momentum and r must be non-negative");
    if (!(cfg.eta_decay > 0.0) || !(cfg.r_decay > 0.0)) throw InvalidInput("decay factors must be positive");
    if (cfg.max_epochs == 0) throw InvalidInput("max_epochs must be at least 1");
    if (cfg.max_blocks == 0) throw InvalidInput("max_blocks must be at least 1");
    if (!(cfg.init_range.lo <= cfg.init_range.hi)) throw InvalidInput("init range is empty");
}

} // namespace

std::string_view gradient_name(GradientMode mode) noexcept
{
    return mode == GradientMode::paper ? "paper" : "exact";
}

GradientMode parse_gradient(std::string_view name)
{
    if (name == "paper") return GradientMode::paper;
    if (name == "exact") return GradientMode::exact;
    throw InvalidInput("unknown gradient mode '" + std::string(name) + "' (expected paper or exact)");
}

std::vector<double> error_sensitivity(const RtrlState& state)
{
    std::vector<double> de(state.dy.size());
    for (std::size_t p = 0; p < de.size(); ++p) de[p] = -state.dy[p];
    return de;
}

RtrlState reset_state(const RidgePolyNet& net)
{
    RtrlState state;
    state.dy.assign(net.trainable_weight_count(), 0.0);
    state.prev_delta.assign(net.trainable_weight_count(), 0.0);
    return state;
}

StepResult rtrl_step(RidgePolyNet& net, RtrlState& state, const Pattern& pattern, const TrainerConfig& cfg)
{
    const std::size_t m = net.m_external();
    const std::size_t dim = net.input_dim();
    if (pattern.inputs.size() != m)
        throw InvalidInput("pattern has " + std::to_string(pattern.inputs.size()) + " inputs, network expects "
          + std::to_string(m));
    const std::size_t n_params = net.trainable_weight_count();
    if (state.dy.size() != n_params || state.prev_delta.size() != n_params)
        throw InvalidInput("RTRL state tracks " + std::to_string(state.dy.size())
          + " weights, network has " + std::to_string(n_params) + " trainable");

    auto& ws = workspace;
    assemble_into(ws.z, pattern.inputs, state.prev_error, state.prev_output, net.mode());
    forward_into(net, ws.z, ws.trace);
    const auto& trace = ws.trace;
    check_products(trace, state.step);

    const double y = trace.y;
    const double slope = y * (1.0 - y);
    const double e = pattern.target - y;

    // dS/dy(t-1) summed over every unit of every block, for the exact recursion.
    double feedback_gain = 0.0;
    if (cfg.gradient == GradientMode::exact) {
        for (std::size_t b = 0; b < net.block_count(); ++b) {
            const auto& h = trace.h[b];
            for (std::size_t j = 0; j < h.size(); ++j)
                feedback_gain += product_except(h, j) * feedback_coefficient(net.weights(b, j), net.mode(), m);
        }
    }

    std::size_t p = 0;
    for (std::size_t b = net.frozen_count(); b < net.block_count(); ++b) {
        const auto& h = trace.h[b];
        for (std::size_t l = 0; l < h.size(); ++l) {
            const double others = product_except(h, l);
            const double c = feedback_coefficient(net.weights(b, l), net.mode(), m);
            for (std::size_t g = 0; g <= dim; ++g, ++p) {
                const double zg = g < dim ? trace.z[g] : 1.0;
                const double prev = state.dy[p];
                state.dy[p] = cfg.gradient == GradientMode::paper
                  ? slope * (others * (zg + prev * c))
                  : slope * (others * zg + feedback_gain * prev);
            }
        }
    }

    p = 0;
    for (std::size_t b = net.frozen_count(); b < net.block_count(); ++b) {
        for (std::size_t l = 0; l < net.block(b).order(); ++l) {
            for (std::size_t g = 0; g <= dim; ++g, ++p) {
                const double delta = cfg.eta * e * state.dy[p] + cfg.momentum * state.prev_delta[p];
                double& w = param_at(net, b, l, g);
                w += delta;
                state.prev_delta[p] = delta;
                if (!std::isfinite(w) || !std::isfinite(state.dy[p]))
                    throw NumericDivergence("weight or sensitivity is not finite", state.step);
            }
        }
    }

    state.prev_error = e;
    state.prev_output = y;
    ++state.step;
    return {e, y};
}

EpochStats train_epoch(RidgePolyNet& net, RtrlState& state, std::span<const Pattern> patterns,
  const TrainerConfig& cfg, const StepObserver& observer)
{
    if (patterns.empty()) throw InvalidInput("cannot train on an empty pattern list");
    EpochStats stats;
    stats.block_count = net.block_count();
    stats.eta_used = cfg.eta;
    stats.r_used = cfg.r_threshold;
    std::size_t flat_steps = 0;
    for (const auto& pattern : patterns) {
        const auto r = rtrl_step(net, state, pattern, cfg);
        stats.sse += 0.5 * r.error * r.error;
        if (r.output * (1.0 - r.output) == 0.0) ++flat_steps;
        if (observer) observer(StepRecord{state.step - 1, r.error, r.output, state.dy});
    }
    if (flat_steps == patterns.size())
        throw NumericDivergence("sigmoid saturated for a whole epoch", state.step - 1);
    return stats;
}

FitResult constructive_fit(std::span<const Pattern> patterns, const TrainerConfig& cfg, FeedbackMode mode,
  const EpochObserver& observer)
{
    if (patterns.empty()) throw InvalidInput("cannot fit an empty pattern list");
    validate(cfg);

    Rng rng(cfg.seed);
    RidgePolyNet net = RidgePolyNet::initial(mode, patterns.front().inputs.size(), cfg.init_range, rng);
    RtrlState state = reset_state(net);
    TrainerConfig live = cfg;

    GrowthHistory history;
    RidgePolyNet best = net;
    double best_sse = std::numeric_limits<double>::infinity();
    double baseline = std::numeric_limits<double>::infinity();

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        EpochStats stats;
        try {
            stats = train_epoch(net, state, patterns, live);
        } catch (const NumericDivergence& e) {
            throw TrainingDiverged(e, history);
        }
        stats.epoch = epoch;
        if (std::isfinite(baseline)) stats.improvement = baseline - stats.sse;
        baseline = stats.sse;

        if (stats.sse < best_sse) {
            best_sse = stats.sse;
            best = net;
            history.best_epoch = epoch;
        }

        const bool stalled = stats.improvement < live.r_threshold;
        const bool grow = stalled && net.block_count() < cfg.max_blocks;
        stats.block_added = grow;
        if (observer) observer(stats, net);
        history.epochs.push_back(stats);

        if (stalled && !grow) {
            history.stop = StopReason::growth_complete;
            break;
        }
        if (grow) {
            net = add_block(std::move(net), cfg.init_range, rng, cfg.max_blocks);
            if (!cfg.freeze_previous) net.set_frozen_count(0);
            live.eta *= cfg.eta_decay;
            live.r_threshold *= cfg.r_decay;
            history.additions.push_back({epoch, net.block_count(), live.eta, live.r_threshold});
            state.dy.assign(net.trainable_weight_count(), 0.0);
            state.prev_delta.assign(net.trainable_weight_count(), 0.0);
            baseline = std::numeric_limits<double>::infinity();
        }
    }
    return {std::move(best), std::move(history)};
}

double relative_error(double a, double b) noexcept
{
    const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
    return std::abs(a - b) / scale;
}

Rollout rollout(const RidgePolyNet& net, std::span<const Pattern> patterns, FeedbackState start)
{
    Rollout result;
    result.outputs.reserve(patterns.size());
    double prev_error = start.prev_error;
    double prev_output = start.prev_output;
    std::vector<double> z;
    ForwardTrace trace;
    long step = 0;
    for (const auto& pattern : patterns) {
        if (pattern.inputs.size() != net.m_external())
            throw InvalidInput("pattern input count does not match the network");
        assemble_into(z, pattern.inputs, prev_error, prev_output, net.mode());
        forward_into(net, z, trace);
        check_products(trace, step++);
        prev_error = pattern.target - trace.y;
        prev_output = trace.y;
        result.outputs.push_back(trace.y);
    }
    result.final_state = {prev_error, prev_output};
    return result;
}

GradientCheckReport gradient_check(const RidgePolyNet& net, std::span<const Pattern> patterns, double epsilon)
{
    if (patterns.empty()) throw InvalidInput("gradient check needs at least one pattern");
    if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");

    auto final_sensitivity = [&](GradientMode gm) {
        TrainerConfig cfg;
        cfg.eta = 0.0;
        cfg.momentum = 0.0;
        cfg.gradient = gm;
        RidgePolyNet copy = net;
        RtrlState state = reset_state(copy);
        for (const auto& pattern : patterns) rtrl_step(copy, state, pattern, cfg);
        return state.dy;
    };
    const auto paper = final_sensitivity(GradientMode::paper);
    const auto exact = final_sensitivity(GradientMode::exact);

    GradientCheckReport report;
    const std::size_t dim = net.input_dim();
    std::size_t p = 0;
    for (std::size_t b = net.frozen_count(); b < net.block_count(); ++b) {
        for (std::size_t l = 0; l < net.block(b).order(); ++l) {
            for (std::size_t g = 0; g <= dim; ++g, ++p) {
                RidgePolyNet plus = net;
                RidgePolyNet minus = net;
                param_at(plus, b, l, g) += epsilon;
                param_at(minus, b, l, g) -= epsilon;
                const double numeric
                  = (rollout(plus, patterns).outputs.back() - rollout(minus, patterns).outputs.back())
                  / (2.0 * epsilon);

                GradientCheckEntry entry{b, l, g, numeric, paper[p], exact[p], 0.0, 0.0};
                entry.paper_rel_error = relative_error(paper[p], numeric);
                entry.exact_rel_error = relative_error(exact[p], numeric);
                report.paper_max_rel_error = std::max(report.paper_max_rel_error, entry.paper_rel_error);
                report.exact_max_rel_error = std::max(report.exact_max_rel_error, entry.exact_rel_error);
                report.paper_mean_rel_error += entry.paper_rel_error;
                report.exact_mean_rel_error += entry.exact_rel_error;
                report.entries.push_back(entry);
            }
        }
    }
    if (!report.entries.empty()) {
        report.paper_mean_rel_error /= static_cast<double>(report.entries.size());
        report.exact_mean_rel_error /= static_cast<double>(report.entries.size());
    }
    return report;
}

void write_growth_csv(const std::filesystem::path& path, const GrowthHistory& history)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "epoch,sse,block_count,eta_used,block_added\n";
    for (const auto& s : history.epochs) {
        out << s.epoch << ',' << text::format_double(s.sse) << ',' << s.block_count << ','
            << text::format_double(s.eta_used) << ',' << (s.block_added ? 1 : 0) << '\n';
    }
}

} // namespace rpnn
