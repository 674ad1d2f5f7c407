#include "rpnn/dataset.hpp"

#include "rpnn/error.hpp"
#include "rpnn/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace rpnn {

namespace {

// Fixed-capacity window over the last `capacity` integrator points, holding the
// state and its derivative. Indices are absolute step numbers; anything before
// step 0 reads the constant pre-history.
class History {
public:
    History(std::size_t capacity, double pre_value)
      : x_(capacity, pre_value)
      , dx_(capacity, 0.0)
      , pre_value_{pre_value}
    {
    }

    void push(long step, double x) { x_[slot(step)] = x; }
    void set_derivative(long step, double dx) { dx_[slot(step)] = dx; }

    double at(long step) const { return step < 0 ? pre_value_ : x_[slot(step)]; }

    /// Value halfway between steps `step` and `step + 1` by cubic Hermite
    /// interpolation; the pre-history is flat.
    double midpoint(long step, double dt) const
    {
        if (step < 0) return pre_value_;
        const double xa = at(step);
        const double xb = at(step + 1);
        const double fa = dx_[slot(step)];
        const double fb = dx_[slot(step + 1)];
        return 0.5 * (xa + xb) + dt / 8.0 * (fa - fb);
    }

private:
    std::size_t slot(long step) const { return static_cast<std::size_t>(step) % x_.size(); }

    std::vector<double> x_;
    std::vector<double> dx_;
    double pre_value_;
};

} // namespace

Series generate_mackey_glass(const MgParams& p)
{
    if (!(p.dt > 0.0)) throw InvalidInput("dt must be positive");
    if (p.n_points == 0) throw InvalidInput("n_points must be at least 1");
    if (p.sample_every == 0) throw InvalidInput("sample_every must be at least 1");
    if (!(p.tau > 0.0)) throw InvalidInput("tau must be positive");
    const double ratio = p.tau / p.dt;
    const double lag_real = std::round(ratio);
    if (std::abs(ratio - lag_real) > 1e-9 * std::max(1.0, ratio) || lag_real < 1.0)
        throw InvalidInput("tau/dt must be a positive integer, got " + text::format_double(ratio));
    const long lag = static_cast<long>(lag_real);

    auto rhs = [&](double x, double delayed) {
        return p.beta * x + p.alpha * delayed / (1.0 + std::pow(delayed, 10));
    };

    // Needs x(t_n - tau) and x(t_n + dt - tau), i.e. steps n - lag and n - lag + 1.
    History history(static_cast<std::size_t>(lag) + 1, p.x0);

    const std::size_t first_step = p.transient_skip * p.sample_every;
    const std::size_t last_step = (p.transient_skip + p.n_points - 1) * p.sample_every;

    Series series;
    series.params = p;
    series.values.reserve(p.n_points);

    double x = p.x0;
    history.push(0, x);
    if (first_step == 0) series.values.push_back(x);

    const double half = 0.5 * p.dt;
    for (std::size_t n = 0; n < last_step; ++n) {
        const long step = static_cast<long>(n);
        const double d0 = history.at(step - lag);
        const double d1 = history.at(step - lag + 1);

        const double k1 = rhs(x, d0);
        history.set_derivative(step, k1);
        const double dmid = history.midpoint(step - lag, p.dt);
        const double k2 = rhs(x + half * k1, dmid);
        const double k3 = rhs(x + half * k2, dmid);
        const double k4 = rhs(x + p.dt * k3, d1);
        x += p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (!std::isfinite(x))
            throw NumericDivergence("Mackey-Glass state is not finite", step + 1);
        history.push(step + 1, x);

        const std::size_t done = n + 1;
        if (done >= first_step && (done - first_step) % p.sample_every == 0) series.values.push_back(x);
    }
    return series;
}

NormParams fit_norm(std::span<const double> values, double min2, double max2)
{
    if (values.empty()) throw InvalidInput("cannot fit normalization to an empty series");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    NormParams np{*lo, *hi, min2, max2};
    if (!(np.max1 > np.min1)) throw DegenerateRange("series is constant; min and max coincide");
    if (!(np.max2 > np.min2)) throw DegenerateRange("target interval is empty");
    return np;
}

double normalize(double x, const NormParams& np)
{
    if (!(np.max1 > np.min1)) throw DegenerateRange("normalization range is degenerate");
    return (np.max2 - np.min2) * ((x - np.min1) / (np.max1 - np.min1)) + np.min2;
}

double denormalize(double v, const NormParams& np)
{
    if (!(np.max1 > np.min1)) throw DegenerateRange("normalization range is degenerate");
    return (v - np.min2) / (np.max2 - np.min2) * (np.max1 - np.min1) + np.min1;
}

std::vector<double> normalize(std::span<const double> xs, const NormParams& np)
{
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(normalize(x, np));
    return out;
}

std::vector<double> denormalize(std::span<const double> vs, const NormParams& np)
{
    std::vector<double> out;
    out.reserve(vs.size());
    for (double v : vs) out.push_back(denormalize(v, np));
    return out;
}

std::vector<Pattern> build_patterns(std::span<const double> s, std::span<const std::size_t> lags,
  std::size_t horizon)
{
    if (lags.empty()) throw InvalidInput("at least one lag is required");
    const std::size_t max_lag = *std::max_element(lags.begin(), lags.end());
    if (s.size() <= max_lag + horizon)
        throw InvalidInput("series of length " + std::to_string(s.size()) + " is too short for max lag "
          + std::to_string(max_lag) + " and horizon " + std::to_string(horizon));

    std::vector<Pattern> patterns;
    patterns.reserve(s.size() - max_lag - horizon);
    for (std::size_t t = max_lag; t + horizon < s.size(); ++t) {
        Pattern pat;
        pat.t_index = t;
        pat.inputs.reserve(lags.size());
        for (std::size_t lag : lags) pat.inputs.push_back(s[t - lag]);
        pat.target = s[t + horizon];
        patterns.push_back(std::move(pat));
    }
    return patterns;
}

PatternSplit split_patterns(std::span<const Pattern> patterns, SplitRule rule, std::size_t boundary)
{
    PatternSplit split;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const bool train = rule == SplitRule::by_anchor ? patterns[i].t_index < boundary : i < boundary;
        (train ? split.train : split.test).push_back(patterns[i]);
    }
    return split;
}

void write_series_csv(const std::filesystem::path& path, std::span<const double> values)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t,x\n";
    for (std::size_t t = 0; t < values.size(); ++t) out << t << ',' << text::format_double(values[t]) << '\n';
}

Series read_series_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    Series series;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        if (lineno == 1 && trimmed == "t,x") continue;
        const auto fields = text::split(trimmed, ',');
        if (fields.size() != 2) throw ParseError("expected `t,x`", lineno);
        const auto t = text::parse_int(fields[0]);
        const auto x = text::parse_double(fields[1]);
        if (!t || !x) throw ParseError("malformed series row", lineno);
        if (static_cast<std::size_t>(*t) != series.values.size())
            throw ParseError("series index " + std::to_string(*t) + " out of sequence", lineno);
        if (!std::isfinite(*x)) throw ParseError("non-finite series value", lineno);
        series.values.push_back(*x);
    }
    if (series.values.empty()) throw InvalidInput(path.string() + " holds no series values");
    return series;
}

void write_patterns_csv(const std::filesystem::path& path, std::span<const Pattern> patterns,
  std::span<const std::size_t> lags)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << 't';
    for (std::size_t lag : lags) out << ",x" << lag;
    out << ",target\n";
    for (const auto& p : patterns) {
        out << p.t_index;
        for (double v : p.inputs) out << ',' << text::format_double(v);
        out << ',' << text::format_double(p.target) << '\n';
    }
}

} // namespace rpnn
