#pragma once

// Reference implementations used as test oracles. They read network weights
// through the public accessors only and recompute everything else from scratch.

#include "rpnn/dataset.hpp"
#include "rpnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Unit {
    std::vector<double> w;
    double b;
};

struct Net {
    rpnn::FeedbackMode mode;
    std::size_t m;
    std::vector<std::vector<Unit>> blocks;
    std::size_t frozen;
};

inline Net copy(const rpnn::RidgePolyNet& net)
{
    Net out{net.mode(), net.m_external(), {}, net.frozen_count()};
    for (std::size_t b = 0; b < net.block_count(); ++b) {
        std::vector<Unit> units;
        for (std::size_t j = 0; j < net.block(b).order(); ++j) {
            const auto w = net.weights(b, j);
            units.push_back({std::vector<double>(w.begin(), w.end()), net.bias(b, j)});
        }
        out.blocks.push_back(std::move(units));
    }
    return out;
}

inline double output(const Net& net, const std::vector<double>& z)
{
    double s = 0.0;
    for (const auto& block : net.blocks) {
        double p = 1.0;
        for (const auto& u : block) {
            double h = u.b;
            for (std::size_t i = 0; i < z.size(); ++i) h += u.w[i] * z[i];
            p *= h;
        }
        s += p;
    }
    return logistic(s);
}

inline std::vector<double> inputs(const Net& net, const std::vector<double>& x, double e, double y)
{
    std::vector<double> z = x;
    if (net.mode == rpnn::FeedbackMode::error || net.mode == rpnn::FeedbackMode::error_output) z.push_back(e);
    if (net.mode == rpnn::FeedbackMode::output || net.mode == rpnn::FeedbackMode::error_output) z.push_back(y);
    return z;
}

/// Outputs of the whole sequence with fixed weights, starting from e = y = 0.5.
inline std::vector<double> run(const Net& net, const std::vector<rpnn::Pattern>& patterns)
{
    std::vector<double> ys;
    double e = 0.5;
    double y = 0.5;
    for (const auto& p : patterns) {
        const double out = output(net, inputs(net, p.inputs, e, y));
        e = p.target - out;
        y = out;
        ys.push_back(out);
    }
    return ys;
}

/// Trainable parameters in RTRL order: block, unit, then weights followed by the bias.
inline std::vector<double*> trainable(Net& net)
{
    std::vector<double*> out;
    for (std::size_t b = net.frozen; b < net.blocks.size(); ++b)
        for (auto& u : net.blocks[b]) {
            for (auto& w : u.w) out.push_back(&w);
            out.push_back(&u.b);
        }
    return out;
}

/// Central difference of y(T) with respect to every trainable parameter.
inline std::vector<double> numeric_final_gradient(const rpnn::RidgePolyNet& source,
  const std::vector<rpnn::Pattern>& patterns, double eps)
{
    Net net = copy(source);
    auto params = trainable(net);
    std::vector<double> grad;
    for (double* p : params) {
        const double keep = *p;
        *p = keep + eps;
        const double up = run(net, patterns).back();
        *p = keep - eps;
        const double down = run(net, patterns).back();
        *p = keep;
        grad.push_back((up - down) / (2.0 * eps));
    }
    return grad;
}

inline double rel_error(double a, double b)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

/// Smooth synthetic sequence in [0.2, 0.8] with M inputs per pattern.
inline std::vector<rpnn::Pattern> synthetic(std::size_t m, std::size_t steps)
{
    std::vector<rpnn::Pattern> out;
    for (std::size_t t = 0; t < steps; ++t) {
        rpnn::Pattern p;
        p.t_index = t;
        for (std::size_t i = 0; i < m; ++i)
            p.inputs.push_back(0.5 + 0.3 * std::sin(0.37 * static_cast<double>(t) + 1.1 * static_cast<double>(i)));
        p.target = 0.5 + 0.25 * std::cos(0.29 * static_cast<double>(t));
        out.push_back(p);
    }
    return out;
}

} // namespace oracle
