#include "rpnn/network.hpp"

#include "rpnn/error.hpp"
#include "rpnn/text.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rpnn {

std::string_view mode_name(FeedbackMode mode) noexcept
{
    switch (mode) {
    case FeedbackMode::none: return "rpnn";
    case FeedbackMode::output: return "drpnn";
    case FeedbackMode::error: return "rpnn-ef";
    case FeedbackMode::error_output: return "rpnn-eof";
    }
    return "rpnn";
}

FeedbackMode parse_mode(std::string_view name)
{
    for (auto m : {FeedbackMode::none, FeedbackMode::output, FeedbackMode::error,
           FeedbackMode::error_output}) {
        if (name == mode_name(m)) return m;
    }
    throw InvalidInput("unknown feedback mode '" + std::string(name)
      + "' (expected rpnn, drpnn, rpnn-ef or rpnn-eof)");
}

namespace {

PiSigmaBlock random_block(std::size_t order, std::size_t dim, InitRange range, Rng& rng)
{
    PiSigmaBlock block;
    block.units.resize(order);
    for (auto& unit : block.units) {
        unit.weights.resize(dim);
        for (auto& w : unit.weights) w = rng.uniform(range.lo, range.hi);
        unit.bias = rng.uniform(range.lo, range.hi);
    }
    return block;
}

} // namespace

RidgePolyNet::RidgePolyNet(FeedbackMode mode, std::size_t m_external, std::vector<PiSigmaBlock> blocks,
  std::size_t frozen_count)
  : mode_{mode}
  , m_external_{m_external}
  , blocks_{std::move(blocks)}
  , frozen_count_{frozen_count}
{
    if (m_external_ == 0) throw InvalidInput("network needs at least one external input");
    if (blocks_.empty()) throw InvalidInput("network needs at least one Pi-Sigma block");
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (blocks_[b].order() != b + 1)
            throw InvalidInput("block " + std::to_string(b + 1) + " has order "
              + std::to_string(blocks_[b].order()));
        for (const auto& unit : blocks_[b].units) {
            if (unit.weights.size() != input_dim())
                throw InvalidInput("sigma unit has " + std::to_string(unit.weights.size())
                  + " weights, expected " + std::to_string(input_dim()));
        }
    }
    set_frozen_count(frozen_count_);
}

RidgePolyNet RidgePolyNet::initial(FeedbackMode mode, std::size_t m_external, InitRange range, Rng& rng)
{
    const std::size_t dim = m_external + feedback_count(mode);
    return RidgePolyNet(mode, m_external, {random_block(1, dim, range, rng)});
}

RidgePolyNet RidgePolyNet::zeros(FeedbackMode mode, std::size_t m_external, std::size_t k,
  std::size_t frozen_count)
{
    const std::size_t dim = m_external + feedback_count(mode);
    std::vector<PiSigmaBlock> blocks(k);
    for (std::size_t b = 0; b < k; ++b)
        blocks[b].units.assign(b + 1, SigmaUnit{std::vector<double>(dim, 0.0), 0.0});
    return RidgePolyNet(mode, m_external, std::move(blocks), frozen_count);
}

void RidgePolyNet::set_frozen_count(std::size_t n)
{
    if (n >= blocks_.size())
        throw InvalidInput("frozen_count " + std::to_string(n) + " must be below block count "
          + std::to_string(blocks_.size()));
    frozen_count_ = n;
}

std::size_t RidgePolyNet::trainable_weight_count() const noexcept
{
    std::size_t n = 0;
    for (std::size_t b = frozen_count_; b < blocks_.size(); ++b)
        n += blocks_[b].order() * (input_dim() + 1);
    return n;
}

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> assemble_inputs(std::span<const double> x, double prev_error, double prev_output,
  FeedbackMode mode, std::size_t m_external)
{
    if (x.size() != m_external)
        throw InvalidInput("expected " + std::to_string(m_external) + " external inputs, got "
          + std::to_string(x.size()));
    std::vector<double> z(x.begin(), x.end());
    z.reserve(m_external + 2);
    if (has_error_feedback(mode)) z.push_back(prev_error);
    if (has_output_feedback(mode)) z.push_back(prev_output);
    return z;
}

ForwardTrace forward(const RidgePolyNet& net, std::span<const double> z)
{
    ForwardTrace trace;
    forward_into(net, z, trace);
    return trace;
}

void forward_into(const RidgePolyNet& net, std::span<const double> z, ForwardTrace& trace)
{
    if (z.size() != net.input_dim())
        throw InvalidInput("input vector has " + std::to_string(z.size()) + " entries, network expects "
          + std::to_string(net.input_dim()));

    trace.z.assign(z.begin(), z.end());
    trace.h.resize(net.block_count());
    trace.p.resize(net.block_count());
    double sum = 0.0;
    for (std::size_t b = 0; b < net.block_count(); ++b) {
        const auto& block = net.block(b);
        auto& hb = trace.h[b];
        hb.resize(block.order());
        double product = 1.0;
        for (std::size_t j = 0; j < block.order(); ++j) {
            const auto& unit = block.units[j];
            double h = 0.0;
            for (std::size_t g = 0; g < z.size(); ++g) h += unit.weights[g] * z[g];
            h += unit.bias;
            hb[j] = h;
            product *= h;
        }
        trace.p[b] = product;
        sum += product;
    }
    trace.net_sum = sum;
    trace.y = sigmoid(sum);
}

RidgePolyNet add_block(RidgePolyNet net, InitRange range, Rng& rng, std::size_t max_blocks)
{
    const std::size_t k = net.block_count();
    if (k >= max_blocks)
        throw GrowthExhausted("network already has " + std::to_string(k) + " blocks (maximum "
          + std::to_string(max_blocks) + ")");
    net.blocks_.push_back(random_block(k + 1, net.input_dim(), range, rng));
    net.frozen_count_ = k;
    return net;
}

std::string to_text(const RidgePolyNet& net)
{
    std::ostringstream out;
    out << "rpnn-model 1 " << mode_name(net.mode()) << ' ' << net.m_external() << ' '
        << net.block_count() << ' ' << net.frozen_count() << '\n';
    for (std::size_t b = 0; b < net.block_count(); ++b) {
        const auto& block = net.block(b);
        for (std::size_t j = 0; j < block.order(); ++j) {
            const auto& unit = block.units[j];
            out << b + 1 << ' ' << j + 1 << ' ' << text::format_double(unit.bias);
            for (double w : unit.weights) out << ' ' << text::format_double(w);
            out << '\n';
        }
    }
    return out.str();
}

RidgePolyNet from_text(std::string_view content)
{
    auto lines = text::split(content, '\n');
    std::size_t lineno = 0;
    auto next_line = [&]() -> std::string_view {
        while (lineno < lines.size()) {
            auto line = text::trim(lines[lineno++]);
            if (!line.empty()) return line;
        }
        throw ParseError("unexpected end of model file", lineno);
    };
    auto as_int = [&](std::string_view s) {
        auto v = text::parse_int(s);
        if (!v || *v < 0) throw ParseError("expected a non-negative integer, got '" + std::string(s) + "'", lineno);
        return static_cast<std::size_t>(*v);
    };
    auto as_double = [&](std::string_view s) {
        auto v = text::parse_double(s);
        if (!v) throw ParseError("expected a number, got '" + std::string(s) + "'", lineno);
        return *v;
    };

    const auto header = text::split_ws(next_line());
    if (header.size() != 6 || header[0] != "rpnn-model")
        throw ParseError("bad model header", lineno);
    if (header[1] != "1") throw ParseError("unsupported model version " + std::string(header[1]), lineno);
    const FeedbackMode mode = parse_mode(header[2]);
    const std::size_t m = as_int(header[3]);
    const std::size_t k = as_int(header[4]);
    const std::size_t frozen = as_int(header[5]);
    const std::size_t dim = m + feedback_count(mode);

    std::vector<PiSigmaBlock> blocks(k);
    for (std::size_t b = 0; b < k; ++b) {
        blocks[b].units.resize(b + 1);
        for (std::size_t j = 0; j <= b; ++j) {
            const auto fields = text::split_ws(next_line());
            if (fields.size() != 3 + dim)
                throw ParseError("sigma unit line needs " + std::to_string(3 + dim) + " fields", lineno);
            if (as_int(fields[0]) != b + 1 || as_int(fields[1]) != j + 1)
                throw ParseError("sigma units out of order", lineno);
            auto& unit = blocks[b].units[j];
            unit.bias = as_double(fields[2]);
            unit.weights.resize(dim);
            for (std::size_t g = 0; g < dim; ++g) unit.weights[g] = as_double(fields[3 + g]);
        }
    }
    return RidgePolyNet(mode, m, std::move(blocks), frozen);
}

void save_model(const RidgePolyNet& net, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_text(net);
}

RidgePolyNet load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

} // namespace rpnn
