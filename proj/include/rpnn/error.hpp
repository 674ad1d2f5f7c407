#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rpnn {

enum class ErrorCategory {
    invalid_input,
    growth_exhausted,
    numeric_divergence,
    degenerate_range,
    parse_error,
    out_of_range,
    io_error,
};

/// Stable, machine-parseable name used by the CLI on failure.
std::string_view category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what)
      , category_{category}
    {
    }

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(ErrorCategory::invalid_input, what) {}
};

class GrowthExhausted : public Error {
public:
    explicit GrowthExhausted(const std::string& what)
      : Error(ErrorCategory::growth_exhausted, what)
    {
    }
};

class DegenerateRange : public Error {
public:
    explicit DegenerateRange(const std::string& what)
      : Error(ErrorCategory::degenerate_range, what)
    {
    }
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
      : Error(ErrorCategory::parse_error, "line " + std::to_string(line) + ": " + what)
      , line_{line}
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& what) : Error(ErrorCategory::out_of_range, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io_error, what) {}
};

/// Raised when a training or evaluation rollout produces non-finite or exploding values.
/// `step` is the zero-based global step counter of the offending step.
class NumericDivergence : public Error {
public:
    NumericDivergence(const std::string& what, long step)
      : Error(ErrorCategory::numeric_divergence, what + " (step " + std::to_string(step) + ")")
      , step_{step}
    {
    }

    long step() const noexcept { return step_; }

private:
    long step_;
};

} // namespace rpnn
