#include "rpnn/error.hpp"

namespace rpnn {

std::string_view category_name(ErrorCategory c) noexcept
{
    switch (c) {
    case ErrorCategory::invalid_input: return "invalid-input";
    case ErrorCategory::growth_exhausted: return "growth-exhausted";
    case ErrorCategory::numeric_divergence: return "numeric-divergence";
    case ErrorCategory::degenerate_range: return "degenerate-range";
    case ErrorCategory::parse_error: return "parse-error";
    case ErrorCategory::out_of_range: return "out-of-range";
    case ErrorCategory::io_error: return "io-error";
    }
    return "unknown";
}

} // namespace rpnn
