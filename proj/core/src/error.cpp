#include "pvl/error.hpp"

namespace pvl {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidField: return "invalid-field";
    case ErrorCode::OutOfDomain: return "out-of-domain";
    case ErrorCode::UnsupportedOrder: return "unsupported-order";
    case ErrorCode::Margin: return "margin";
    case ErrorCode::GridCompatibility: return "grid-compatibility";
    case ErrorCode::Arity: return "arity";
    case ErrorCode::SingularAxis: return "singular-axis";
    case ErrorCode::AxisRegularity: return "axis-regularity";
    case ErrorCode::NotCompactlySupported: return "not-compactly-supported";
    case ErrorCode::Axis: return "axis";
    case ErrorCode::SolverFailure: return "solver-failure";
    case ErrorCode::Parameter: return "parameter";
    case ErrorCode::UnsupportedInput: return "unsupported-input";
    case ErrorCode::WindowOverflow: return "window-overflow";
    case ErrorCode::StepSize: return "step-size";
    case ErrorCode::Format: return "format";
    case ErrorCode::Config: return "config";
    case ErrorCode::Divergence: return "divergence";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace pvl
