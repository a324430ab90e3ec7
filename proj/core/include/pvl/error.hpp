#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pvl {

enum class ErrorCode {
    InvalidField,
    OutOfDomain,
    UnsupportedOrder,
    Margin,
    GridCompatibility,
    Arity,
    SingularAxis,
    AxisRegularity,
    NotCompactlySupported,
    Axis,
    SolverFailure,
    Parameter,
    UnsupportedInput,
    WindowOverflow,
    StepSize,
    Format,
    Config,
    Divergence,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to a diagnostic without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what)
{
    if (!condition)
        fail(code, what);
}

} // namespace pvl
