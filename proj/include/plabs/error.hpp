#pragma once

#include <stdexcept>
#include <string>

namespace plabs {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    SingularSmoothPart,
    SingularShift,
    SingularPiece,
    SingularS,
    SingularIMinusS,
    BasisSingular,
    PivotBreakdown,
    TooLarge,
    UnknownExample,
    BadParams,
    BadAngles,
    Unclassified,
    InvalidDocument,
};

[[nodiscard]] const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace plabs
