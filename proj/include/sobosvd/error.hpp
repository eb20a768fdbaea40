#pragma once

#include <stdexcept>
#include <string>

namespace sobosvd {

enum class ErrorCode {
    InvalidAxis,
    Sampling,
    AxisMismatch,
    ModeOutOfRange,
    InvalidAlpha,
    ShapeMismatch,
    NonFinite,
    InvalidWeights,
    DegenerateMode,
    InvalidRank,
    MissingDerivativeData,
    InsufficientRank,
    EmptyProbes,
    TooFewPoints,
    DegenerateInput,
    UnknownCase,
    Config,
    Io,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (tests, the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sobosvd
