#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dgla {

enum class ErrorKind {
    Parse,
    UnknownGenerator,
    MixedDegrees,
    InvalidInput,
    NotSurjective,
    DegreeBoundExceeded,
    NotAChainMap,
    NotSimplyConnected,
    DegreeBoundTooSmall,
    TargetNotFiniteType,
    NotQuasiIso,
    BaseNotAutomorphism,
    NotMinimal,
    NotWordLengthRaising,
    NotUnipotentRelative,
};

inline std::string_view to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnknownGenerator: return "UnknownGenerator";
    case ErrorKind::MixedDegrees: return "MixedDegrees";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotSurjective: return "NotSurjective";
    case ErrorKind::DegreeBoundExceeded: return "DegreeBoundExceeded";
    case ErrorKind::NotAChainMap: return "NotAChainMap";
    case ErrorKind::NotSimplyConnected: return "NotSimplyConnected";
    case ErrorKind::DegreeBoundTooSmall: return "DegreeBoundTooSmall";
    case ErrorKind::TargetNotFiniteType: return "TargetNotFiniteType";
    case ErrorKind::NotQuasiIso: return "NotQuasiIso";
    case ErrorKind::BaseNotAutomorphism: return "BaseNotAutomorphism";
    case ErrorKind::NotMinimal: return "NotMinimal";
    case ErrorKind::NotWordLengthRaising: return "NotWordLengthRaising";
    case ErrorKind::NotUnipotentRelative: return "NotUnipotentRelative";
    }
    return "Error";
}

/// Every failure raised by the engine carries a kind so callers (the CLI in
/// particular) can map it onto a stable exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

/// Parse failures additionally remember where they happened.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(ErrorKind::Parse, what + " (line " + std::to_string(line) + ", column "
                                      + std::to_string(column) + ")"),
          line_(line), column_(column), bare_(what)
    {
    }

    /// The message without kind prefix and position.
    const std::string& bare() const noexcept { return bare_; }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string bare_;
};

} // namespace dgla
