#pragma once

#include <stdexcept>
#include <string>

namespace heptapile {

enum class ErrorCode {
    InvalidArgument = 1,
    Capacity,
    Parse,
    Checksum,
    Invariant,
    Io,
    Unstable,
    Overflow,
    Mismatch,
    Budget,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library is an Error carrying a code, so the C
// layer can map it onto a status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Thrown by structural validation; `invariant()` names the rule that broke.
class InvariantError : public Error {
public:
    InvariantError(std::string invariant, const std::string& detail)
        : Error(ErrorCode::Invariant, "invariant '" + invariant + "' violated: " + detail),
          invariant_(std::move(invariant)) {}

    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

} // namespace heptapile
