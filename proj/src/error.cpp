#include "heptapile/error.hpp"

namespace heptapile {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Checksum: return "checksum";
    case ErrorCode::Invariant: return "invariant";
    case ErrorCode::Io: return "io";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::Overflow: return "overflow";
    case ErrorCode::Mismatch: return "mismatch";
    case ErrorCode::Budget: return "budget";
    }
    return "unknown";
}

} // namespace heptapile
