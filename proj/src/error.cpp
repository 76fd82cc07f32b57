#include "psusp/error.hpp"

namespace psusp {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_point: return "invalid-point";
        case ErrorKind::domain: return "domain";
        case ErrorKind::config: return "config";
        case ErrorKind::capacity: return "capacity";
        case ErrorKind::resolution: return "resolution";
        case ErrorKind::unsupported_conjugacy: return "unsupported-conjugacy";
        case ErrorKind::precondition: return "precondition";
    }
    return "unknown";
}

}  // namespace psusp
