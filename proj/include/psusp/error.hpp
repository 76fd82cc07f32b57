#pragma once

#include <stdexcept>
#include <string>

namespace psusp {

/// Failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
    invalid_point,          // symbol sequence violates its system
    domain,                 // argument outside the operation's domain
    config,                 // malformed or inconsistent configuration
    capacity,               // symbol window too small for the requested orbit
    resolution,             // geometric construction collapsed below resolution
    unsupported_conjugacy,  // conjugating map cannot be inverted
    precondition,           // a required earlier check did not hold
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace psusp
