#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ando {

enum class ErrorKind {
    InvalidInput,
    ShapeMismatch,
    NotPSD,
    NotContraction,
    NotCommuting,
    NotIntertwining,
    NotPure,
    NotCNU,
    MarginViolation,
    IllConditioned,
    PadFailure,
    InternalError,
};

std::string_view to_string(ErrorKind kind);

/// Every library failure carries a kind so the CLI can map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ando
