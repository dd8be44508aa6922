#pragma once

#include <stdexcept>
#include <string>

namespace weaver {

enum class ErrorCode {
    invalid_argument = 1,
    parse_error = 2,
    model_invariant = 3,
    singular_evaluation = 4,
    size_cap = 5,
    io_error = 6,
    numeric_failure = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace weaver
