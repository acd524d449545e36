#pragma once

#include <stdexcept>
#include <string>

namespace magblock {

enum class ErrorCode {
    invalid_argument = 1,
    dimension_mismatch,
    dimension_overflow,
    singular,
    non_unique_steady_state,
    not_converged,
    undefined_correlation,
    config,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so the C layer can map
// it onto a status value without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace magblock
