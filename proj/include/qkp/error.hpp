#pragma once

#include <stdexcept>
#include <string>

namespace qkp {

/// Raised by every math module when a precondition on exact data fails
/// (zero divisor, pole, non-unit constant term, exhausted truncation depth).
class MathError : public std::runtime_error {
public:
    explicit MathError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qkp
