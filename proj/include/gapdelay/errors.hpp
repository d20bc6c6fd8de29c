#pragma once

#include <stdexcept>
#include <string>

namespace gapdelay {

/// Rejected input: violated precondition, malformed scenario, unknown preset.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerically ill-posed evaluation, e.g. a singular gain-gain FIM block.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gapdelay
