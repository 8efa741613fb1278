#pragma once

#include <stdexcept>
#include <string>

namespace nli {

/// Invalid arguments or configuration. The CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that cannot produce a meaningful number (eigensolver
/// failure, vanishing phase response, no interior minimum). Exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nli
