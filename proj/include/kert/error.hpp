#pragma once

#include <stdexcept>
#include <string>

namespace kert {

/// Rejected input: bad configuration, violated precondition, malformed file.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A solve or decomposition did not meet its accuracy contract.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No eigenpair of the difference operator can drive a reconstruction,
/// either because every eigenvalue sits at the noise floor or because the
/// selected one admits no admissible power budget.
class NoUsableEigenpair : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kert
