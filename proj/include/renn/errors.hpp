#pragma once

#include <stdexcept>
#include <string>

namespace renn {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration (variant, channel, class names...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure while training (non-finite gradients, loss blow-up).
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Broken internal contract, e.g. a stale forward cache or an OOD sample in a labeled loss term.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace renn
