#pragma once

#include <stdexcept>
#include <string>

namespace eitmem {

/// Invalid or inconsistent experiment description.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite amplitudes during time integration.
class NumericalInstability : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace eitmem
