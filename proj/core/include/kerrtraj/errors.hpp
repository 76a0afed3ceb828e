#pragma once

#include <stdexcept>
#include <string>

namespace kerrtraj {

/// Invalid user-facing configuration (bad parameters, bad method/scheme pairing).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Fock truncation no longer holds (tail mass above threshold) or the
/// deterministic norm started growing, which signals integrator instability.
class TruncationError : public std::runtime_error {
public:
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A variational state left its validity regime (density floor, Heisenberg
/// bound, post-jump positivity).
class ValidityError : public std::runtime_error {
public:
    explicit ValidityError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace kerrtraj
