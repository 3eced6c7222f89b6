#pragma once

#include <stdexcept>
#include <string>

namespace qtno {

// Bad user-facing configuration: unknown ids, malformed parameters.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// A truncation window cannot certify the requested coefficients: a Laurent
// exponent left its window, or an extraction reached past an exactness
// horizon.
struct WindowError : std::runtime_error {
    explicit WindowError(const std::string& m) : std::runtime_error(m) {}
};

// Structural misuse: inverting a non-unit, divergent infinite product,
// mismatched variable tables.
struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace qtno
