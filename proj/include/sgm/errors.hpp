#pragma once

#include <stdexcept>
#include <string>

namespace sgm {

// Raised when a scheme step would drive gamma (or an activator value) out of
// the positive cone.  Callers may retry at a smaller step; see run_trajectory.
class PositivityError : public std::runtime_error {
public:
    explicit PositivityError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the activator sup-norm crosses the configured threshold (or
// stops being finite).
class BlowUpError : public std::runtime_error {
public:
    explicit BlowUpError(double sup, const std::string& context = "")
        : std::runtime_error("activator sup-norm " + std::to_string(sup) +
                             " exceeded the blow-up threshold" +
                             (context.empty() ? "" : " (" + context + ")")),
          sup_norm(sup) {}
    double sup_norm;
};

// Raised by the fixed-point solver when successive iterate distances fail to
// decay for three consecutive iterations (or become non-finite).
class NonContractionError : public std::runtime_error {
public:
    explicit NonContractionError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed config files or inconsistent run settings.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sgm
