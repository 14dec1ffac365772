#pragma once

#include <stdexcept>
#include <string>

namespace lvc {

/// Malformed or unsupported problem configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Characteristic integration failed (non-finite state or non-positive Jacobian).
class FlowError : public std::runtime_error {
public:
    FlowError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Degenerate or wrongly oriented boundary polygon.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lvc
