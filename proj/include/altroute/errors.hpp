#pragma once

#include <stdexcept>
#include <string>

namespace altroute {

// Error taxonomy: every throw carries a message naming the offending
// record(s), so callers can surface actionable diagnostics.

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error("parse error: " + msg) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg)
      : std::runtime_error("validation error: " + msg) {}
};

struct RoutingError : std::runtime_error {
  explicit RoutingError(const std::string& msg) : std::runtime_error("routing error: " + msg) {}
};

struct MiningError : std::runtime_error {
  explicit MiningError(const std::string& msg) : std::runtime_error("mining error: " + msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error("configuration error: " + msg) {}
};

struct DemandError : std::runtime_error {
  explicit DemandError(const std::string& msg) : std::runtime_error("demand error: " + msg) {}
};

struct SimError : std::runtime_error {
  explicit SimError(const std::string& msg) : std::runtime_error("simulation error: " + msg) {}
};

}  // namespace altroute
