#pragma once

#include <stdexcept>
#include <string>

namespace caginalp {

inline constexpr const char* kToolVersion = "0.1.0";

/// Invalid configuration or argument; maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during a solve; maps to CLI exit code 2.
class SolverError : public std::runtime_error {
public:
  enum class Kind { InnerDivergence, DomainEscape, NonFinite };

  SolverError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

  const char* kind_name() const {
    switch (kind_) {
      case Kind::InnerDivergence: return "InnerDivergence";
      case Kind::DomainEscape: return "DomainEscape";
      case Kind::NonFinite: return "NonFinite";
    }
    return "Unknown";
  }

private:
  Kind kind_;
};

}  // namespace caginalp
