#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsw {

/// Violated call contract (shape mismatch, bad argument ranges).
class ContractError : public std::logic_error {
public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Invalid run configuration (bad grid/data/equation combination).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A right-hand side could not be evaluated because a denominator or
/// square-root argument dropped to the degeneracy threshold. Carries the
/// offending lattice point, the value found there, and the evaluation time.
class DegeneracyError : public std::runtime_error {
public:
  enum class Kind { DenominatorDegenerate, TimelikeViolation };

  DegeneracyError(Kind kind, std::size_t flat_index, double value, double time)
      : std::runtime_error(describe(kind, flat_index, value, time)),
        kind_(kind), flat_index_(flat_index), value_(value), time_(time) {}

  Kind kind() const { return kind_; }
  std::size_t flat_index() const { return flat_index_; }
  double value() const { return value_; }
  double time() const { return time_; }

private:
  static std::string describe(Kind kind, std::size_t idx, double value, double time) {
    std::string name = (kind == Kind::DenominatorDegenerate)
                           ? "degenerate denominator"
                           : "timelike condition violated";
    return name + " at flat index " + std::to_string(idx) + " (value " +
           std::to_string(value) + ", t=" + std::to_string(time) + ")";
  }

  Kind kind_;
  std::size_t flat_index_;
  double value_;
  double time_;
};

} // namespace dsw
