#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bioinsure {

/// An input violated a type invariant. `field()` carries the dotted path of
/// the offending field, e.g. "service.sigma_0".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + " " + message), field_(std::move(field)), detail_(message) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string field_;
  std::string detail_;
};

/// A biodiversity level (or a finite-difference stencil) fell outside the
/// scenario's v_bounds.
class OutOfBoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// The requested quantity has no unique value, e.g. optimal coverage for a
/// risk-neutral manager facing fair insurance.
class IndeterminateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation produced a non-finite value or failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bioinsure
