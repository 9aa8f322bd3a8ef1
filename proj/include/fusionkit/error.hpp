#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fusionkit {

enum class ErrorKind {
  AllZero,
  NotSymmetric,
  NotPD,
  DimMismatch,
  ShapeMismatch,
  NotFinite,
  NotADual,
  NotInSubspace,
  SpanMismatch,
  NotAFrame,
  ZeroVector,
  Singular,
  EmptyBlock,
  IndexOutOfRange,
  InvalidArgument,
  HypothesisViolated,
  NotAPerturbation,
  SchemaError,
  BadDims,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// A closed-form robustness bound whose hypothesis failed. `margin` is the
/// value that was required to be positive.
class HypothesisViolated : public Error {
public:
  HypothesisViolated(const std::string& what, double margin)
      : Error(ErrorKind::HypothesisViolated, what + " (margin " + std::to_string(margin) + ")"),
        margin_(margin) {}

  [[nodiscard]] double margin() const noexcept { return margin_; }

private:
  double margin_;
};

}  // namespace fusionkit
