#pragma once

#include <cmath>

#include "fanbase/errors.hpp"

namespace fanbase {

enum class LossKind { Huber, SquaredError };

/// Elementwise fitting loss. Huber is quadratic for residuals up to the
/// breakpoint delta and linear beyond it, which caps an outlier's pull on
/// the fit; both branches give delta^2 at the breakpoint.
struct LossSpec {
  LossKind kind = LossKind::Huber;
  double delta = 0.25;  // kW, Huber only

  static LossSpec huber(double delta) {
    if (!(delta > 0.0)) fail(ErrorCode::InvalidConfig, "Huber delta must be > 0");
    return {LossKind::Huber, delta};
  }
  static LossSpec squared_error() { return {LossKind::SquaredError, 0.0}; }
};

/// Loss of estimating `actual` by `estimate`.
inline double loss_value(double estimate, double actual, const LossSpec& spec) {
  const double r = estimate - actual;
  if (spec.kind == LossKind::SquaredError) return r * r;
  const double abs_r = std::abs(r);
  if (abs_r <= spec.delta) return r * r;
  return 2.0 * spec.delta * abs_r - spec.delta * spec.delta;
}

/// Derivative of loss_value with respect to the estimate. Continuous at the
/// Huber breakpoint (both branches give 2*delta*sign), so no subgradient
/// handling is needed.
inline double loss_derivative(double estimate, double actual, const LossSpec& spec) {
  const double r = estimate - actual;
  if (spec.kind == LossKind::SquaredError) return 2.0 * r;
  if (std::abs(r) <= spec.delta) return 2.0 * r;
  return r > 0.0 ? 2.0 * spec.delta : -2.0 * spec.delta;
}

}  // namespace fanbase
