#pragma once

#include <vector>

namespace fanbase {

/// Coefficient of variation of the estimation error, in percent:
/// 100 * sqrt(sum((estimate-actual)^2) / (n-1)) / mean(actual).
/// Needs n >= 2 and a nonzero actual mean.
double cv_percent(const std::vector<double>& estimate, const std::vector<double>& actual);

/// Normalized mean bias error, in percent. Positive means overestimation.
/// The error sum divides by n-1 by default; conventional_divisor switches
/// that to n.
double nmbe_percent(const std::vector<double>& estimate, const std::vector<double>& actual,
                    bool conventional_divisor = false);

/// Accumulated energy difference estimate-minus-actual over the slots, in
/// kWh at the given resolution.
double aec_kwh(const std::vector<double>& estimate, const std::vector<double>& actual,
               int slot_minutes);

struct MeanHalfWidth {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Mean and 1.96 * sample standard deviation / sqrt(n); needs n >= 2.
MeanHalfWidth confidence_interval(const std::vector<double>& values);

}  // namespace fanbase
