#include "fanbase/metrics.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "fanbase/errors.hpp"

namespace fanbase {

namespace {

void check_pair(const std::vector<double>& estimate, const std::vector<double>& actual,
                std::size_t min_length) {
  if (estimate.size() != actual.size())
    fail(ErrorCode::LengthMismatch, "estimate has " + std::to_string(estimate.size()) +
                                        " slots, actual has " + std::to_string(actual.size()));
  if (actual.size() < min_length)
    fail(ErrorCode::TooFewSlots,
         "need at least " + std::to_string(min_length) + " slots, have " +
             std::to_string(actual.size()));
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

double cv_percent(const std::vector<double>& estimate, const std::vector<double>& actual) {
  check_pair(estimate, actual, 2);
  const double actual_mean = mean_of(actual);
  if (actual_mean == 0.0) fail(ErrorCode::ZeroMeanActual, "actual series has zero mean");
  double squares = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = estimate[i] - actual[i];
    squares += e * e;
  }
  const double n = static_cast<double>(actual.size());
  return 100.0 * std::sqrt(squares / (n - 1.0)) / actual_mean;
}

double nmbe_percent(const std::vector<double>& estimate, const std::vector<double>& actual,
                    bool conventional_divisor) {
  check_pair(estimate, actual, 2);
  const double actual_mean = mean_of(actual);
  if (actual_mean == 0.0) fail(ErrorCode::ZeroMeanActual, "actual series has zero mean");
  double errors = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) errors += estimate[i] - actual[i];
  const double n = static_cast<double>(actual.size());
  return 100.0 * (errors / (conventional_divisor ? n : n - 1.0)) / actual_mean;
}

double aec_kwh(const std::vector<double>& estimate, const std::vector<double>& actual,
               int slot_minutes) {
  check_pair(estimate, actual, 1);
  if (slot_minutes < 1) fail(ErrorCode::InvalidConfig, "slot_minutes must be >= 1");
  double errors = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) errors += estimate[i] - actual[i];
  return errors * static_cast<double>(slot_minutes) / 60.0;
}

MeanHalfWidth confidence_interval(const std::vector<double>& values) {
  if (values.size() < 2)
    fail(ErrorCode::TooFewValues, "need at least 2 values, have " + std::to_string(values.size()));
  const double mean = mean_of(values);
  double squares = 0.0;
  for (double v : values) squares += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  const double stddev = std::sqrt(squares / (n - 1.0));
  return {mean, 1.96 * stddev / std::sqrt(n)};
}

}  // namespace fanbase
