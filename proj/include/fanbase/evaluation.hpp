#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fanbase/benchmarks.hpp"
#include "fanbase/gcp.hpp"
#include "fanbase/loss.hpp"
#include "fanbase/pipeline.hpp"

namespace fanbase {

enum class Method { Tensor, LinearInterp, Avg5, Nearest3of6 };

std::string method_name(Method method);  // tensor | linterp | avg5 | n3of6

struct MethodSpec {
  Method method = Method::Tensor;
  TensorMode mode = TensorMode::PerFan;  // tensor method only
  LossSpec loss{};                       // tensor method only
  FitOptions fit{};                      // tensor method only; seed set per fold
  BenchmarkOptions benchmark{};          // benchmark methods only
};

/// Stable identifier naming the method and its settings at a resolution,
/// e.g. "tensor_15min_perfan_huber" or "avg5_1min". Used as the study cell
/// id, report key, and seed derivation purpose.
std::string method_id(const MethodSpec& spec, int resolution_minutes);

struct WindowResult {
  std::string day;
  std::string window_label;
  double cv = 0.0;    // percent
  double nmbe = 0.0;  // percent
  double aec = 0.0;   // kWh
};

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample, 0 with a single value
};

struct WindowAggregate {
  std::string window_label;
  std::size_t folds = 0;
  MetricStats cv, nmbe, aec;
  double aec_ci_half_width = 0.0;  // 0 with fewer than 2 folds
};

/// Per-slot actual vs estimate for one fold and window, for plot exports.
struct FoldTrace {
  std::string day;
  std::string window_label;
  std::size_t start_slot = 1;  // 1-based
  std::vector<double> actual;
  std::vector<double> estimate;
};

struct MetricReport {
  std::string method_id;
  int resolution_minutes = 1;
  std::vector<WindowResult> results;  // fold-major, windows in manifest order
  std::vector<FoldTrace> traces;
  std::vector<WindowAggregate> aggregates;
  std::vector<std::string> evaluated_days;
  std::vector<std::string> warnings;  // skipped folds and their reasons
};

struct LoocvOptions {
  int resolution_minutes = 15;
  std::uint64_t seed = 0;
  bool nmbe_conventional = false;
  int threads = 1;
};

/// Leave-one-out cross-validation over the baseline days. Each fold treats
/// one baseline day as a pseudo-event day: the tensor method refits with
/// that day's windows masked (the real event day's windows stay masked
/// too, their truth being unknown), benchmark methods see only earlier
/// days. Estimates are scored against the held-out truth per window. Folds
/// a benchmark lacks history for are skipped with a warning; a method with
/// no evaluable fold at all is an InsufficientHistory error. Fold k of the
/// tensor fit is seeded from (options.seed, k), so reports are identical
/// across runs and thread counts.
MetricReport loocv(const Dataset& dataset, const MethodSpec& spec, const LoocvOptions& options);

}  // namespace fanbase
