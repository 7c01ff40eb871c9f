#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fanbase/evaluation.hpp"

namespace fanbase {

struct StudyConfig {
  std::vector<Method> methods{Method::Tensor, Method::LinearInterp, Method::Avg5,
                              Method::Nearest3of6};
  std::vector<int> resolutions{1, 5, 15, 30};
  std::vector<TensorMode> modes{TensorMode::PerFan};  // tensor cells fan out over these
  std::vector<LossSpec> losses{LossSpec{}};           // and these
  FitOptions fit{};
  BenchmarkOptions benchmark{};
  std::uint64_t seed = 0;
  bool nmbe_conventional = false;
  int threads = 1;
};

struct StudyCell {
  std::string id;
  MethodSpec spec;
  int resolution_minutes = 1;
  MetricReport report;
};

struct StudyResult {
  std::vector<StudyCell> cells;
};

/// Cross-validates every requested method at every resolution; tensor
/// cells additionally fan out over modes and losses. Each cell's seed
/// derives from (config.seed, cell id) and each fold's from that, so
/// results depend on neither grid enumeration order nor thread count.
StudyResult run_study(const Dataset& dataset, const StudyConfig& config);

}  // namespace fanbase
