#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fanbase/manifest.hpp"
#include "fanbase/pipeline.hpp"
#include "fanbase/tensor.hpp"

namespace fanbase {

/// Settings for the synthetic dataset generator. The ground truth is
/// exactly rank-r: component q pairs a smooth daily shape (a raised-cosine
/// bump over the day-mode hours, component 0 also carrying the night
/// floor) with one nonnegative scale per fan and per day.
struct SynthConfig {
  std::size_t slots = 96;
  int slot_minutes = 15;
  std::size_t fans = 4;
  std::size_t baseline_days = 20;  // one event day is appended
  std::size_t rank = 2;
  ClockSpan day_mode{360, 1140};
  double base_kw = 0.4;   // night floor folded into component 0
  double peak_kw = 2.0;   // bump amplitude of component 0; later components shrink
  double noise_std = 0.0;
  std::size_t outliers = 0;
  double outlier_peak_factor = 10.0;  // an outlier entry becomes factor * max truth
  bool outliers_avoid_windows = true;
  std::vector<WindowSpec> windows{{"morning", {540, 600}}, {"afternoon", {780, 840}}};
  int settling_minutes = 60;
  std::vector<double> fan_scales;  // fans*rank, [fan*rank+q]; empty means drawn from seed
  std::vector<double> day_scales;  // (baseline_days+1)*rank, [day*rank+q]; empty means drawn
  std::uint64_t seed = 1;
};

struct SynthResult {
  FanPowerTensor observed;  // truth + noise + outliers, clamped at zero
  FanPowerTensor truth;
  std::vector<std::size_t> outlier_indices;  // flat (time*fans+fan)*days+day, ascending
};

/// Deterministic in config.seed: the same config yields bitwise-identical
/// tensors and outlier placements.
SynthResult generate(const SynthConfig& config);

/// Wraps the observed tensor as a ready-to-use dataset: fans F1..FN,
/// consecutive dates with the event day last, windows and day-mode span
/// from the config.
Dataset to_dataset(const SynthConfig& config, const FanPowerTensor& observed);

struct SynthFiles {
  std::string csv_path;
  std::string manifest_path;
};

/// Emits <basename>.csv and <basename>.toml under directory, written
/// atomically. Requires 1-minute slots covering the whole day so the CSV
/// contract (one row per fan per minute) holds and the files round-trip
/// through ingestion losslessly.
SynthFiles write_dataset_files(const SynthConfig& config, const FanPowerTensor& observed,
                               const std::string& directory,
                               const std::string& basename = "synth");

}  // namespace fanbase
