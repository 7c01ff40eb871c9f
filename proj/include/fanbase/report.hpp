#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fanbase/evaluation.hpp"
#include "fanbase/pipeline.hpp"
#include "fanbase/study.hpp"

namespace fanbase {

/// Everything a baseline-estimate run needs to report: the settings it ran
/// with and what came out. meta is at the fit resolution.
struct EstimateReport {
  DatasetMeta meta;
  TensorMode mode = TensorMode::PerFan;
  LossSpec loss{};
  FitOptions fit{};
  std::size_t masked_entries = 0;
  BaselineEstimate estimate;
  std::vector<std::string> warnings;
};

/// Reports hold no timestamps or durations, so rerunning with the same
/// inputs reproduces them byte for byte.
std::string estimate_json(const EstimateReport& report);
std::string estimate_csv(const EstimateReport& report);

/// Writes baseline.csv and fit.json under directory (atomically); returns
/// the paths written.
std::vector<std::string> write_estimate_reports(const std::string& directory,
                                                const EstimateReport& report);

std::string study_json(const Dataset& dataset, const StudyConfig& config,
                       const StudyResult& result);

/// One row per (cell, day, window) fold result.
std::string study_folds_csv(const StudyResult& result);

/// One row per (cell, window) aggregate.
std::string study_summary_csv(const StudyResult& result);

/// Per-slot actual vs estimate traces of one cell's folds.
std::string cell_plot_csv(const StudyCell& cell, int span_start_minute);

/// Writes study.json, folds.csv, summary.csv and plots/<cell id>.csv under
/// directory (atomically); returns the paths written.
std::vector<std::string> write_study_reports(const std::string& directory, const Dataset& dataset,
                                             const StudyConfig& config, const StudyResult& result);

}  // namespace fanbase
