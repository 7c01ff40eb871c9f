#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fanbase/gcp.hpp"
#include "fanbase/manifest.hpp"
#include "fanbase/tensor.hpp"

namespace fanbase {

/// One fan's readings for one day at a uniform resolution, gaps already
/// filled. values[s] is the mean kW over slot s (0-based).
struct FanSeries {
  std::string fan_id;
  std::string day;  // YYYY-MM-DD
  int slot_minutes = 1;
  std::vector<double> values;
};

/// An event window in slot space: 1-based inclusive [start_slot, end_slot]
/// at some resolution. Includes the settling period.
struct EventWindow {
  std::string label;
  std::size_t start_slot = 1;
  std::size_t end_slot = 1;

  std::size_t length() const { return end_slot - start_slot + 1; }
};

struct DatasetMeta {
  std::string building;
  std::vector<std::string> fan_order;
  std::vector<std::string> day_order;  // baseline days ascending, event day last
  std::string event_day;               // empty when unknown (bare CSV ingest)
  std::vector<WindowSpec> windows;     // test windows, settling not applied
  int settling_minutes = 60;
  ClockSpan day_mode{0, 1440};
  int slot_minutes = 1;
  int span_start_minute = 0;  // clock minute of slot 1
  std::size_t slots_per_day = 1440;
};

struct Dataset {
  DatasetMeta meta;
  // Fan-major: series[f * day_order.size() + d] is fan_order[f] on
  // day_order[d].
  std::vector<FanSeries> series;
  std::vector<std::string> warnings;

  const FanSeries& series_at(std::size_t fan, std::size_t day) const {
    return series[fan * meta.day_order.size() + day];
  }
  std::size_t baseline_day_count() const {
    return meta.event_day.empty() ? meta.day_order.size() : meta.day_order.size() - 1;
  }
  std::size_t event_day_index() const { return meta.day_order.size() - 1; }
};

struct IngestResult {
  std::vector<FanSeries> series;
  DatasetMeta meta;  // fans in first-appearance order, kept days ascending
  std::vector<std::string> dropped_days;
  std::vector<std::string> warnings;
};

/// Reads a 1-minute CSV (header timestamp,fan_id,power_kw; timestamp
/// YYYY-MM-DDThh:mm; power a decimal >= 0 or empty for missing). Days where
/// any fan is missing more than max_missing_fraction of slots are dropped
/// with a warning; smaller gaps are filled by linear interpolation between
/// the nearest present readings (edges extend the nearest value). Throws
/// ParseError naming the offending line, EmptyDataset, IoError.
IngestResult ingest_csv(const std::string& path, double max_missing_fraction = 0.05);

/// parse_manifest + ingest_csv + validation: every manifest fan and the
/// event day must survive ingestion (baseline days that were dropped are
/// removed with a warning). Series are ordered per the manifest.
Dataset load_dataset(const std::string& manifest_path, double max_missing_fraction = 0.05);

/// Averages consecutive slots down to target_minutes per slot. The target
/// must divide 60, be a multiple of the series resolution, and divide the
/// series' covered minutes evenly. Throws IncompatibleResolution.
FanSeries aggregate(const FanSeries& series, int target_minutes);

/// aggregate() applied to every series; updates the meta resolution.
Dataset aggregate_dataset(const Dataset& dataset, int target_minutes);

/// Restricts every series to the clock span (slot boundaries must align).
/// Window and day-mode arithmetic downstream shifts accordingly via
/// meta.span_start_minute.
Dataset restrict_dataset(const Dataset& dataset, ClockSpan span);

/// Converts a test window to slot space at the given resolution, appending
/// settling_minutes to its end. Both boundaries must land on slot edges
/// (InvalidConfig otherwise); the result must fit in [1, total_slots]
/// (WindowOutOfRange otherwise).
EventWindow window_from_clock(const WindowSpec& spec, int settling_minutes, int slot_minutes,
                              std::size_t total_slots, int span_start_minute = 0);

/// window_from_clock for every spec, plus an overlap check across the
/// settled windows (InvalidConfig).
std::vector<EventWindow> windows_at_resolution(const std::vector<WindowSpec>& specs,
                                               int settling_minutes, int slot_minutes,
                                               std::size_t total_slots,
                                               int span_start_minute = 0);

/// 1-based slots lying fully inside the day-mode clock span and outside
/// every given window. Used for day-similarity distances and scale summaries.
std::vector<std::size_t> non_event_day_mode_slots(ClockSpan day_mode,
                                                  const std::vector<EventWindow>& windows,
                                                  int slot_minutes, std::size_t total_slots,
                                                  int span_start_minute = 0);

enum class TensorMode { PerFan, Total };

/// Arranges series into a T x N x S tensor (fan and day order from meta).
/// Total mode collapses fans into a single slice holding the per-slot sum,
/// giving the degenerate T x 1 x S case. Throws MissingSeries for an absent
/// (fan, day) pair.
FanPowerTensor assemble_tensor(const std::vector<FanSeries>& series, const DatasetMeta& meta,
                               TensorMode mode);

/// Marks the window slots on the event day unobserved for every fan;
/// everything else stays observed. Windows are validated against dims.time.
ObservationMask mask_event_windows(Dims dims, std::size_t event_day_index,
                                   const std::vector<EventWindow>& windows);

struct BaselineEstimate {
  std::vector<EventWindow> windows;
  std::vector<std::vector<double>> totals;  // per window, per slot, kW
  FitResult fit;
};

/// Completes the masked tensor and reads the baseline out of the event
/// day's window slots, summed over fans.
BaselineEstimate estimate_baseline(const FanPowerTensor& tensor, const ObservationMask& mask,
                                   const LossSpec& spec, const FitOptions& options,
                                   std::size_t event_day_index,
                                   const std::vector<EventWindow>& windows);

/// Data-scaled Huber breakpoint: factor times the median per-fan reading
/// over day-mode slots of baseline days. For datasets far from the ~kW
/// scale the fixed default breakpoint assumes.
double scaled_huber_delta(const Dataset& dataset, double factor = 0.25);

}  // namespace fanbase
