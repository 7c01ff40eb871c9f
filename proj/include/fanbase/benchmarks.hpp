#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fanbase/pipeline.hpp"

namespace fanbase {

/// Total fan power per day at one resolution, oldest day first; the last
/// day plays the event day. All methods here are deterministic.
struct DayHistory {
  std::vector<std::string> dates;  // strictly increasing
  std::vector<std::vector<double>> totals;
  int slot_minutes = 1;

  std::size_t days() const { return dates.size(); }
  std::size_t slots() const { return totals.empty() ? 0 : totals.front().size(); }
  const std::vector<double>& event_series() const { return totals.back(); }
};

/// Sums the first day_count days of the dataset over fans. The last of
/// those days acts as the event day, so cross-validation folds pass
/// day_count = fold index + 1.
DayHistory build_day_history(const Dataset& dataset, std::size_t day_count);

struct BenchmarkOptions {
  int fit_minutes = 5;       // interpolation fit period on each side
  int context_minutes = 15;  // additive adjustment anchor period
  bool profile_distance = false;  // day similarity by per-slot L2 instead of |kWh| difference
};

/// Clock minutes -> slot count at a resolution, never below one slot.
std::size_t slots_for_minutes(int minutes, int slot_minutes);

/// Least-squares line through the fit periods just before the window and
/// just after it (the window already includes settling), evaluated across
/// the window. Throws InsufficientContext when the window sits too close
/// to the day boundary.
std::vector<double> linear_interp_baseline(const std::vector<double>& event_series,
                                           const EventWindow& window, int slot_minutes,
                                           int fit_minutes = 5);

/// Per-slot mean over the 5 most recent days before the event day, then
/// additive adjustment against the event day's pre-window level. Throws
/// InsufficientHistory with fewer than 5 prior days.
std::vector<double> avg5_baseline(const DayHistory& history, const EventWindow& window,
                                  int context_minutes = 15);

/// Among the 6 most recent prior days, averages the 3 whose consumption
/// over distance_slots is closest to the event day's, then additive
/// adjustment. distance_slots are 1-based day-mode slots excluding every
/// event window. Throws InsufficientHistory with fewer than 6 prior days.
std::vector<double> nearest3of6_baseline(const DayHistory& history, const EventWindow& window,
                                         const std::vector<std::size_t>& distance_slots,
                                         int context_minutes = 15, bool profile_distance = false);

/// Indices of the `count` most recent days before the event day, ascending.
std::vector<std::size_t> most_recent_prior_days(const DayHistory& history, std::size_t count);

/// The day-selection half of nearest3of6_baseline: 3 of the 6 most recent
/// prior days, ascending. Distance ties go to the more recent day.
std::vector<std::size_t> nearest3of6_selection(const DayHistory& history,
                                               const std::vector<std::size_t>& distance_slots,
                                               bool profile_distance = false);

/// Per-slot mean of the selected days' series.
std::vector<double> mean_profile(const DayHistory& history,
                                 const std::vector<std::size_t>& day_indices);

/// Shifts the baseline so its mean over the context period just before the
/// window equals the actual mean there. baseline_day must cover the whole
/// day (context slots are read from it); the result covers only the window.
std::vector<double> additive_adjust(const std::vector<double>& baseline_day,
                                    const std::vector<double>& actual, const EventWindow& window,
                                    int slot_minutes, int context_minutes = 15);

}  // namespace fanbase
