#include "fanbase/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fanbase/errors.hpp"

namespace fanbase {

namespace {

void check_window(const EventWindow& window, std::size_t slots) {
  if (window.start_slot < 1 || window.start_slot > window.end_slot || window.end_slot > slots)
    fail(ErrorCode::WindowOutOfRange, "window '" + window.label + "' exceeds the day");
}

}  // namespace

DayHistory build_day_history(const Dataset& dataset, std::size_t day_count) {
  if (day_count < 1 || day_count > dataset.meta.day_order.size())
    fail(ErrorCode::IndexOutOfBounds, "day_count " + std::to_string(day_count) +
                                          " out of range for " +
                                          std::to_string(dataset.meta.day_order.size()) + " days");
  DayHistory history;
  history.slot_minutes = dataset.meta.slot_minutes;
  const std::size_t fans = dataset.meta.fan_order.size();
  for (std::size_t d = 0; d < day_count; ++d) {
    history.dates.push_back(dataset.meta.day_order[d]);
    std::vector<double> total(dataset.meta.slots_per_day, 0.0);
    for (std::size_t f = 0; f < fans; ++f) {
      const FanSeries& s = dataset.series_at(f, d);
      for (std::size_t i = 0; i < total.size(); ++i) total[i] += s.values[i];
    }
    history.totals.push_back(std::move(total));
  }
  return history;
}

std::size_t slots_for_minutes(int minutes, int slot_minutes) {
  if (minutes < 1 || slot_minutes < 1)
    fail(ErrorCode::InvalidConfig, "minutes and slot_minutes must be >= 1");
  return std::max<std::size_t>(1, static_cast<std::size_t>(minutes / slot_minutes));
}

std::vector<double> linear_interp_baseline(const std::vector<double>& event_series,
                                           const EventWindow& window, int slot_minutes,
                                           int fit_minutes) {
  check_window(window, event_series.size());
  const std::size_t fit = slots_for_minutes(fit_minutes, slot_minutes);
  if (window.start_slot <= fit || window.end_slot + fit > event_series.size())
    fail(ErrorCode::InsufficientContext,
         "window '" + window.label + "' leaves no room for " + std::to_string(fit) +
             " fit slots on both sides");

  // Centered least squares over the two fit periods.
  double sx = 0.0;
  std::size_t n = 0;
  auto each_fit_slot = [&](auto&& visit) {
    for (std::size_t s = window.start_slot - fit; s < window.start_slot; ++s) visit(s);
    for (std::size_t s = window.end_slot + 1; s <= window.end_slot + fit; ++s) visit(s);
  };
  each_fit_slot([&](std::size_t s) {
    sx += static_cast<double>(s);
    ++n;
  });
  const double mean_x = sx / static_cast<double>(n);
  double sy = 0.0, sxx = 0.0, sxy = 0.0;
  each_fit_slot([&](std::size_t s) {
    const double dx = static_cast<double>(s) - mean_x;
    const double y = event_series[s - 1];
    sy += y;
    sxx += dx * dx;
    sxy += dx * y;
  });
  const double mean_y = sy / static_cast<double>(n);
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;

  std::vector<double> baseline;
  baseline.reserve(window.length());
  for (std::size_t s = window.start_slot; s <= window.end_slot; ++s)
    baseline.push_back(intercept + slope * static_cast<double>(s));
  return baseline;
}

std::vector<std::size_t> most_recent_prior_days(const DayHistory& history, std::size_t count) {
  if (history.days() < count + 1)
    fail(ErrorCode::InsufficientHistory, "need " + std::to_string(count) +
                                             " days before the event day, have " +
                                             std::to_string(history.days() - 1));
  std::vector<std::size_t> days;
  for (std::size_t d = history.days() - 1 - count; d + 1 < history.days(); ++d) days.push_back(d);
  return days;
}

std::vector<double> mean_profile(const DayHistory& history,
                                 const std::vector<std::size_t>& day_indices) {
  if (day_indices.empty()) fail(ErrorCode::InvalidConfig, "no days selected to average");
  std::vector<double> profile(history.slots(), 0.0);
  for (std::size_t d : day_indices) {
    if (d >= history.days()) fail(ErrorCode::IndexOutOfBounds, "day index out of range");
    const std::vector<double>& series = history.totals[d];
    for (std::size_t i = 0; i < profile.size(); ++i) profile[i] += series[i];
  }
  for (double& v : profile) v /= static_cast<double>(day_indices.size());
  return profile;
}

std::vector<double> additive_adjust(const std::vector<double>& baseline_day,
                                    const std::vector<double>& actual, const EventWindow& window,
                                    int slot_minutes, int context_minutes) {
  if (baseline_day.size() != actual.size())
    fail(ErrorCode::LengthMismatch, "baseline and actual day lengths differ");
  check_window(window, actual.size());
  const std::size_t context = slots_for_minutes(context_minutes, slot_minutes);
  if (window.start_slot <= context)
    fail(ErrorCode::InsufficientContext, "window '" + window.label + "' leaves no room for " +
                                             std::to_string(context) + " context slots before it");

  double actual_mean = 0.0, baseline_mean = 0.0;
  for (std::size_t s = window.start_slot - context; s < window.start_slot; ++s) {
    actual_mean += actual[s - 1];
    baseline_mean += baseline_day[s - 1];
  }
  const double offset = (actual_mean - baseline_mean) / static_cast<double>(context);

  std::vector<double> adjusted;
  adjusted.reserve(window.length());
  for (std::size_t s = window.start_slot; s <= window.end_slot; ++s)
    adjusted.push_back(baseline_day[s - 1] + offset);
  return adjusted;
}

std::vector<double> avg5_baseline(const DayHistory& history, const EventWindow& window,
                                  int context_minutes) {
  const std::vector<std::size_t> days = most_recent_prior_days(history, 5);
  const std::vector<double> profile = mean_profile(history, days);
  return additive_adjust(profile, history.event_series(), window, history.slot_minutes,
                         context_minutes);
}

std::vector<std::size_t> nearest3of6_selection(const DayHistory& history,
                                               const std::vector<std::size_t>& distance_slots,
                                               bool profile_distance) {
  if (distance_slots.empty())
    fail(ErrorCode::InvalidConfig, "no day-mode slots available for day distances");
  const std::vector<std::size_t> candidates = most_recent_prior_days(history, 6);
  for (std::size_t s : distance_slots)
    if (s < 1 || s > history.slots())
      fail(ErrorCode::IndexOutOfBounds, "distance slot out of range");

  const std::vector<double>& event = history.event_series();
  const double hours_per_slot = static_cast<double>(history.slot_minutes) / 60.0;
  auto distance = [&](std::size_t day) {
    const std::vector<double>& series = history.totals[day];
    if (profile_distance) {
      double sum = 0.0;
      for (std::size_t s : distance_slots) {
        const double diff = series[s - 1] - event[s - 1];
        sum += diff * diff;
      }
      return std::sqrt(sum);
    }
    double day_kwh = 0.0, event_kwh = 0.0;
    for (std::size_t s : distance_slots) {
      day_kwh += series[s - 1] * hours_per_slot;
      event_kwh += event[s - 1] * hours_per_slot;
    }
    return std::abs(day_kwh - event_kwh);
  };

  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t day : candidates) ranked.emplace_back(distance(day), day);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;  // tie: more recent day wins
  });
  std::vector<std::size_t> selected{ranked[0].second, ranked[1].second, ranked[2].second};
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::vector<double> nearest3of6_baseline(const DayHistory& history, const EventWindow& window,
                                         const std::vector<std::size_t>& distance_slots,
                                         int context_minutes, bool profile_distance) {
  const std::vector<std::size_t> days =
      nearest3of6_selection(history, distance_slots, profile_distance);
  const std::vector<double> profile = mean_profile(history, days);
  return additive_adjust(profile, history.event_series(), window, history.slot_minutes,
                         context_minutes);
}

}  // namespace fanbase
