#include "fanbase/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "fanbase/errors.hpp"

namespace fanbase {

namespace {

constexpr std::size_t kMinutesPerDay = 1440;

[[noreturn]] void row_error(std::size_t line, const std::string& what) {
  fail(ErrorCode::ParseError, "row " + std::to_string(line) + ": " + what);
}

bool all_digits(const std::string& s, std::initializer_list<std::size_t> at) {
  for (std::size_t i : at)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// YYYY-MM-DDThh:mm
void parse_timestamp(const std::string& field, std::size_t line, std::string* day, int* minute) {
  if (field.size() != 16 || field[4] != '-' || field[7] != '-' || field[10] != 'T' ||
      field[13] != ':' || !all_digits(field, {0, 1, 2, 3, 5, 6, 8, 9, 11, 12, 14, 15}))
    row_error(line, "bad timestamp '" + field + "'");
  const int month = (field[5] - '0') * 10 + (field[6] - '0');
  const int dom = (field[8] - '0') * 10 + (field[9] - '0');
  const int hh = (field[11] - '0') * 10 + (field[12] - '0');
  const int mm = (field[14] - '0') * 10 + (field[15] - '0');
  if (month < 1 || month > 12 || dom < 1 || dom > 31 || hh > 23 || mm > 59)
    row_error(line, "timestamp '" + field + "' out of range");
  *day = field.substr(0, 10);
  *minute = hh * 60 + mm;
}

struct RawDay {
  std::vector<std::optional<double>> slots;
  std::vector<std::uint8_t> seen;
  std::size_t present = 0;

  RawDay() : slots(kMinutesPerDay), seen(kMinutesPerDay, 0) {}
};

std::vector<double> fill_gaps(const std::vector<std::optional<double>>& slots) {
  std::vector<double> out(slots.size(), 0.0);
  std::size_t prev = slots.size();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].has_value()) continue;
    const double v = *slots[i];
    if (prev == slots.size()) {
      for (std::size_t t = 0; t <= i; ++t) out[t] = v;
    } else {
      const double left = out[prev];
      for (std::size_t t = prev + 1; t <= i; ++t) {
        const double w = static_cast<double>(t - prev) / static_cast<double>(i - prev);
        out[t] = left + w * (v - left);
      }
    }
    prev = i;
  }
  for (std::size_t t = prev + 1; t < slots.size(); ++t) out[t] = out[prev];
  return out;
}

std::string percent_text(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
  return buf;
}

}  // namespace

IngestResult ingest_csv(const std::string& path, double max_missing_fraction) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open data file '" + path + "'");
  if (!(max_missing_fraction >= 0.0 && max_missing_fraction < 1.0))
    fail(ErrorCode::InvalidConfig, "max_missing_fraction must be in [0, 1)");

  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, "row 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,fan_id,power_kw")
    fail(ErrorCode::ParseError, "row 1: header must be 'timestamp,fan_id,power_kw'");

  std::vector<std::string> fan_order;
  std::set<std::string> fan_seen;
  std::map<std::string, std::map<std::string, RawDay>> days;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      row_error(line_no, "expected 3 comma-separated fields");
    const std::string timestamp = line.substr(0, c1);
    const std::string fan = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string power = line.substr(c2 + 1);

    std::string day;
    int minute = 0;
    parse_timestamp(timestamp, line_no, &day, &minute);
    if (fan.empty()) row_error(line_no, "empty fan_id");

    RawDay& raw = days[day][fan];
    if (raw.seen[minute]) row_error(line_no, "duplicate reading for fan '" + fan + "' at " + timestamp);
    raw.seen[minute] = 1;
    if (!power.empty()) {
      char* end = nullptr;
      const double value = std::strtod(power.c_str(), &end);
      if (end != power.c_str() + power.size() || !std::isfinite(value))
        row_error(line_no, "bad power value '" + power + "'");
      if (value < 0.0) row_error(line_no, "negative power value '" + power + "'");
      raw.slots[minute] = value;
      ++raw.present;
    }
    if (fan_seen.insert(fan).second) fan_order.push_back(fan);
  }
  if (days.empty()) fail(ErrorCode::EmptyDataset, "data file '" + path + "' has no readings");

  IngestResult result;
  result.meta.fan_order = fan_order;
  result.meta.slot_minutes = 1;
  result.meta.slots_per_day = kMinutesPerDay;

  std::vector<std::string> kept;
  for (const auto& [day, fans] : days) {
    bool keep = true;
    for (const std::string& fan : fan_order) {
      const auto it = fans.find(fan);
      const std::size_t present = it == fans.end() ? 0 : it->second.present;
      const double missing =
          static_cast<double>(kMinutesPerDay - present) / static_cast<double>(kMinutesPerDay);
      if (missing > max_missing_fraction || present == 0) {
        result.warnings.push_back("dropped day " + day + ": fan " + fan + " missing " +
                                  percent_text(missing) + " of slots");
        result.dropped_days.push_back(day);
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(day);
  }
  if (kept.empty()) fail(ErrorCode::EmptyDataset, "every day in '" + path + "' was dropped");
  result.meta.day_order = kept;

  for (const std::string& fan : fan_order)
    for (const std::string& day : kept) {
      FanSeries s;
      s.fan_id = fan;
      s.day = day;
      s.slot_minutes = 1;
      s.values = fill_gaps(days[day][fan].slots);
      result.series.push_back(std::move(s));
    }
  return result;
}

Dataset load_dataset(const std::string& manifest_path, double max_missing_fraction) {
  const Manifest manifest = parse_manifest(manifest_path);
  std::filesystem::path data_path(manifest.data_path);
  if (data_path.is_relative())
    data_path = std::filesystem::path(manifest_path).parent_path() / data_path;

  IngestResult raw = ingest_csv(data_path.string(), max_missing_fraction);
  const std::set<std::string> kept_days(raw.meta.day_order.begin(), raw.meta.day_order.end());
  const std::set<std::string> raw_fans(raw.meta.fan_order.begin(), raw.meta.fan_order.end());
  const std::set<std::string> dropped_days(raw.dropped_days.begin(), raw.dropped_days.end());

  for (const std::string& fan : manifest.fans)
    if (raw_fans.count(fan) == 0)
      fail(ErrorCode::MissingSeries, "fan '" + fan + "' does not appear in the data file");

  Dataset ds;
  ds.warnings = raw.warnings;
  for (const std::string& day : manifest.baseline_days) {
    if (kept_days.count(day)) {
      ds.meta.day_order.push_back(day);
    } else if (dropped_days.count(day)) {
      ds.warnings.push_back("baseline day " + day + " skipped (dropped at ingest)");
    } else {
      fail(ErrorCode::MissingSeries, "baseline day " + day + " does not appear in the data file");
    }
  }
  if (ds.meta.day_order.empty()) fail(ErrorCode::EmptyDataset, "no usable baseline days");
  if (kept_days.count(manifest.event_day) == 0) {
    if (dropped_days.count(manifest.event_day))
      fail(ErrorCode::EmptyDataset, "event day " + manifest.event_day +
                                        " was dropped for missing data");
    fail(ErrorCode::MissingSeries,
         "event day " + manifest.event_day + " does not appear in the data file");
  }
  ds.meta.day_order.push_back(manifest.event_day);

  ds.meta.building = manifest.building;
  ds.meta.fan_order = manifest.fans;
  ds.meta.event_day = manifest.event_day;
  ds.meta.windows = manifest.windows;
  ds.meta.settling_minutes = manifest.settling_minutes;
  ds.meta.day_mode = manifest.day_mode;
  ds.meta.slot_minutes = 1;
  ds.meta.span_start_minute = 0;
  ds.meta.slots_per_day = kMinutesPerDay;

  std::map<std::pair<std::string, std::string>, const FanSeries*> lookup;
  for (const FanSeries& s : raw.series) lookup[{s.fan_id, s.day}] = &s;
  for (const std::string& fan : ds.meta.fan_order)
    for (const std::string& day : ds.meta.day_order) {
      const auto it = lookup.find({fan, day});
      if (it == lookup.end())
        fail(ErrorCode::MissingSeries, "fan '" + fan + "' has no series on day " + day);
      ds.series.push_back(*it->second);
    }
  return ds;
}

FanSeries aggregate(const FanSeries& series, int target_minutes) {
  if (target_minutes < 1 || 60 % target_minutes != 0)
    fail(ErrorCode::IncompatibleResolution,
         "target resolution " + std::to_string(target_minutes) + " does not divide 60");
  if (target_minutes % series.slot_minutes != 0)
    fail(ErrorCode::IncompatibleResolution,
         "target resolution " + std::to_string(target_minutes) + " is not a multiple of the native " +
             std::to_string(series.slot_minutes));
  const std::size_t factor = static_cast<std::size_t>(target_minutes / series.slot_minutes);
  if (factor == 1) return series;
  if (series.values.size() % factor != 0)
    fail(ErrorCode::IncompatibleResolution, "series length " + std::to_string(series.values.size()) +
                                                " is not divisible by the aggregation factor " +
                                                std::to_string(factor));
  FanSeries out;
  out.fan_id = series.fan_id;
  out.day = series.day;
  out.slot_minutes = target_minutes;
  out.values.reserve(series.values.size() / factor);
  for (std::size_t base = 0; base < series.values.size(); base += factor) {
    double sum = 0.0;
    for (std::size_t i = 0; i < factor; ++i) sum += series.values[base + i];
    out.values.push_back(sum / static_cast<double>(factor));
  }
  return out;
}

Dataset aggregate_dataset(const Dataset& dataset, int target_minutes) {
  Dataset out;
  out.meta = dataset.meta;
  out.warnings = dataset.warnings;
  out.series.reserve(dataset.series.size());
  for (const FanSeries& s : dataset.series) out.series.push_back(aggregate(s, target_minutes));
  out.meta.slot_minutes = target_minutes;
  out.meta.slots_per_day =
      out.series.empty() ? dataset.meta.slots_per_day * dataset.meta.slot_minutes /
                               static_cast<std::size_t>(target_minutes)
                         : out.series.front().values.size();
  return out;
}

Dataset restrict_dataset(const Dataset& dataset, ClockSpan span) {
  const int delta = dataset.meta.slot_minutes;
  const int base = dataset.meta.span_start_minute;
  const int covered_end = base + static_cast<int>(dataset.meta.slots_per_day) * delta;
  if (span.start_minute < base || span.end_minute > covered_end ||
      span.start_minute >= span.end_minute)
    fail(ErrorCode::InvalidConfig, "span does not lie within the covered day");
  if ((span.start_minute - base) % delta != 0 || (span.end_minute - base) % delta != 0)
    fail(ErrorCode::InvalidConfig, "span boundaries do not align with " + std::to_string(delta) +
                                       "-minute slots");
  const std::size_t first = static_cast<std::size_t>((span.start_minute - base) / delta);
  const std::size_t count = static_cast<std::size_t>((span.end_minute - span.start_minute) / delta);

  Dataset out;
  out.meta = dataset.meta;
  out.warnings = dataset.warnings;
  out.meta.span_start_minute = span.start_minute;
  out.meta.slots_per_day = count;
  out.series.reserve(dataset.series.size());
  for (const FanSeries& s : dataset.series) {
    FanSeries sliced;
    sliced.fan_id = s.fan_id;
    sliced.day = s.day;
    sliced.slot_minutes = s.slot_minutes;
    sliced.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(first),
                         s.values.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.series.push_back(std::move(sliced));
  }
  return out;
}

EventWindow window_from_clock(const WindowSpec& spec, int settling_minutes, int slot_minutes,
                              std::size_t total_slots, int span_start_minute) {
  if (settling_minutes < 0) fail(ErrorCode::InvalidConfig, "settling_minutes must be >= 0");
  const int start = spec.span.start_minute;
  const int end = spec.span.end_minute + settling_minutes;
  if ((start - span_start_minute) % slot_minutes != 0 ||
      (end - span_start_minute) % slot_minutes != 0)
    fail(ErrorCode::InvalidConfig, "window '" + spec.label + "' does not align with " +
                                       std::to_string(slot_minutes) + "-minute slots");
  const int covered_end = span_start_minute + static_cast<int>(total_slots) * slot_minutes;
  if (start < span_start_minute || end > covered_end)
    fail(ErrorCode::WindowOutOfRange, "window '" + spec.label + "' falls outside the covered day");
  EventWindow w;
  w.label = spec.label;
  w.start_slot = static_cast<std::size_t>((start - span_start_minute) / slot_minutes) + 1;
  w.end_slot = static_cast<std::size_t>((end - span_start_minute) / slot_minutes);
  return w;
}

std::vector<EventWindow> windows_at_resolution(const std::vector<WindowSpec>& specs,
                                               int settling_minutes, int slot_minutes,
                                               std::size_t total_slots, int span_start_minute) {
  std::vector<EventWindow> windows;
  windows.reserve(specs.size());
  for (const WindowSpec& spec : specs)
    windows.push_back(
        window_from_clock(spec, settling_minutes, slot_minutes, total_slots, span_start_minute));
  std::vector<EventWindow> sorted = windows;
  std::sort(sorted.begin(), sorted.end(),
            [](const EventWindow& a, const EventWindow& b) { return a.start_slot < b.start_slot; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i - 1].end_slot >= sorted[i].start_slot)
      fail(ErrorCode::InvalidConfig, "windows '" + sorted[i - 1].label + "' and '" +
                                         sorted[i].label + "' overlap once settling is applied");
  return windows;
}

std::vector<std::size_t> non_event_day_mode_slots(ClockSpan day_mode,
                                                  const std::vector<EventWindow>& windows,
                                                  int slot_minutes, std::size_t total_slots,
                                                  int span_start_minute) {
  std::vector<std::size_t> slots;
  for (std::size_t s = 1; s <= total_slots; ++s) {
    const int lo = span_start_minute + static_cast<int>(s - 1) * slot_minutes;
    const int hi = lo + slot_minutes;
    if (lo < day_mode.start_minute || hi > day_mode.end_minute) continue;
    bool inside_window = false;
    for (const EventWindow& w : windows)
      if (s >= w.start_slot && s <= w.end_slot) {
        inside_window = true;
        break;
      }
    if (!inside_window) slots.push_back(s);
  }
  return slots;
}

FanPowerTensor assemble_tensor(const std::vector<FanSeries>& series, const DatasetMeta& meta,
                               TensorMode mode) {
  std::map<std::pair<std::string, std::string>, const FanSeries*> lookup;
  for (const FanSeries& s : series) {
    if (!lookup.insert({{s.fan_id, s.day}, &s}).second)
      fail(ErrorCode::InvalidConfig, "duplicate series for fan '" + s.fan_id + "' on " + s.day);
  }
  if (meta.fan_order.empty() || meta.day_order.empty())
    fail(ErrorCode::EmptyDataset, "no fans or days to assemble");

  std::size_t T = 0;
  int slot_minutes = 0;
  std::vector<const FanSeries*> ordered;
  for (const std::string& fan : meta.fan_order)
    for (const std::string& day : meta.day_order) {
      const auto it = lookup.find({fan, day});
      if (it == lookup.end())
        fail(ErrorCode::MissingSeries, "fan '" + fan + "' has no series on day " + day);
      const FanSeries* s = it->second;
      if (ordered.empty()) {
        T = s->values.size();
        slot_minutes = s->slot_minutes;
      } else {
        if (s->values.size() != T)
          fail(ErrorCode::DimensionMismatch, "series lengths differ across fans/days");
        if (s->slot_minutes != slot_minutes)
          fail(ErrorCode::IncompatibleResolution, "series resolutions differ across fans/days");
      }
      ordered.push_back(s);
    }

  const std::size_t N = meta.fan_order.size();
  const std::size_t S = meta.day_order.size();
  if (mode == TensorMode::PerFan) {
    Dims dims{T, N, S};
    std::vector<double> values(dims.count(), 0.0);
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < S; ++k) {
        const FanSeries* s = ordered[j * S + k];
        for (std::size_t i = 0; i < T; ++i) values[(i * N + j) * S + k] = s->values[i];
      }
    return FanPowerTensor::from_values(dims, slot_minutes, std::move(values));
  }
  Dims dims{T, 1, S};
  std::vector<double> values(dims.count(), 0.0);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t k = 0; k < S; ++k) {
      const FanSeries* s = ordered[j * S + k];
      for (std::size_t i = 0; i < T; ++i) values[i * S + k] += s->values[i];
    }
  return FanPowerTensor::from_values(dims, slot_minutes, std::move(values));
}

ObservationMask mask_event_windows(Dims dims, std::size_t event_day_index,
                                   const std::vector<EventWindow>& windows) {
  if (event_day_index >= dims.days)
    fail(ErrorCode::IndexOutOfBounds, "event day index " + std::to_string(event_day_index) +
                                          " out of range for " + std::to_string(dims.days) +
                                          " days");
  ObservationMask mask = ObservationMask::all_observed(dims);
  for (const EventWindow& w : windows) {
    if (w.start_slot < 1 || w.start_slot > w.end_slot || w.end_slot > dims.time)
      fail(ErrorCode::WindowOutOfRange, "window '" + w.label + "' [" +
                                            std::to_string(w.start_slot) + ", " +
                                            std::to_string(w.end_slot) + "] exceeds " +
                                            std::to_string(dims.time) + " slots");
    for (std::size_t s = w.start_slot; s <= w.end_slot; ++s)
      for (std::size_t j = 0; j < dims.fans; ++j) mask.set(s - 1, j, event_day_index, false);
  }
  return mask;
}

BaselineEstimate estimate_baseline(const FanPowerTensor& tensor, const ObservationMask& mask,
                                   const LossSpec& spec, const FitOptions& options,
                                   std::size_t event_day_index,
                                   const std::vector<EventWindow>& windows) {
  auto [completed, fit] = complete(tensor, mask, spec, options);
  BaselineEstimate estimate;
  estimate.windows = windows;
  estimate.fit = std::move(fit);
  const Dims dims = completed.dims();
  if (event_day_index >= dims.days)
    fail(ErrorCode::IndexOutOfBounds, "event day index out of range");
  for (const EventWindow& w : windows) {
    if (w.start_slot < 1 || w.end_slot > dims.time || w.start_slot > w.end_slot)
      fail(ErrorCode::WindowOutOfRange, "window '" + w.label + "' exceeds the tensor");
    std::vector<double> totals;
    totals.reserve(w.length());
    for (std::size_t s = w.start_slot; s <= w.end_slot; ++s) {
      double sum = 0.0;
      for (std::size_t j = 0; j < dims.fans; ++j) sum += completed.at(s - 1, j, event_day_index);
      totals.push_back(sum);
    }
    estimate.totals.push_back(std::move(totals));
  }
  return estimate;
}

double scaled_huber_delta(const Dataset& dataset, double factor) {
  if (!(factor > 0.0)) fail(ErrorCode::InvalidConfig, "delta scale factor must be > 0");
  const std::vector<std::size_t> slots =
      non_event_day_mode_slots(dataset.meta.day_mode, {}, dataset.meta.slot_minutes,
                               dataset.meta.slots_per_day, dataset.meta.span_start_minute);
  if (slots.empty()) fail(ErrorCode::InvalidConfig, "day-mode span covers no whole slot");
  std::vector<double> pool;
  const std::size_t baseline_days = dataset.baseline_day_count();
  for (std::size_t f = 0; f < dataset.meta.fan_order.size(); ++f)
    for (std::size_t d = 0; d < baseline_days; ++d) {
      const FanSeries& s = dataset.series_at(f, d);
      for (std::size_t slot : slots) pool.push_back(s.values[slot - 1]);
    }
  if (pool.empty()) fail(ErrorCode::EmptyDataset, "no baseline readings to scale the delta from");
  std::sort(pool.begin(), pool.end());
  const std::size_t n = pool.size();
  const double median =
      n % 2 == 1 ? pool[n / 2] : 0.5 * (pool[n / 2 - 1] + pool[n / 2]);
  if (!(median > 0.0))
    fail(ErrorCode::InvalidConfig, "median day-mode power is zero; cannot scale the breakpoint");
  return factor * median;
}

}  // namespace fanbase
