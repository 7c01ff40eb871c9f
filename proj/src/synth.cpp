#include "fanbase/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <utility>

#include "fanbase/errors.hpp"
#include "fanbase/io.hpp"
#include "fanbase/rng.hpp"

namespace fanbase {

namespace {

std::string date_for(std::size_t offset) {
  using namespace std::chrono;
  const sys_days base = sys_days(year{2024} / March / 1);
  const year_month_day ymd{base + days{static_cast<int>(offset)}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

void validate(const SynthConfig& c) {
  if (c.slots < 1 || c.slot_minutes < 1 ||
      c.slots * static_cast<std::size_t>(c.slot_minutes) > 1440)
    fail(ErrorCode::InvalidConfig, "slots * slot_minutes must cover at most a day");
  if (c.fans < 1 || c.baseline_days < 1 || c.rank < 1)
    fail(ErrorCode::InvalidConfig, "fans, baseline_days and rank must be >= 1");
  if (c.base_kw < 0.0 || c.peak_kw < 0.0 || c.noise_std < 0.0 || c.outlier_peak_factor < 0.0)
    fail(ErrorCode::InvalidConfig, "magnitudes must be >= 0");
  const std::size_t days = c.baseline_days + 1;
  if (!c.fan_scales.empty() && c.fan_scales.size() != c.fans * c.rank)
    fail(ErrorCode::InvalidConfig, "fan_scales must hold fans*rank values");
  if (!c.day_scales.empty() && c.day_scales.size() != days * c.rank)
    fail(ErrorCode::InvalidConfig, "day_scales must hold (baseline_days+1)*rank values");
  for (double v : c.fan_scales)
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(ErrorCode::InvalidConfig, "fan scales must be finite and >= 0");
  for (double v : c.day_scales)
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(ErrorCode::InvalidConfig, "day scales must be finite and >= 0");
}

}  // namespace

SynthResult generate(const SynthConfig& config) {
  validate(config);
  const std::size_t T = config.slots;
  const std::size_t N = config.fans;
  const std::size_t S = config.baseline_days + 1;
  const std::size_t r = config.rank;

  // Daily shapes: powers of a raised-cosine bump over the day-mode span,
  // which are smooth, nonnegative and linearly independent across q.
  const double a = static_cast<double>(config.day_mode.start_minute);
  const double len = static_cast<double>(config.day_mode.end_minute - config.day_mode.start_minute);
  Matrix shapes(T, r);
  for (std::size_t i = 0; i < T; ++i) {
    const double center = (static_cast<double>(i) + 0.5) * config.slot_minutes;
    const double inside = center >= a && center < a + len
                              ? 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (center - a) / len))
                              : 0.0;
    for (std::size_t q = 0; q < r; ++q) {
      const double amplitude = config.peak_kw * std::pow(0.5, static_cast<double>(q));
      shapes(i, q) = (q == 0 ? config.base_kw : 0.0) +
                     amplitude * std::pow(inside, static_cast<double>(q + 1));
    }
  }

  std::vector<double> fan_scales = config.fan_scales;
  std::vector<double> day_scales = config.day_scales;
  {
    Rng rng(derive_seed(config.seed, "synth-scales"));
    if (fan_scales.empty()) {
      fan_scales.resize(N * r);
      for (double& v : fan_scales) v = rng.uniform(0.5, 1.5);
    }
    if (day_scales.empty()) {
      day_scales.resize(S * r);
      for (double& v : day_scales) v = rng.uniform(0.8, 1.2);
    }
  }

  const Dims dims{T, N, S};
  std::vector<double> truth(dims.count(), 0.0);
  double truth_max = 0.0;
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < S; ++k) {
        double v = 0.0;
        for (std::size_t q = 0; q < r; ++q)
          v += shapes(i, q) * fan_scales[j * r + q] * day_scales[k * r + q];
        truth[(i * N + j) * S + k] = v;
        truth_max = std::max(truth_max, v);
      }

  std::vector<double> observed = truth;
  if (config.noise_std > 0.0) {
    Rng rng(derive_seed(config.seed, "synth-noise"));
    for (double& v : observed) v = std::max(0.0, v + config.noise_std * rng.normal());
  }

  std::vector<std::size_t> outlier_indices;
  if (config.outliers > 0) {
    std::vector<std::uint8_t> slot_in_window(T, 0);
    if (config.outliers_avoid_windows) {
      const std::vector<EventWindow> windows = windows_at_resolution(
          config.windows, config.settling_minutes, config.slot_minutes, T, 0);
      for (const EventWindow& w : windows)
        for (std::size_t s = w.start_slot; s <= w.end_slot; ++s) slot_in_window[s - 1] = 1;
    }
    std::size_t allowed_slots = 0;
    for (std::uint8_t f : slot_in_window) allowed_slots += f == 0 ? 1 : 0;
    if (allowed_slots * N * S < config.outliers)
      fail(ErrorCode::InvalidConfig, "more outliers requested than entries outside the windows");

    Rng rng(derive_seed(config.seed, "synth-outliers"));
    std::vector<std::uint8_t> taken(dims.count(), 0);
    while (outlier_indices.size() < config.outliers) {
      const std::size_t flat = rng.uniform_index(dims.count());
      const std::size_t i = flat / (N * S);
      if (slot_in_window[i] || taken[flat]) continue;
      taken[flat] = 1;
      observed[flat] = config.outlier_peak_factor * truth_max;
      outlier_indices.push_back(flat);
    }
    std::sort(outlier_indices.begin(), outlier_indices.end());
  }

  SynthResult result{
      FanPowerTensor::from_values(dims, config.slot_minutes, std::move(observed)),
      FanPowerTensor::from_values(dims, config.slot_minutes, std::move(truth)),
      std::move(outlier_indices)};
  return result;
}

Dataset to_dataset(const SynthConfig& config, const FanPowerTensor& observed) {
  const Dims dims = observed.dims();
  Dataset ds;
  ds.meta.building = "synthetic";
  for (std::size_t j = 0; j < dims.fans; ++j)
    ds.meta.fan_order.push_back("F" + std::to_string(j + 1));
  for (std::size_t k = 0; k < dims.days; ++k) ds.meta.day_order.push_back(date_for(k));
  ds.meta.event_day = ds.meta.day_order.back();
  ds.meta.windows = config.windows;
  ds.meta.settling_minutes = config.settling_minutes;
  ds.meta.day_mode = config.day_mode;
  ds.meta.slot_minutes = observed.slot_minutes();
  ds.meta.span_start_minute = 0;
  ds.meta.slots_per_day = dims.time;
  for (std::size_t j = 0; j < dims.fans; ++j)
    for (std::size_t k = 0; k < dims.days; ++k) {
      FanSeries s;
      s.fan_id = ds.meta.fan_order[j];
      s.day = ds.meta.day_order[k];
      s.slot_minutes = observed.slot_minutes();
      s.values.reserve(dims.time);
      for (std::size_t i = 0; i < dims.time; ++i) s.values.push_back(observed.at(i, j, k));
      ds.series.push_back(std::move(s));
    }
  return ds;
}

SynthFiles write_dataset_files(const SynthConfig& config, const FanPowerTensor& observed,
                               const std::string& directory, const std::string& basename) {
  const Dims dims = observed.dims();
  if (observed.slot_minutes() != 1 || dims.time != 1440)
    fail(ErrorCode::InvalidConfig,
         "dataset files need 1-minute slots covering the whole day (1440 slots)");

  const Dataset ds = to_dataset(config, observed);
  std::ostringstream csv;
  csv << "timestamp,fan_id,power_kw\n";
  for (std::size_t k = 0; k < dims.days; ++k)
    for (std::size_t j = 0; j < dims.fans; ++j)
      for (std::size_t i = 0; i < dims.time; ++i) {
        char clock[8];
        std::snprintf(clock, sizeof clock, "%02zu:%02zu", i / 60, i % 60);
        csv << ds.meta.day_order[k] << 'T' << clock << ',' << ds.meta.fan_order[j] << ','
            << format_double(observed.at(i, j, k)) << '\n';
      }

  Manifest manifest;
  manifest.building = ds.meta.building;
  manifest.data_path = basename + ".csv";
  manifest.fans = ds.meta.fan_order;
  manifest.baseline_days.assign(ds.meta.day_order.begin(), ds.meta.day_order.end() - 1);
  manifest.event_day = ds.meta.event_day;
  manifest.windows = config.windows;
  manifest.settling_minutes = config.settling_minutes;
  manifest.day_mode = config.day_mode;

  namespace fs = std::filesystem;
  SynthFiles files{(fs::path(directory) / (basename + ".csv")).string(),
                   (fs::path(directory) / (basename + ".toml")).string()};
  write_text_atomic(files.csv_path, csv.str());
  write_text_atomic(files.manifest_path, format_manifest(manifest));
  return files;
}

}  // namespace fanbase
