#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "doctest.h"

#include "fanbase/evaluation.hpp"
#include "fanbase/study.hpp"
#include "fanbase/synth.hpp"
#include "helpers.hpp"

using namespace fanbase;
using testutil::code_of;

namespace {

SynthConfig small_config(std::size_t baseline_days, std::uint64_t seed) {
  SynthConfig config;
  config.slots = 96;
  config.slot_minutes = 15;
  config.fans = 3;
  config.baseline_days = baseline_days;
  config.rank = 2;
  config.noise_std = 0.02;
  config.seed = seed;
  return config;
}

Dataset small_dataset(std::size_t baseline_days, std::uint64_t seed) {
  const SynthConfig config = small_config(baseline_days, seed);
  return to_dataset(config, generate(config).observed);
}

MethodSpec tensor_spec(int rank = 2, int trials = 2) {
  MethodSpec spec;
  spec.method = Method::Tensor;
  spec.loss = LossSpec::huber(0.25);
  spec.fit.rank = rank;
  spec.fit.trials = trials;
  return spec;
}

bool reports_equal(const MetricReport& a, const MetricReport& b) {
  if (a.method_id != b.method_id || a.results.size() != b.results.size()) return false;
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    const WindowResult& x = a.results[i];
    const WindowResult& y = b.results[i];
    if (x.day != y.day || x.window_label != y.window_label) return false;
    if (x.cv != y.cv || x.nmbe != y.nmbe || x.aec != y.aec) return false;
  }
  if (a.traces.size() != b.traces.size()) return false;
  for (std::size_t i = 0; i < a.traces.size(); ++i)
    if (a.traces[i].estimate != b.traces[i].estimate || a.traces[i].actual != b.traces[i].actual)
      return false;
  return true;
}

}  // namespace

TEST_CASE("method names and ids are stable") {
  CHECK(method_name(Method::Tensor) == "tensor");
  CHECK(method_name(Method::LinearInterp) == "linterp");
  CHECK(method_name(Method::Avg5) == "avg5");
  CHECK(method_name(Method::Nearest3of6) == "n3of6");

  MethodSpec tensor;
  tensor.method = Method::Tensor;
  tensor.mode = TensorMode::PerFan;
  tensor.loss = LossSpec::huber(0.25);
  CHECK(method_id(tensor, 15) == "tensor_15min_perfan_huber");
  tensor.mode = TensorMode::Total;
  tensor.loss = LossSpec::squared_error();
  CHECK(method_id(tensor, 5) == "tensor_5min_total_l2");

  MethodSpec bench;
  bench.method = Method::Avg5;
  CHECK(method_id(bench, 1) == "avg5_1min");
  bench.method = Method::LinearInterp;
  CHECK(method_id(bench, 30) == "linterp_30min");
  bench.method = Method::Nearest3of6;
  CHECK(method_id(bench, 15) == "n3of6_15min");
}

TEST_CASE("tensor cross-validation scores every baseline day") {
  const Dataset ds = small_dataset(6, 11);
  LoocvOptions options;
  options.resolution_minutes = 15;
  options.seed = 5;
  const MetricReport report = loocv(ds, tensor_spec(), options);

  CHECK(report.method_id == "tensor_15min_perfan_huber");
  CHECK(report.resolution_minutes == 15);
  CHECK(report.evaluated_days.size() == 6);
  CHECK(report.warnings.empty());
  REQUIRE(report.results.size() == 12);  // 6 folds x 2 windows
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(report.results[2 * k].day == ds.meta.day_order[k]);
    CHECK(report.results[2 * k].window_label == "morning");
    CHECK(report.results[2 * k + 1].window_label == "afternoon");
  }
  REQUIRE(report.aggregates.size() == 2);
  CHECK(report.aggregates[0].window_label == "morning");
  CHECK(report.aggregates[0].folds == 6);
  CHECK(report.aggregates[1].folds == 6);

  // Traces carry the held-out truth: morning is slots 37..44.
  REQUIRE(report.traces.size() == 12);
  const FoldTrace& trace = report.traces[0];
  CHECK(trace.start_slot == 37);
  REQUIRE(trace.actual.size() == 8);
  double slot_total = 0.0;
  for (std::size_t f = 0; f < 3; ++f) slot_total += ds.series_at(f, 0).values[36];
  CHECK(trace.actual[0] == doctest::Approx(slot_total).epsilon(1e-12));
  CHECK(trace.estimate.size() == 8);
}

TEST_CASE("benchmarks skip the folds they lack history for") {
  const Dataset ds = small_dataset(8, 12);
  LoocvOptions options;
  options.resolution_minutes = 15;

  MethodSpec avg5;
  avg5.method = Method::Avg5;
  const MetricReport avg_report = loocv(ds, avg5, options);
  CHECK(avg_report.evaluated_days.size() == 3);  // folds 5..7 have five prior days
  CHECK(avg_report.warnings.size() == 5);
  CHECK(avg_report.results.size() == 6);
  for (const std::string& w : avg_report.warnings) {
    CHECK(w.find("avg5_15min") != std::string::npos);
    CHECK(w.find("skipped day") != std::string::npos);
  }
  CHECK(avg_report.evaluated_days.front() == ds.meta.day_order[5]);

  MethodSpec n3of6;
  n3of6.method = Method::Nearest3of6;
  const MetricReport near_report = loocv(ds, n3of6, options);
  CHECK(near_report.evaluated_days.size() == 2);  // folds 6..7
  CHECK(near_report.warnings.size() == 6);

  MethodSpec linterp;
  linterp.method = Method::LinearInterp;
  const MetricReport interp_report = loocv(ds, linterp, options);
  CHECK(interp_report.evaluated_days.size() == 8);  // needs no prior days
  CHECK(interp_report.warnings.empty());
}

TEST_CASE("cross-validation refuses hopeless inputs") {
  LoocvOptions options;
  options.resolution_minutes = 15;

  // Four prior days at most: the five-day average can never run.
  const Dataset short_ds = small_dataset(5, 13);
  MethodSpec avg5;
  avg5.method = Method::Avg5;
  CHECK(code_of([&] { loocv(short_ds, avg5, options); }) == ErrorCode::InsufficientHistory);

  MethodSpec n3of6;
  n3of6.method = Method::Nearest3of6;
  const Dataset six = small_dataset(6, 13);
  CHECK(code_of([&] { loocv(six, n3of6, options); }) == ErrorCode::InsufficientHistory);

  const Dataset lone = small_dataset(1, 14);
  CHECK(code_of([&] { loocv(lone, tensor_spec(), options); }) ==
        ErrorCode::InsufficientHistory);

  Dataset unlabeled = small_dataset(4, 15);
  unlabeled.meta.event_day.clear();
  CHECK(code_of([&] { loocv(unlabeled, tensor_spec(), options); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("reports are identical across reruns and thread counts") {
  const Dataset ds = small_dataset(5, 16);
  LoocvOptions serial;
  serial.resolution_minutes = 15;
  serial.seed = 99;
  serial.threads = 1;
  LoocvOptions parallel = serial;
  parallel.threads = 4;

  const MetricReport once = loocv(ds, tensor_spec(), serial);
  const MetricReport twice = loocv(ds, tensor_spec(), serial);
  const MetricReport threaded = loocv(ds, tensor_spec(), parallel);
  CHECK(reports_equal(once, twice));
  CHECK(reports_equal(once, threaded));

  LoocvOptions reseeded = serial;
  reseeded.seed = 100;
  const MetricReport other = loocv(ds, tensor_spec(), reseeded);
  CHECK_FALSE(reports_equal(once, other));
}

TEST_CASE("held-out window readings never reach the estimate") {
  const std::size_t poisoned_fold = 2;
  Dataset ds = small_dataset(6, 17);
  LoocvOptions options;
  options.resolution_minutes = 15;
  options.seed = 7;

  const std::vector<EventWindow> windows =
      windows_at_resolution(ds.meta.windows, ds.meta.settling_minutes, ds.meta.slot_minutes,
                            ds.meta.slots_per_day, ds.meta.span_start_minute);

  const auto estimates_for_day = [&](const MetricReport& report, const std::string& day) {
    std::vector<std::vector<double>> estimates;
    for (const FoldTrace& t : report.traces)
      if (t.day == day) estimates.push_back(t.estimate);
    return estimates;
  };

  MethodSpec avg5;
  avg5.method = Method::Avg5;
  MethodSpec linterp;
  linterp.method = Method::LinearInterp;
  const std::string day = ds.meta.day_order[poisoned_fold];

  const MetricReport tensor_before = loocv(ds, tensor_spec(), options);
  const MetricReport avg_before = loocv(ds, avg5, options);
  const MetricReport interp_before = loocv(ds, linterp, options);

  // Corrupt the scored day inside the windows (and the real event day,
  // whose windows are equally off limits).
  for (std::size_t f = 0; f < ds.meta.fan_order.size(); ++f)
    for (const std::size_t d : {poisoned_fold, ds.event_day_index()}) {
      FanSeries& s = ds.series[f * ds.meta.day_order.size() + d];
      for (const EventWindow& w : windows)
        for (std::size_t slot = w.start_slot; slot <= w.end_slot; ++slot)
          s.values[slot - 1] = s.values[slot - 1] * 1000.0 + 50.0;
    }

  const MetricReport tensor_after = loocv(ds, tensor_spec(), options);
  const MetricReport avg_after = loocv(ds, avg5, options);
  const MetricReport interp_after = loocv(ds, linterp, options);

  CHECK(estimates_for_day(tensor_before, day) == estimates_for_day(tensor_after, day));
  CHECK(estimates_for_day(avg_before, day) == estimates_for_day(avg_after, day));
  CHECK(estimates_for_day(interp_before, day) == estimates_for_day(interp_after, day));

  // The corrupted truth does change the scores, proving the poison took.
  CHECK_FALSE(reports_equal(tensor_before, tensor_after));
}

TEST_CASE("aggregates are the mean and spread of the fold results") {
  const Dataset ds = small_dataset(8, 18);
  LoocvOptions options;
  options.resolution_minutes = 15;
  MethodSpec avg5;
  avg5.method = Method::Avg5;
  const MetricReport report = loocv(ds, avg5, options);

  for (const WindowAggregate& agg : report.aggregates) {
    std::vector<double> cvs, nmbes, aecs;
    for (const WindowResult& r : report.results)
      if (r.window_label == agg.window_label) {
        cvs.push_back(r.cv);
        nmbes.push_back(r.nmbe);
        aecs.push_back(r.aec);
      }
    REQUIRE(agg.folds == cvs.size());
    REQUIRE(agg.folds >= 2);

    const auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    const auto sample_std = [&](const std::vector<double>& v) {
      const double m = mean(v);
      double sq = 0.0;
      for (double x : v) sq += (x - m) * (x - m);
      return std::sqrt(sq / static_cast<double>(v.size() - 1));
    };
    CHECK(agg.cv.mean == doctest::Approx(mean(cvs)).epsilon(1e-12));
    CHECK(agg.nmbe.mean == doctest::Approx(mean(nmbes)).epsilon(1e-12));
    CHECK(agg.aec.mean == doctest::Approx(mean(aecs)).epsilon(1e-12));
    CHECK(agg.cv.stddev == doctest::Approx(sample_std(cvs)).epsilon(1e-12));
    CHECK(agg.aec_ci_half_width ==
          doctest::Approx(1.96 * sample_std(aecs) / std::sqrt(static_cast<double>(aecs.size())))
              .epsilon(1e-12));
  }
}

TEST_CASE("studies fan tensor cells out over modes and losses") {
  const Dataset ds = small_dataset(8, 19);
  StudyConfig config;
  config.resolutions = {15, 30};
  config.modes = {TensorMode::PerFan, TensorMode::Total};
  config.losses = {LossSpec::huber(0.25), LossSpec::squared_error()};
  config.fit.rank = 2;
  config.fit.trials = 1;
  config.seed = 3;
  const StudyResult result = run_study(ds, config);

  // 2 resolutions x (4 tensor variants + 3 benchmarks).
  REQUIRE(result.cells.size() == 14);
  std::vector<std::string> ids;
  for (const StudyCell& cell : result.cells) ids.push_back(cell.id);
  for (const char* expected :
       {"tensor_15min_perfan_huber", "tensor_15min_perfan_l2", "tensor_15min_total_huber",
        "tensor_15min_total_l2", "tensor_30min_perfan_huber", "linterp_15min", "avg5_30min",
        "n3of6_15min"})
    CHECK(std::find(ids.begin(), ids.end(), expected) != ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) CHECK(ids[i] != ids[j]);

  for (const StudyCell& cell : result.cells) {
    CHECK(cell.id == method_id(cell.spec, cell.resolution_minutes));
    CHECK(cell.report.method_id == cell.id);
    CHECK(!cell.report.results.empty());
  }

  // The whole grid reruns identically.
  const StudyResult again = run_study(ds, config);
  REQUIRE(again.cells.size() == result.cells.size());
  for (std::size_t i = 0; i < result.cells.size(); ++i)
    CHECK(reports_equal(result.cells[i].report, again.cells[i].report));
}

TEST_CASE("studies reject empty grids") {
  const Dataset ds = small_dataset(2, 20);
  StudyConfig config;
  config.methods = {};
  CHECK(code_of([&] { run_study(ds, config); }) == ErrorCode::InvalidConfig);
  config = StudyConfig{};
  config.resolutions = {};
  CHECK(code_of([&] { run_study(ds, config); }) == ErrorCode::InvalidConfig);
  config = StudyConfig{};
  config.modes = {};
  CHECK(code_of([&] { run_study(ds, config); }) == ErrorCode::InvalidConfig);
  config = StudyConfig{};
  config.losses = {};
  CHECK(code_of([&] { run_study(ds, config); }) == ErrorCode::InvalidConfig);
}
