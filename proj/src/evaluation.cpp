#include "fanbase/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>
#include <utility>

#include "fanbase/errors.hpp"
#include "fanbase/metrics.hpp"
#include "fanbase/rng.hpp"

namespace fanbase {

namespace {

/// Runs body(0..count-1) over up to `threads` workers. Outputs must be
/// written into per-index slots so the schedule cannot affect results.
void run_folds(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

struct FoldOutput {
  bool evaluated = false;
  std::string skip_reason;
  std::vector<WindowResult> results;
  std::vector<FoldTrace> traces;
};

void record(FoldOutput& out, const std::string& day, const EventWindow& window,
            const std::vector<double>& estimate, const std::vector<double>& actual,
            int slot_minutes, bool nmbe_conventional) {
  WindowResult r;
  r.day = day;
  r.window_label = window.label;
  r.cv = cv_percent(estimate, actual);
  r.nmbe = nmbe_percent(estimate, actual, nmbe_conventional);
  r.aec = aec_kwh(estimate, actual, slot_minutes);
  out.results.push_back(std::move(r));

  FoldTrace t;
  t.day = day;
  t.window_label = window.label;
  t.start_slot = window.start_slot;
  t.actual = actual;
  t.estimate = estimate;
  out.traces.push_back(std::move(t));
}

MetricStats stats_of(const std::vector<double>& values) {
  MetricStats s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double squares = 0.0;
    for (double v : values) squares += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(squares / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::Tensor: return "tensor";
    case Method::LinearInterp: return "linterp";
    case Method::Avg5: return "avg5";
    case Method::Nearest3of6: return "n3of6";
  }
  return "unknown";
}

std::string method_id(const MethodSpec& spec, int resolution_minutes) {
  std::string id = method_name(spec.method) + "_" + std::to_string(resolution_minutes) + "min";
  if (spec.method == Method::Tensor) {
    id += spec.mode == TensorMode::PerFan ? "_perfan" : "_total";
    id += spec.loss.kind == LossKind::Huber ? "_huber" : "_l2";
  }
  return id;
}

MetricReport loocv(const Dataset& dataset, const MethodSpec& spec, const LoocvOptions& options) {
  if (dataset.meta.event_day.empty())
    fail(ErrorCode::InvalidConfig, "dataset has no designated event day");
  const std::size_t baseline_days = dataset.baseline_day_count();
  if (baseline_days < 1) fail(ErrorCode::EmptyDataset, "no baseline days to cross-validate");
  if (spec.method == Method::Tensor && baseline_days < 2)
    fail(ErrorCode::InsufficientHistory,
         "tensor cross-validation needs at least 2 baseline days");

  Dataset aggregated;
  const Dataset* data = &dataset;
  if (options.resolution_minutes != dataset.meta.slot_minutes) {
    aggregated = aggregate_dataset(dataset, options.resolution_minutes);
    data = &aggregated;
  }
  const DatasetMeta& meta = data->meta;
  const std::vector<EventWindow> windows =
      windows_at_resolution(meta.windows, meta.settling_minutes, meta.slot_minutes,
                            meta.slots_per_day, meta.span_start_minute);

  MetricReport report;
  report.method_id = method_id(spec, options.resolution_minutes);
  report.resolution_minutes = meta.slot_minutes;

  std::vector<FoldOutput> folds(baseline_days);

  if (spec.method == Method::Tensor) {
    const FanPowerTensor tensor = assemble_tensor(data->series, meta, spec.mode);
    const Dims dims = tensor.dims();
    // The real event day's windows hold no usable truth, so they stay
    // masked in every fold.
    const ObservationMask base_mask =
        mask_event_windows(dims, data->event_day_index(), windows);
    run_folds(baseline_days, options.threads, [&](std::size_t k) {
      ObservationMask mask = base_mask;
      for (const EventWindow& w : windows)
        for (std::size_t s = w.start_slot; s <= w.end_slot; ++s)
          for (std::size_t j = 0; j < dims.fans; ++j) mask.set(s - 1, j, k, false);
      FitOptions fit = spec.fit;
      fit.seed = derive_seed(options.seed, "fold", k);
      const BaselineEstimate estimate = estimate_baseline(tensor, mask, spec.loss, fit, k, windows);
      FoldOutput& out = folds[k];
      for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        const EventWindow& w = windows[wi];
        std::vector<double> actual;
        actual.reserve(w.length());
        for (std::size_t s = w.start_slot; s <= w.end_slot; ++s) {
          double sum = 0.0;
          for (std::size_t j = 0; j < dims.fans; ++j) sum += tensor.at(s - 1, j, k);
          actual.push_back(sum);
        }
        record(out, meta.day_order[k], w, estimate.totals[wi], actual, meta.slot_minutes,
               options.nmbe_conventional);
      }
      out.evaluated = true;
    });
  } else {
    const std::vector<std::size_t> distance_slots =
        spec.method == Method::Nearest3of6
            ? non_event_day_mode_slots(meta.day_mode, windows, meta.slot_minutes,
                                       meta.slots_per_day, meta.span_start_minute)
            : std::vector<std::size_t>{};
    run_folds(baseline_days, options.threads, [&](std::size_t k) {
      FoldOutput& out = folds[k];
      const DayHistory history = build_day_history(*data, k + 1);
      try {
        for (const EventWindow& w : windows) {
          std::vector<double> estimate;
          switch (spec.method) {
            case Method::LinearInterp:
              estimate = linear_interp_baseline(history.event_series(), w, meta.slot_minutes,
                                                spec.benchmark.fit_minutes);
              break;
            case Method::Avg5:
              estimate = avg5_baseline(history, w, spec.benchmark.context_minutes);
              break;
            case Method::Nearest3of6:
              estimate = nearest3of6_baseline(history, w, distance_slots,
                                              spec.benchmark.context_minutes,
                                              spec.benchmark.profile_distance);
              break;
            case Method::Tensor:
              break;
          }
          const std::vector<double> actual(
              history.event_series().begin() + static_cast<std::ptrdiff_t>(w.start_slot) - 1,
              history.event_series().begin() + static_cast<std::ptrdiff_t>(w.end_slot));
          record(out, meta.day_order[k], w, estimate, actual, meta.slot_minutes,
                 options.nmbe_conventional);
        }
        out.evaluated = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientHistory) throw;
        out.results.clear();
        out.traces.clear();
        out.skip_reason = e.what();
      }
    });
  }

  for (std::size_t k = 0; k < baseline_days; ++k) {
    FoldOutput& out = folds[k];
    if (!out.skip_reason.empty()) {
      report.warnings.push_back("skipped day " + meta.day_order[k] + " for " + report.method_id +
                                " (" + out.skip_reason + ")");
      continue;
    }
    if (!out.evaluated) continue;
    report.evaluated_days.push_back(meta.day_order[k]);
    for (WindowResult& r : out.results) report.results.push_back(std::move(r));
    for (FoldTrace& t : out.traces) report.traces.push_back(std::move(t));
  }
  if (report.results.empty())
    fail(ErrorCode::InsufficientHistory,
         report.method_id + " could not evaluate any fold (not enough prior days)");

  for (const EventWindow& w : windows) {
    std::vector<double> cvs, nmbes, aecs;
    for (const WindowResult& r : report.results)
      if (r.window_label == w.label) {
        cvs.push_back(r.cv);
        nmbes.push_back(r.nmbe);
        aecs.push_back(r.aec);
      }
    WindowAggregate agg;
    agg.window_label = w.label;
    agg.folds = cvs.size();
    agg.cv = stats_of(cvs);
    agg.nmbe = stats_of(nmbes);
    agg.aec = stats_of(aecs);
    if (aecs.size() >= 2) agg.aec_ci_half_width = confidence_interval(aecs).half_width;
    report.aggregates.push_back(std::move(agg));
  }
  return report;
}

}  // namespace fanbase
