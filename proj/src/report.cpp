#include "fanbase/report.hpp"

#include <cstddef>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"

#include "fanbase/io.hpp"
#include "fanbase/manifest.hpp"

namespace fanbase {
namespace {

using nlohmann::ordered_json;

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string clock_label(int span_start_minute, std::size_t slot, int slot_minutes) {
  return format_clock_minutes(span_start_minute + static_cast<int>(slot - 1) * slot_minutes);
}

std::string span_text(ClockSpan span) {
  return format_clock_minutes(span.start_minute) + "-" + format_clock_minutes(span.end_minute);
}

const char* mode_name(TensorMode mode) {
  return mode == TensorMode::PerFan ? "perfan" : "total";
}

ordered_json loss_to_json(const LossSpec& spec) {
  ordered_json j;
  j["kind"] = spec.kind == LossKind::Huber ? "huber" : "l2";
  if (spec.kind == LossKind::Huber) j["delta_kw"] = spec.delta;
  return j;
}

ordered_json fit_options_to_json(const FitOptions& fit) {
  ordered_json j;
  j["rank"] = fit.rank;
  j["trials"] = fit.trials;
  j["seed"] = fit.seed;
  j["max_iterations"] = fit.max_iterations;
  j["gradient_tolerance"] = fit.gradient_tolerance;
  j["lbfgs_memory"] = fit.lbfgs_memory;
  j["init_scale"] = fit.init_scale;
  return j;
}

ordered_json stats_to_json(const MetricStats& stats) {
  return ordered_json{{"mean", stats.mean}, {"stddev", stats.stddev}};
}

}  // namespace

std::string estimate_json(const EstimateReport& report) {
  const DatasetMeta& meta = report.meta;
  ordered_json j;
  j["building"] = meta.building;
  j["event_day"] = meta.event_day;
  j["resolution_minutes"] = meta.slot_minutes;
  j["mode"] = mode_name(report.mode);
  j["loss"] = loss_to_json(report.loss);
  j["fit_options"] = fit_options_to_json(report.fit);

  ordered_json dims;
  dims["time_slots"] = meta.slots_per_day;
  dims["fans"] = report.mode == TensorMode::PerFan ? meta.fan_order.size() : std::size_t{1};
  dims["days"] = meta.day_order.size();
  j["dims"] = dims;
  j["masked_entries"] = report.masked_entries;

  const FitResult& fit = report.estimate.fit;
  ordered_json f;
  f["objective"] = fit.objective;
  f["best_trial"] = fit.best_trial;
  f["trial_objectives"] = fit.trial_objectives;
  f["trial_iterations"] = fit.iterations_used;
  f["trial_converged"] = fit.trial_converged;
  j["fit"] = f;

  ordered_json windows = ordered_json::array();
  for (std::size_t w = 0; w < report.estimate.windows.size(); ++w) {
    const EventWindow& window = report.estimate.windows[w];
    const std::vector<double>& totals = report.estimate.totals[w];
    ordered_json entry;
    entry["label"] = window.label;
    for (const WindowSpec& spec : meta.windows) {
      if (spec.label != window.label) continue;
      entry["test_span"] = span_text(spec.span);
      entry["event_span"] =
          span_text({spec.span.start_minute, spec.span.end_minute + meta.settling_minutes});
      break;
    }
    entry["start_slot"] = window.start_slot;
    entry["end_slot"] = window.end_slot;
    const double sum = std::accumulate(totals.begin(), totals.end(), 0.0);
    entry["mean_kw"] = totals.empty() ? 0.0 : sum / static_cast<double>(totals.size());
    entry["energy_kwh"] = sum * meta.slot_minutes / 60.0;
    windows.push_back(entry);
  }
  j["windows"] = windows;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string estimate_csv(const EstimateReport& report) {
  std::string out = "window,slot,clock,baseline_kw\n";
  for (std::size_t w = 0; w < report.estimate.windows.size(); ++w) {
    const EventWindow& window = report.estimate.windows[w];
    const std::vector<double>& totals = report.estimate.totals[w];
    for (std::size_t i = 0; i < totals.size(); ++i) {
      const std::size_t slot = window.start_slot + i;
      out += csv_field(window.label);
      out += ',';
      out += std::to_string(slot);
      out += ',';
      out += clock_label(report.meta.span_start_minute, slot, report.meta.slot_minutes);
      out += ',';
      out += format_double(totals[i]);
      out += '\n';
    }
  }
  return out;
}

std::vector<std::string> write_estimate_reports(const std::string& directory,
                                                const EstimateReport& report) {
  namespace fs = std::filesystem;
  const std::string csv_path = (fs::path(directory) / "baseline.csv").string();
  const std::string json_path = (fs::path(directory) / "fit.json").string();
  write_text_atomic(csv_path, estimate_csv(report));
  write_text_atomic(json_path, estimate_json(report));
  return {csv_path, json_path};
}

std::string study_json(const Dataset& dataset, const StudyConfig& config,
                       const StudyResult& result) {
  const DatasetMeta& meta = dataset.meta;
  ordered_json j;
  j["building"] = meta.building;
  j["event_day"] = meta.event_day;
  ordered_json baseline_days = ordered_json::array();
  for (std::size_t d = 0; d < dataset.baseline_day_count(); ++d)
    baseline_days.push_back(meta.day_order[d]);
  j["baseline_days"] = baseline_days;
  ordered_json windows = ordered_json::array();
  for (const WindowSpec& spec : meta.windows) {
    ordered_json entry;
    entry["label"] = spec.label;
    entry["test_span"] = span_text(spec.span);
    entry["event_span"] =
        span_text({spec.span.start_minute, spec.span.end_minute + meta.settling_minutes});
    windows.push_back(entry);
  }
  j["windows"] = windows;
  j["settling_minutes"] = meta.settling_minutes;
  j["day_mode"] = span_text(meta.day_mode);
  j["seed"] = config.seed;
  j["nmbe_divisor"] = config.nmbe_conventional ? "n" : "n-1";

  ordered_json cells = ordered_json::array();
  for (const StudyCell& cell : result.cells) {
    ordered_json c;
    c["id"] = cell.id;
    c["method"] = method_name(cell.spec.method);
    c["resolution_minutes"] = cell.resolution_minutes;
    if (cell.spec.method == Method::Tensor) {
      c["mode"] = mode_name(cell.spec.mode);
      c["loss"] = loss_to_json(cell.spec.loss);
      c["rank"] = cell.spec.fit.rank;
      c["trials"] = cell.spec.fit.trials;
    }
    c["evaluated_days"] = cell.report.evaluated_days;
    ordered_json folds = ordered_json::array();
    for (const WindowResult& r : cell.report.results) {
      ordered_json fold;
      fold["day"] = r.day;
      fold["window"] = r.window_label;
      fold["cv_percent"] = r.cv;
      fold["nmbe_percent"] = r.nmbe;
      fold["aec_kwh"] = r.aec;
      folds.push_back(fold);
    }
    c["folds"] = folds;
    ordered_json aggregates = ordered_json::array();
    for (const WindowAggregate& a : cell.report.aggregates) {
      ordered_json entry;
      entry["window"] = a.window_label;
      entry["folds"] = a.folds;
      entry["cv_percent"] = stats_to_json(a.cv);
      entry["nmbe_percent"] = stats_to_json(a.nmbe);
      ordered_json aec = stats_to_json(a.aec);
      aec["ci95_half_width"] = a.aec_ci_half_width;
      entry["aec_kwh"] = aec;
      aggregates.push_back(entry);
    }
    c["aggregates"] = aggregates;
    c["warnings"] = cell.report.warnings;
    cells.push_back(c);
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

std::string study_folds_csv(const StudyResult& result) {
  std::string out = "cell_id,method,resolution_minutes,day,window,metric,value\n";
  for (const StudyCell& cell : result.cells) {
    for (const WindowResult& r : cell.report.results) {
      const auto row = [&](const char* metric, double value) {
        out += cell.id;
        out += ',';
        out += method_name(cell.spec.method);
        out += ',';
        out += std::to_string(cell.resolution_minutes);
        out += ',';
        out += r.day;
        out += ',';
        out += csv_field(r.window_label);
        out += ',';
        out += metric;
        out += ',';
        out += format_double(value);
        out += '\n';
      };
      row("cv_percent", r.cv);
      row("nmbe_percent", r.nmbe);
      row("aec_kwh", r.aec);
    }
  }
  return out;
}

std::string study_summary_csv(const StudyResult& result) {
  std::string out = "cell_id,method,resolution_minutes,window,metric,folds,mean,stddev,ci95_half_width\n";
  for (const StudyCell& cell : result.cells) {
    for (const WindowAggregate& a : cell.report.aggregates) {
      const auto row = [&](const char* metric, const MetricStats& stats, const std::string& ci) {
        out += cell.id;
        out += ',';
        out += method_name(cell.spec.method);
        out += ',';
        out += std::to_string(cell.resolution_minutes);
        out += ',';
        out += csv_field(a.window_label);
        out += ',';
        out += metric;
        out += ',';
        out += std::to_string(a.folds);
        out += ',';
        out += format_double(stats.mean);
        out += ',';
        out += format_double(stats.stddev);
        out += ',';
        out += ci;
        out += '\n';
      };
      row("cv_percent", a.cv, "");
      row("nmbe_percent", a.nmbe, "");
      row("aec_kwh", a.aec, format_double(a.aec_ci_half_width));
    }
  }
  return out;
}

std::string cell_plot_csv(const StudyCell& cell, int span_start_minute) {
  std::string out = "day,window,slot,clock,actual_kw,estimate_kw\n";
  for (const FoldTrace& trace : cell.report.traces) {
    for (std::size_t i = 0; i < trace.actual.size(); ++i) {
      const std::size_t slot = trace.start_slot + i;
      out += trace.day;
      out += ',';
      out += csv_field(trace.window_label);
      out += ',';
      out += std::to_string(slot);
      out += ',';
      out += clock_label(span_start_minute, slot, cell.resolution_minutes);
      out += ',';
      out += format_double(trace.actual[i]);
      out += ',';
      out += format_double(trace.estimate[i]);
      out += '\n';
    }
  }
  return out;
}

std::vector<std::string> write_study_reports(const std::string& directory, const Dataset& dataset,
                                             const StudyConfig& config, const StudyResult& result) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  const auto emit = [&](const fs::path& path, const std::string& content) {
    write_text_atomic(path.string(), content);
    paths.push_back(path.string());
  };
  const fs::path root(directory);
  emit(root / "study.json", study_json(dataset, config, result));
  emit(root / "folds.csv", study_folds_csv(result));
  emit(root / "summary.csv", study_summary_csv(result));
  for (const StudyCell& cell : result.cells)
    emit(root / "plots" / (cell.id + ".csv"), cell_plot_csv(cell, dataset.meta.span_start_minute));
  return paths;
}

}  // namespace fanbase
