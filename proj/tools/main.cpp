#include <cstdint>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "fanbase/errors.hpp"
#include "fanbase/evaluation.hpp"
#include "fanbase/manifest.hpp"
#include "fanbase/pipeline.hpp"
#include "fanbase/report.hpp"
#include "fanbase/study.hpp"
#include "fanbase/synth.hpp"

using namespace fanbase;

namespace {

// 0 success, 1 input/config problem, 2 numerical failure.
int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteObjective:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::ZeroMeanActual:
      return 2;
    default:
      return 1;
  }
}

struct DataFlags {
  std::string manifest;
  std::string out = "out";
  std::string span;
  double max_missing = 0.05;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("--manifest", flags.manifest, "dataset manifest path")->required();
  cmd->add_option("--out", flags.out, "output directory")->capture_default_str();
  cmd->add_option("--span", flags.span, "restrict the analysis to a clock span HH:MM-HH:MM");
  cmd->add_option("--max-missing", flags.max_missing,
                  "drop a day when a fan is missing more than this fraction of its slots")
      ->capture_default_str();
}

struct FitFlags {
  FitOptions fit;
  double delta = 0.25;
  double delta_scale = 0.0;
  CLI::Option* delta_scale_opt = nullptr;

  bool delta_scaled() const { return delta_scale_opt != nullptr && delta_scale_opt->count() > 0; }
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
  cmd->add_option("--rank", flags.fit.rank, "CP rank")->capture_default_str();
  cmd->add_option("--trials", flags.fit.trials, "random restarts; the best objective wins")
      ->capture_default_str();
  cmd->add_option("--max-iterations", flags.fit.max_iterations, "iteration cap per restart")
      ->capture_default_str();
  cmd->add_option("--gtol", flags.fit.gradient_tolerance, "relative gradient-norm tolerance")
      ->capture_default_str();
  cmd->add_option("--memory", flags.fit.lbfgs_memory, "L-BFGS history pairs")
      ->capture_default_str();
  cmd->add_option("--init-scale", flags.fit.init_scale, "factors start uniform on [0, s]")
      ->capture_default_str();
  auto* delta_opt =
      cmd->add_option("--delta", flags.delta, "Huber breakpoint (kW)")->capture_default_str();
  flags.delta_scale_opt =
      cmd->add_option("--delta-scale", flags.delta_scale,
                      "Huber breakpoint as a factor of the median day-mode reading");
  flags.delta_scale_opt->excludes(delta_opt);
}

TensorMode make_mode(const std::string& name) {
  if (name == "perfan") return TensorMode::PerFan;
  if (name == "total") return TensorMode::Total;
  fail(ErrorCode::InvalidConfig, "unknown mode: " + name + " (expected perfan or total)");
}

LossSpec make_loss(const std::string& name, double delta) {
  if (name == "huber") return LossSpec::huber(delta);
  if (name == "l2") return LossSpec::squared_error();
  fail(ErrorCode::InvalidConfig, "unknown loss: " + name + " (expected huber or l2)");
}

Method make_method(const std::string& name) {
  if (name == "tensor") return Method::Tensor;
  if (name == "linterp") return Method::LinearInterp;
  if (name == "avg5") return Method::Avg5;
  if (name == "n3of6") return Method::Nearest3of6;
  fail(ErrorCode::InvalidConfig,
       "unknown method: " + name + " (expected tensor, linterp, avg5 or n3of6)");
}

Dataset prepare_dataset(const DataFlags& flags) {
  Dataset dataset = load_dataset(flags.manifest, flags.max_missing);
  if (!flags.span.empty()) dataset = restrict_dataset(dataset, parse_clock_span(flags.span));
  for (const std::string& w : dataset.warnings) std::cerr << "warning: " << w << "\n";
  return dataset;
}

int cmd_estimate(const DataFlags& data, FitFlags& flags, const std::string& mode_arg,
                 const std::string& loss_arg, int resolution, std::uint64_t seed) {
  Dataset dataset = prepare_dataset(data);
  if (resolution != dataset.meta.slot_minutes) dataset = aggregate_dataset(dataset, resolution);

  const TensorMode mode = make_mode(mode_arg);
  if (flags.delta_scaled()) flags.delta = scaled_huber_delta(dataset, flags.delta_scale);
  const LossSpec loss = make_loss(loss_arg, flags.delta);
  flags.fit.seed = seed;

  const DatasetMeta& meta = dataset.meta;
  const std::vector<EventWindow> windows =
      windows_at_resolution(meta.windows, meta.settling_minutes, meta.slot_minutes,
                            meta.slots_per_day, meta.span_start_minute);
  const FanPowerTensor tensor = assemble_tensor(dataset.series, meta, mode);
  const ObservationMask mask =
      mask_event_windows(tensor.dims(), dataset.event_day_index(), windows);
  BaselineEstimate estimate =
      estimate_baseline(tensor, mask, loss, flags.fit, dataset.event_day_index(), windows);

  const FitResult& fr = estimate.fit;
  std::printf("fit: objective %.6g, best trial %d of %d, %d iterations%s\n", fr.objective,
              fr.best_trial + 1, static_cast<int>(fr.trial_objectives.size()),
              fr.iterations_used[static_cast<std::size_t>(fr.best_trial)],
              fr.trial_converged[static_cast<std::size_t>(fr.best_trial)]
                  ? ""
                  : " (hit the iteration cap)");
  for (std::size_t w = 0; w < estimate.windows.size(); ++w) {
    const EventWindow& window = estimate.windows[w];
    const std::vector<double>& totals = estimate.totals[w];
    const double sum = std::accumulate(totals.begin(), totals.end(), 0.0);
    std::printf("%s slots %zu..%zu: mean %.3f kW, %.3f kWh\n", window.label.c_str(),
                window.start_slot, window.end_slot,
                totals.empty() ? 0.0 : sum / static_cast<double>(totals.size()),
                sum * meta.slot_minutes / 60.0);
  }

  EstimateReport report;
  report.meta = meta;
  report.mode = mode;
  report.loss = loss;
  report.fit = flags.fit;
  report.masked_entries = mask.dims().count() - mask.observed_count();
  report.estimate = std::move(estimate);
  report.warnings = dataset.warnings;
  for (const std::string& path : write_estimate_reports(data.out, report))
    std::cout << "wrote " << path << "\n";
  return 0;
}

struct StudyFlags {
  std::vector<std::string> methods{"tensor", "linterp", "avg5", "n3of6"};
  std::vector<int> resolutions{1, 5, 15, 30};
  std::vector<std::string> modes{"perfan"};
  std::vector<std::string> losses{"huber"};
  BenchmarkOptions benchmark;
  bool nmbe_conventional = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

int cmd_study(const DataFlags& data, FitFlags& flags, const StudyFlags& study) {
  Dataset dataset = prepare_dataset(data);
  if (flags.delta_scaled()) flags.delta = scaled_huber_delta(dataset, flags.delta_scale);

  StudyConfig config;
  config.methods.clear();
  for (const std::string& name : study.methods) config.methods.push_back(make_method(name));
  config.resolutions = study.resolutions;
  config.modes.clear();
  for (const std::string& name : study.modes) config.modes.push_back(make_mode(name));
  config.losses.clear();
  for (const std::string& name : study.losses) config.losses.push_back(make_loss(name, flags.delta));
  config.fit = flags.fit;
  config.benchmark = study.benchmark;
  config.seed = study.seed;
  config.nmbe_conventional = study.nmbe_conventional;
  config.threads = study.threads;

  const StudyResult result = run_study(dataset, config);
  for (const StudyCell& cell : result.cells) {
    for (const WindowAggregate& a : cell.report.aggregates) {
      std::printf("%-30s %-12s CV %8.3f%%  NMBE %+9.3f%%  AEC %10.3f kWh  folds %zu\n",
                  cell.id.c_str(), a.window_label.c_str(), a.cv.mean, a.nmbe.mean, a.aec.mean,
                  a.folds);
    }
  }
  for (const std::string& path : write_study_reports(data.out, dataset, config, result))
    std::cout << "wrote " << path << "\n";
  return 0;
}

struct SynthFlags {
  std::string out = "out";
  std::string basename = "synth";
  std::size_t fans = 4;
  std::size_t days = 20;
  std::size_t rank = 2;
  double base = 0.4;
  double peak = 2.0;
  double noise = 0.0;
  std::size_t outliers = 0;
  double outlier_magnitude = 10.0;
  std::string day_mode;
  std::vector<std::string> windows;
  int settling = 60;
  std::uint64_t seed = 1;
};

int cmd_synth(const SynthFlags& flags) {
  SynthConfig config;
  config.slots = 1440;
  config.slot_minutes = 1;
  config.fans = flags.fans;
  config.baseline_days = flags.days;
  config.rank = flags.rank;
  config.base_kw = flags.base;
  config.peak_kw = flags.peak;
  config.noise_std = flags.noise;
  config.outliers = flags.outliers;
  config.outlier_peak_factor = flags.outlier_magnitude;
  config.settling_minutes = flags.settling;
  config.seed = flags.seed;
  if (!flags.day_mode.empty()) config.day_mode = parse_clock_span(flags.day_mode);
  if (!flags.windows.empty()) {
    config.windows.clear();
    for (const std::string& text : flags.windows) {
      const std::size_t eq = text.find('=');
      if (eq == std::string::npos || eq == 0)
        fail(ErrorCode::InvalidConfig, "window must be label=HH:MM-HH:MM, got: " + text);
      config.windows.push_back({text.substr(0, eq), parse_clock_span(text.substr(eq + 1))});
    }
  }

  const SynthResult result = generate(config);
  const SynthFiles files = write_dataset_files(config, result.observed, flags.out, flags.basename);
  std::printf("generated %zu days x %zu fans at 1-minute resolution (%zu outliers)\n",
              config.baseline_days + 1, config.fans, result.outlier_indices.size());
  std::cout << "wrote " << files.csv_path << "\nwrote " << files.manifest_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual fan-power baselines for demand-response event windows"};
  app.require_subcommand(1);

  CLI::App* estimate = app.add_subcommand(
      "estimate", "Fit the completion model and write the event-day baseline");
  DataFlags est_data;
  FitFlags est_fit;
  std::string est_mode = "perfan";
  std::string est_loss = "huber";
  int est_resolution = 15;
  std::uint64_t est_seed = 0;
  add_data_flags(estimate, est_data);
  estimate->add_option("--resolution", est_resolution, "slot length in minutes")
      ->capture_default_str();
  estimate->add_option("--mode", est_mode, "perfan | total")->capture_default_str();
  estimate->add_option("--loss", est_loss, "huber | l2")->capture_default_str();
  add_fit_flags(estimate, est_fit);
  estimate->add_option("--seed", est_seed, "fit seed")->capture_default_str();

  CLI::App* study = app.add_subcommand(
      "study", "Cross-validate methods across resolutions and write the comparison reports");
  DataFlags study_data;
  FitFlags study_fit;
  StudyFlags study_flags;
  add_data_flags(study, study_data);
  study->add_option("--methods", study_flags.methods, "tensor | linterp | avg5 | n3of6")
      ->delimiter(',')
      ->capture_default_str();
  study->add_option("--resolutions", study_flags.resolutions, "slot lengths in minutes")
      ->delimiter(',')
      ->capture_default_str();
  study->add_option("--modes", study_flags.modes, "tensor modes: perfan | total")
      ->delimiter(',')
      ->capture_default_str();
  study->add_option("--losses", study_flags.losses, "tensor losses: huber | l2")
      ->delimiter(',')
      ->capture_default_str();
  add_fit_flags(study, study_fit);
  study->add_option("--fit-minutes", study_flags.benchmark.fit_minutes,
                    "interpolation fit period on each side of the window")
      ->capture_default_str();
  study->add_option("--context-minutes", study_flags.benchmark.context_minutes,
                    "additive-adjustment anchor period before the window")
      ->capture_default_str();
  study->add_flag("--profile-distance", study_flags.benchmark.profile_distance,
                  "select similar days by per-slot L2 distance instead of energy difference");
  study->add_flag("--nmbe-conventional", study_flags.nmbe_conventional,
                  "divide NMBE by n instead of n-1");
  study->add_option("--seed", study_flags.seed, "study seed")->capture_default_str();
  study->add_option("--threads", study_flags.threads, "parallelism cap across folds")
      ->capture_default_str();

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic low-rank dataset (1-minute CSV plus manifest)");
  SynthFlags synth_flags;
  synth->add_option("--out", synth_flags.out, "output directory")->capture_default_str();
  synth->add_option("--basename", synth_flags.basename, "output file basename")
      ->capture_default_str();
  synth->add_option("--fans", synth_flags.fans, "fan count")->capture_default_str();
  synth->add_option("--days", synth_flags.days, "baseline day count (event day is appended)")
      ->capture_default_str();
  synth->add_option("--rank", synth_flags.rank, "true rank of the generated tensor")
      ->capture_default_str();
  synth->add_option("--base", synth_flags.base, "night floor (kW)")->capture_default_str();
  synth->add_option("--peak", synth_flags.peak, "daily bump amplitude (kW)")
      ->capture_default_str();
  synth->add_option("--noise", synth_flags.noise, "Gaussian noise std (kW)")
      ->capture_default_str();
  synth->add_option("--outliers", synth_flags.outliers, "injected outlier count")
      ->capture_default_str();
  synth->add_option("--outlier-magnitude", synth_flags.outlier_magnitude,
                    "outlier value as a factor of the truth peak")
      ->capture_default_str();
  synth->add_option("--day-mode", synth_flags.day_mode, "occupied span HH:MM-HH:MM");
  synth->add_option("--window", synth_flags.windows,
                    "event window as label=HH:MM-HH:MM (repeatable; replaces the defaults)");
  synth->add_option("--settling", synth_flags.settling, "settling minutes after each window")
      ->capture_default_str();
  synth->add_option("--seed", synth_flags.seed, "generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (estimate->parsed())
      return cmd_estimate(est_data, est_fit, est_mode, est_loss, est_resolution, est_seed);
    if (study->parsed()) return cmd_study(study_data, study_fit, study_flags);
    return cmd_synth(synth_flags);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
