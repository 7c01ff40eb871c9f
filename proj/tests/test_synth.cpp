#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"

#include "fanbase/pipeline.hpp"
#include "fanbase/synth.hpp"
#include "helpers.hpp"

using namespace fanbase;
using testutil::code_of;
using testutil::TempDir;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  return out;
}

Eigen::VectorXd singular_values(const FanPowerTensor& tensor, int mode) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(to_eigen(mode_unfold(tensor, mode)))
      .singularValues();
}

double tensor_max(const FanPowerTensor& tensor) {
  double m = 0.0;
  for (double v : tensor.values()) m = std::max(m, v);
  return m;
}

}  // namespace

TEST_CASE("generation is a pure function of the config") {
  SynthConfig config;
  config.slots = 96;
  config.slot_minutes = 15;
  config.fans = 3;
  config.baseline_days = 6;
  config.noise_std = 0.05;
  config.outliers = 4;
  config.seed = 21;

  const SynthResult a = generate(config);
  const SynthResult b = generate(config);
  CHECK(a.observed.values() == b.observed.values());
  CHECK(a.truth.values() == b.truth.values());
  CHECK(a.outlier_indices == b.outlier_indices);

  config.seed = 22;
  const SynthResult c = generate(config);
  CHECK_FALSE(a.observed.values() == c.observed.values());
}

TEST_CASE("the clean tensor has exactly the configured rank") {
  SynthConfig config;
  config.slots = 96;
  config.slot_minutes = 15;
  config.fans = 4;
  config.baseline_days = 10;
  config.seed = 23;

  config.rank = 1;
  const FanPowerTensor rank1 = generate(config).truth;
  for (int mode : {1, 2, 3}) {
    const Eigen::VectorXd sv = singular_values(rank1, mode);
    REQUIRE(sv.size() >= 2);
    CHECK(sv(1) < 1e-10 * sv(0));
  }

  config.rank = 2;
  const FanPowerTensor rank2 = generate(config).truth;
  const Eigen::VectorXd sv = singular_values(rank2, 1);
  REQUIRE(sv.size() >= 3);
  CHECK(sv(1) > 1e-6 * sv(0));
  CHECK(sv(2) < 1e-10 * sv(0));
}

TEST_CASE("observed power never goes negative") {
  SynthConfig config;
  config.slots = 96;
  config.slot_minutes = 15;
  config.fans = 3;
  config.baseline_days = 8;
  config.base_kw = 0.05;
  config.noise_std = 0.5;  // large against the floor, so clamping must act
  config.seed = 24;
  const SynthResult result = generate(config);
  for (double v : result.observed.values()) CHECK(v >= 0.0);
  for (double v : result.truth.values()) CHECK(v >= 0.0);
}

TEST_CASE("provided scales shape the truth multiplicatively") {
  SynthConfig config;
  config.slots = 32;
  config.slot_minutes = 15;
  config.fans = 2;
  config.baseline_days = 1;
  config.rank = 1;
  config.day_mode = {0, 360};
  config.fan_scales = {1.0, 0.5};
  config.day_scales = {1.0, 0.8};
  config.base_kw = 0.3;
  config.seed = 25;

  const FanPowerTensor truth = generate(config).truth;
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK(truth.at(i, 1, 0) == doctest::Approx(0.5 * truth.at(i, 0, 0)).epsilon(1e-12));
    CHECK(truth.at(i, 0, 1) == doctest::Approx(0.8 * truth.at(i, 0, 0)).epsilon(1e-12));
    CHECK(truth.at(i, 1, 1) == doctest::Approx(0.4 * truth.at(i, 0, 0)).epsilon(1e-12));
  }
  // Outside the day-mode bump only the night floor remains.
  CHECK(truth.at(31, 0, 0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("outliers spike to the configured factor and avoid the windows") {
  SynthConfig config;
  config.slots = 96;
  config.slot_minutes = 15;
  config.fans = 3;
  config.baseline_days = 8;
  config.outliers = 6;
  config.outlier_peak_factor = 10.0;
  config.seed = 26;

  const SynthResult result = generate(config);
  REQUIRE(result.outlier_indices.size() == 6);
  const double peak = tensor_max(result.truth);
  const std::size_t fans_days = 3 * 9;
  for (std::size_t idx = 0; idx < result.outlier_indices.size(); ++idx) {
    const std::size_t flat = result.outlier_indices[idx];
    if (idx > 0) CHECK(flat > result.outlier_indices[idx - 1]);
    CHECK(result.observed.values()[flat] == doctest::Approx(10.0 * peak).epsilon(1e-12));
    // Default windows plus settling cover slots 37..44 and 53..60.
    const std::size_t slot = flat / fans_days + 1;
    CHECK((slot < 37 || slot > 44));
    CHECK((slot < 53 || slot > 60));
  }

  config.outliers_avoid_windows = false;
  config.outliers = 200;
  const SynthResult anywhere = generate(config);
  CHECK(anywhere.outlier_indices.size() == 200);
}

TEST_CASE("synthetic datasets are labeled and ordered") {
  SynthConfig config;
  config.slots = 96;
  config.slot_minutes = 15;
  config.fans = 2;
  config.baseline_days = 3;
  config.seed = 27;
  const SynthResult result = generate(config);
  const Dataset ds = to_dataset(config, result.observed);

  CHECK(ds.meta.building == "synthetic");
  CHECK(ds.meta.fan_order == std::vector<std::string>{"F1", "F2"});
  CHECK(ds.meta.day_order ==
        std::vector<std::string>{"2024-03-01", "2024-03-02", "2024-03-03", "2024-03-04"});
  CHECK(ds.meta.event_day == "2024-03-04");
  CHECK(ds.meta.slot_minutes == 15);
  CHECK(ds.meta.slots_per_day == 96);
  CHECK(ds.meta.windows.size() == 2);
  CHECK(ds.meta.day_mode == ClockSpan{360, 1140});
  REQUIRE(ds.series.size() == 8);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 4; ++k) {
      const FanSeries& s = ds.series_at(j, k);
      REQUIRE(s.values.size() == 96);
      for (std::size_t i = 0; i < 96; ++i) CHECK(s.values[i] == result.observed.at(i, j, k));
    }
}

TEST_CASE("written files round-trip losslessly through ingestion") {
  SynthConfig config;
  config.slots = 1440;
  config.slot_minutes = 1;
  config.fans = 2;
  config.baseline_days = 5;
  config.noise_std = 0.03;
  config.seed = 28;
  const SynthResult result = generate(config);

  TempDir dir;
  const SynthFiles files =
      write_dataset_files(config, result.observed, dir.path().string(), "case");
  CHECK(files.csv_path == dir.file("case.csv"));
  CHECK(files.manifest_path == dir.file("case.toml"));

  const Dataset ds = load_dataset(files.manifest_path);
  CHECK(ds.meta.day_order.size() == 6);
  CHECK(ds.meta.event_day == "2024-03-06");
  CHECK(ds.meta.fan_order == std::vector<std::string>{"F1", "F2"});
  CHECK(ds.warnings.empty());
  std::size_t mismatches = 0;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 6; ++k) {
      const FanSeries& s = ds.series_at(j, k);
      REQUIRE(s.values.size() == 1440);
      for (std::size_t i = 0; i < 1440; ++i)
        mismatches += s.values[i] == result.observed.at(i, j, k) ? 0 : 1;
    }
  CHECK(mismatches == 0);

  CHECK(code_of([&] {
          SynthConfig coarse = config;
          coarse.slots = 96;
          coarse.slot_minutes = 15;
          write_dataset_files(coarse, generate(coarse).observed, dir.path().string(), "coarse");
        }) == ErrorCode::InvalidConfig);
}

TEST_CASE("generator configs are validated") {
  const auto failing = [](auto&& mutate) {
    SynthConfig config;
    config.slots = 96;
    config.slot_minutes = 15;
    mutate(config);
    return code_of([&] { generate(config); });
  };
  CHECK(failing([](SynthConfig& c) { c.slots = 200; }) == ErrorCode::InvalidConfig);
  CHECK(failing([](SynthConfig& c) { c.rank = 0; }) == ErrorCode::InvalidConfig);
  CHECK(failing([](SynthConfig& c) { c.fans = 0; }) == ErrorCode::InvalidConfig);
  CHECK(failing([](SynthConfig& c) { c.baseline_days = 0; }) == ErrorCode::InvalidConfig);
  CHECK(failing([](SynthConfig& c) { c.noise_std = -0.1; }) == ErrorCode::InvalidConfig);
  CHECK(failing([](SynthConfig& c) { c.fan_scales = {1.0}; }) == ErrorCode::InvalidConfig);
  CHECK(failing([](SynthConfig& c) {
          c.fan_scales.assign(c.fans * c.rank, 1.0);
          c.fan_scales[0] = -1.0;
        }) == ErrorCode::InvalidConfig);
  CHECK(failing([](SynthConfig& c) { c.day_scales = {1.0, 2.0}; }) == ErrorCode::InvalidConfig);

  // No room outside the windows means no legal outlier placement.
  SynthConfig crowded;
  crowded.slots = 4;
  crowded.slot_minutes = 15;
  crowded.fans = 1;
  crowded.baseline_days = 1;
  crowded.windows = {{"w", {0, 60}}};
  crowded.settling_minutes = 0;
  crowded.outliers = 1;
  CHECK(code_of([&] { generate(crowded); }) == ErrorCode::InvalidConfig);
}
