#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fanbase/loss.hpp"
#include "fanbase/tensor.hpp"

namespace fanbase {

struct FitOptions {
  int rank = 12;
  int trials = 4;
  std::uint64_t seed = 0;
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;  // on ||grad||_inf / max(1, |objective|)
  int lbfgs_memory = 10;
  double init_scale = 1.0;  // factors start i.i.d. uniform on [0, init_scale]
};

struct FitResult {
  CpModel model;
  double objective = 0.0;
  int best_trial = 0;
  std::vector<double> trial_objectives;
  std::vector<int> iterations_used;
  std::vector<bool> trial_converged;
};

/// Largest admissible fit rank for the given shape: min(T*N, T*S, N*S).
/// Above this the completion is underdetermined and the masked entries
/// become arbitrary.
std::size_t max_fit_rank(const Dims& dims);

/// Masked fitting objective: the loss summed over observed entries only.
double objective(const CpModel& model, const FanPowerTensor& tensor,
                 const ObservationMask& mask, const LossSpec& spec);

struct FactorGradients {
  Matrix time;  // T x r
  Matrix fan;   // N x r
  Matrix day;   // S x r
};

/// Gradient of objective() with respect to each factor matrix. Equals the
/// mode-n unfolding of the elementwise loss-derivative tensor (zero off the
/// mask) times the Khatri-Rao product of the other two factors; computed
/// here in one fused pass over observed entries.
FactorGradients gradient(const CpModel& model, const FanPowerTensor& tensor,
                         const ObservationMask& mask, const LossSpec& spec);

/// Fits a rank-r CP model to the observed entries by running
/// options.trials independent L-BFGS minimizations from random starts
/// (trial t is seeded from options.seed and t) and keeping the trial with
/// the smallest final objective; ties go to the lowest trial index.
/// Throws RankTooLarge past the max_fit_rank bound and MaskDegenerate if
/// some time slot, fan, or day has no observed entry at all.
FitResult gcp_fit(const FanPowerTensor& tensor, const ObservationMask& mask,
                  const LossSpec& spec, const FitOptions& options);

/// Fits and densifies: every entry of the returned tensor, observed or not,
/// is the model value. Callers read baseline estimates out of the masked
/// positions.
std::pair<FanPowerTensor, FitResult> complete(const FanPowerTensor& tensor,
                                              const ObservationMask& mask,
                                              const LossSpec& spec,
                                              const FitOptions& options);

}  // namespace fanbase
