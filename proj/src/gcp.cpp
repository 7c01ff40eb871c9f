#include "fanbase/gcp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "fanbase/errors.hpp"
#include "fanbase/lbfgs.hpp"
#include "fanbase/rng.hpp"

namespace fanbase {

namespace {

void check_shapes(const CpModel& model, const FanPowerTensor& tensor,
                  const ObservationMask& mask) {
  if (!(mask.dims() == tensor.dims()))
    fail(ErrorCode::DimensionMismatch, "mask shape does not match tensor shape");
  if (!(model.dims() == tensor.dims()))
    fail(ErrorCode::DimensionMismatch, "model shape does not match tensor shape");
  if (model.time_factors.cols() != model.rank || model.fan_factors.cols() != model.rank ||
      model.day_factors.cols() != model.rank)
    fail(ErrorCode::DimensionMismatch, "factor matrices disagree about the rank");
}

/// One pass over the observed entries, accumulating the objective and,
/// when grads is non-null, the factor gradients. The fused accumulation
/// equals the unfolding-times-Khatri-Rao form term by term.
double evaluate(const CpModel& model, const FanPowerTensor& tensor,
                const ObservationMask& mask, const LossSpec& spec,
                FactorGradients* grads) {
  const Dims d = tensor.dims();
  const std::size_t r = model.rank;
  double total = 0.0;
  for (std::size_t i = 0; i < d.time; ++i) {
    const double* a = model.time_factors.row(i);
    for (std::size_t j = 0; j < d.fans; ++j) {
      const double* b = model.fan_factors.row(j);
      for (std::size_t k = 0; k < d.days; ++k) {
        if (!mask.observed(i, j, k)) continue;
        const double* c = model.day_factors.row(k);
        double m = 0.0;
        for (std::size_t q = 0; q < r; ++q) m += a[q] * b[q] * c[q];
        const double p = tensor.at(i, j, k);
        total += loss_value(m, p, spec);
        if (grads != nullptr) {
          const double y = loss_derivative(m, p, spec);
          double* gt = grads->time.row(i);
          double* gf = grads->fan.row(j);
          double* gd = grads->day.row(k);
          for (std::size_t q = 0; q < r; ++q) {
            gt[q] += y * b[q] * c[q];
            gf[q] += y * a[q] * c[q];
            gd[q] += y * a[q] * b[q];
          }
        }
      }
    }
  }
  return total;
}

void check_mask_covers_every_slice(const ObservationMask& mask) {
  const Dims d = mask.dims();
  std::vector<std::size_t> time_hits(d.time, 0), fan_hits(d.fans, 0), day_hits(d.days, 0);
  for (std::size_t i = 0; i < d.time; ++i)
    for (std::size_t j = 0; j < d.fans; ++j)
      for (std::size_t k = 0; k < d.days; ++k)
        if (mask.observed(i, j, k)) {
          ++time_hits[i];
          ++fan_hits[j];
          ++day_hits[k];
        }
  auto first_zero = [](const std::vector<std::size_t>& hits) {
    for (std::size_t i = 0; i < hits.size(); ++i)
      if (hits[i] == 0) return static_cast<long>(i);
    return -1L;
  };
  if (long i = first_zero(time_hits); i >= 0)
    fail(ErrorCode::MaskDegenerate, "time slot " + std::to_string(i) + " has no observed entries");
  if (long j = first_zero(fan_hits); j >= 0)
    fail(ErrorCode::MaskDegenerate, "fan " + std::to_string(j) + " has no observed entries");
  if (long k = first_zero(day_hits); k >= 0)
    fail(ErrorCode::MaskDegenerate, "day " + std::to_string(k) + " has no observed entries");
}

CpModel unpack(const std::vector<double>& x, const Dims& d, std::size_t r) {
  CpModel model;
  model.rank = r;
  model.time_factors = Matrix(d.time, r);
  model.fan_factors = Matrix(d.fans, r);
  model.day_factors = Matrix(d.days, r);
  std::copy_n(x.data(), d.time * r, model.time_factors.data());
  std::copy_n(x.data() + d.time * r, d.fans * r, model.fan_factors.data());
  std::copy_n(x.data() + (d.time + d.fans) * r, d.days * r, model.day_factors.data());
  return model;
}

}  // namespace

std::size_t max_fit_rank(const Dims& dims) {
  return std::min({dims.time * dims.fans, dims.time * dims.days, dims.fans * dims.days});
}

double objective(const CpModel& model, const FanPowerTensor& tensor,
                 const ObservationMask& mask, const LossSpec& spec) {
  check_shapes(model, tensor, mask);
  return evaluate(model, tensor, mask, spec, nullptr);
}

FactorGradients gradient(const CpModel& model, const FanPowerTensor& tensor,
                         const ObservationMask& mask, const LossSpec& spec) {
  check_shapes(model, tensor, mask);
  const Dims d = tensor.dims();
  FactorGradients grads{Matrix(d.time, model.rank), Matrix(d.fans, model.rank),
                        Matrix(d.days, model.rank)};
  evaluate(model, tensor, mask, spec, &grads);
  return grads;
}

FitResult gcp_fit(const FanPowerTensor& tensor, const ObservationMask& mask,
                  const LossSpec& spec, const FitOptions& options) {
  if (!(mask.dims() == tensor.dims()))
    fail(ErrorCode::DimensionMismatch, "mask shape does not match tensor shape");
  if (options.rank < 1) fail(ErrorCode::InvalidConfig, "rank must be >= 1");
  if (options.trials < 1) fail(ErrorCode::InvalidConfig, "trials must be >= 1");
  if (!(options.init_scale > 0.0)) fail(ErrorCode::InvalidConfig, "init_scale must be > 0");

  const Dims d = tensor.dims();
  const std::size_t r = static_cast<std::size_t>(options.rank);
  if (r > max_fit_rank(d))
    fail(ErrorCode::RankTooLarge,
         "rank " + std::to_string(r) + " exceeds the completion bound min(TN, TS, NS) = " +
             std::to_string(max_fit_rank(d)));
  check_mask_covers_every_slice(mask);

  const std::size_t n = (d.time + d.fans + d.days) * r;
  ValueAndGradient value_and_gradient = [&](const std::vector<double>& x,
                                            std::vector<double>& grad) {
    const CpModel model = unpack(x, d, r);
    FactorGradients grads{Matrix(d.time, r), Matrix(d.fans, r), Matrix(d.days, r)};
    const double value = evaluate(model, tensor, mask, spec, &grads);
    std::copy_n(grads.time.data(), d.time * r, grad.data());
    std::copy_n(grads.fan.data(), d.fans * r, grad.data() + d.time * r);
    std::copy_n(grads.day.data(), d.days * r, grad.data() + (d.time + d.fans) * r);
    return value;
  };

  LbfgsOptions lopts;
  lopts.max_iterations = options.max_iterations;
  lopts.gradient_tolerance = options.gradient_tolerance;
  lopts.memory = options.lbfgs_memory;

  FitResult result;
  std::vector<double> best_x;
  for (int t = 0; t < options.trials; ++t) {
    Rng rng(derive_seed(options.seed, "gcp-trial", static_cast<std::uint64_t>(t)));
    std::vector<double> x0(n);
    for (double& v : x0) v = rng.uniform(0.0, options.init_scale);
    LbfgsResult run = lbfgs_minimize(value_and_gradient, std::move(x0), lopts);
    result.trial_objectives.push_back(run.value);
    result.iterations_used.push_back(run.iterations);
    result.trial_converged.push_back(run.converged);
    if (t == 0 || run.value < result.objective) {
      result.objective = run.value;
      result.best_trial = t;
      best_x = std::move(run.solution);
    }
  }
  result.model = unpack(best_x, d, r);
  return result;
}

std::pair<FanPowerTensor, FitResult> complete(const FanPowerTensor& tensor,
                                              const ObservationMask& mask,
                                              const LossSpec& spec, const FitOptions& options) {
  FitResult fit = gcp_fit(tensor, mask, spec, options);
  FanPowerTensor completed = cp_full(fit.model, tensor.slot_minutes());
  return {std::move(completed), std::move(fit)};
}

}  // namespace fanbase
