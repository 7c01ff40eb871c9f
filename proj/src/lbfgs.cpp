#include "fanbase/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <utility>

#include "fanbase/errors.hpp"

namespace fanbase {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double one_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho = 0.0;
};

}  // namespace

LbfgsResult lbfgs_minimize(const ValueAndGradient& f, std::vector<double> initial,
                           const LbfgsOptions& options) {
  const std::size_t n = initial.size();
  std::vector<double> x = std::move(initial);
  std::vector<double> grad(n, 0.0);
  double fx = f(x, grad);
  if (!std::isfinite(fx) || !all_finite(grad))
    fail(ErrorCode::NonFiniteObjective, "objective or gradient not finite at the initial point");

  std::deque<CurvaturePair> history;
  std::vector<double> direction(n), alpha;
  std::vector<double> x_trial(n), grad_trial(n, 0.0);
  LbfgsResult result;

  int iter = 0;
  while (true) {
    if (inf_norm(grad) / std::max(1.0, std::abs(fx)) <= options.gradient_tolerance) {
      result.converged = true;
      result.stop = LbfgsStop::GradientTolerance;
      break;
    }
    if (iter >= options.max_iterations) {
      result.stop = LbfgsStop::MaxIterations;
      break;
    }

    // Two-loop recursion: direction = -(approximate inverse Hessian) * grad.
    direction = grad;
    alpha.assign(history.size(), 0.0);
    for (std::size_t h = history.size(); h-- > 0;) {
      const CurvaturePair& p = history[h];
      alpha[h] = p.rho * dot(p.s, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha[h] * p.y[i];
    }
    if (!history.empty()) {
      const CurvaturePair& last = history.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& d : direction) d *= gamma;
    }
    for (std::size_t h = 0; h < history.size(); ++h) {
      const CurvaturePair& p = history[h];
      const double beta = p.rho * dot(p.y, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha[h] - beta) * p.s[i];
    }
    for (double& d : direction) d = -d;

    double dir_deriv = dot(grad, direction);
    if (!(dir_deriv < 0.0)) {
      // Stale curvature produced an ascent direction; restart from steepest
      // descent.
      history.clear();
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      dir_deriv = dot(grad, direction);
      if (!(dir_deriv < 0.0)) {
        result.stop = LbfgsStop::LineSearchFailure;
        break;
      }
    }

    double step = history.empty() ? std::min(1.0, 1.0 / one_norm(grad)) : 1.0;
    // Below this the trial point is bitwise-identical to x in every coordinate
    // that matters, so further halving can only spin.
    const double min_step_norm = 1e-16 * (1.0 + inf_norm(x));
    double f_trial = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      if (step * inf_norm(direction) <= min_step_norm) break;
      for (std::size_t i = 0; i < n; ++i) x_trial[i] = x[i] + step * direction[i];
      f_trial = f(x_trial, grad_trial);
      if (std::isfinite(f_trial) && all_finite(grad_trial) &&
          f_trial <= fx + options.sufficient_decrease * step * dir_deriv) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.stop = LbfgsStop::LineSearchFailure;
      break;
    }

    CurvaturePair pair;
    pair.s.resize(n);
    pair.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = x_trial[i] - x[i];
      pair.y[i] = grad_trial[i] - grad[i];
    }
    const double sy = dot(pair.s, pair.y);
    const double guard =
        1e-10 * std::sqrt(dot(pair.s, pair.s)) * std::sqrt(dot(pair.y, pair.y));
    if (sy > guard && sy > 0.0) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (history.size() > static_cast<std::size_t>(std::max(1, options.memory)))
        history.pop_front();
    }

    x.swap(x_trial);
    grad.swap(grad_trial);
    fx = f_trial;
    ++iter;
  }

  result.solution = std::move(x);
  result.value = fx;
  result.iterations = iter;
  return result;
}

}  // namespace fanbase
