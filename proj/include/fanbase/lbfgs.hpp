#pragma once

#include <functional>
#include <vector>

namespace fanbase {

/// Evaluates the objective at x and writes the gradient into grad, which the
/// caller has already sized to x.size(). Returns the objective value.
using ValueAndGradient =
    std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

struct LbfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;  // on ||g||_inf / max(1, |f|)
  int memory = 10;
  int max_backtracks = 50;
  double sufficient_decrease = 1e-4;
};

enum class LbfgsStop { GradientTolerance, MaxIterations, LineSearchFailure };

struct LbfgsResult {
  std::vector<double> solution;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  LbfgsStop stop = LbfgsStop::MaxIterations;
};

/// Limited-memory BFGS with two-loop recursion and a backtracking line
/// search under the sufficient-decrease (Armijo) condition. Accepted
/// iterates are monotone non-increasing in the objective. Stops when the
/// infinity norm of the gradient divided by max(1, |f|) drops below
/// gradient_tolerance, on max_iterations, or when the line search fails.
/// Throws NonFiniteObjective if the initial evaluation is not finite;
/// non-finite values met during backtracking just shrink the step.
LbfgsResult lbfgs_minimize(const ValueAndGradient& f, std::vector<double> initial,
                           const LbfgsOptions& options = {});

}  // namespace fanbase
