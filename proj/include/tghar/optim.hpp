#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tghar::optim {

using Objective = std::function<double(std::span<const double>)>;

struct Options {
  double f_tol = 1e-9;       // simplex function spread, relative to 1+|best|
  double x_tol = 1e-8;       // simplex diameter
  std::size_t max_evals = 4000;
  double init_step = 0.25;   // per-coordinate initial simplex offset
};

struct Result {
  std::vector<double> x;
  double fval = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimizer (adaptive expansion/contraction
/// factors scaled by dimension). Non-finite objective values are treated
/// as +infinity.
Result nelder_mead(const Objective& f, std::span<const double> x0,
                   const Options& opt = {});

}  // namespace tghar::optim
