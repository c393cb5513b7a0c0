#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tghar/model.hpp"

namespace tghar::fit {

struct Config {
  model::Variant variant = model::Variant::Latent;
  std::size_t max_order = 6;          // ceiling for select_order
  std::size_t k = 0;                  // error-variant conditioning length;
                                      // 0 means "order" (or max_order during
                                      // selection)
  std::size_t multistarts = 5;
  std::size_t max_evals = 3000;       // per simplex run
  double f_tol = 1e-9;
  double x_tol = 1e-8;
  bool use_table = true;              // piecewise-linear inverse in the
                                      // objective
  std::uint64_t seed = 0;             // drives multistart jitter only
  std::optional<double> fix_xi;
  std::optional<double> fix_omega;
  std::optional<double> fix_g;
  std::optional<double> fix_h;
};

struct Result {
  model::Spec spec;
  double loglik = 0.0;
  double bic = 0.0;
  std::size_t order = 0;
  std::size_t n_used = 0;      // observations entering the likelihood
  std::size_t k = 0;           // conditioning length actually used
  bool converged = false;
  std::size_t evaluations = 0;
  std::size_t starts_tried = 0;
};

/// Data-driven starting point in natural coordinates
/// (xi, omega, g, h, beta..., phi...): robust location/scale, octile
/// skewness for g, h = 0.05, least-squares beta, Yule-Walker phi on the
/// rough back-transform. Throws std::domain_error on degenerate data.
std::vector<double> initial_values(const model::Series& data, std::size_t p,
                                   model::Variant variant);

/// Joint maximum approximated-likelihood fit at fixed order p. Searches in
/// unconstrained coordinates (xi, log omega, g, softplus-inverse h,
/// beta, atanh of the partial autocorrelations) from `multistarts` points
/// and keeps the best optimum.
Result fit(const model::Series& data, std::size_t p, const Config& cfg);

/// Fits p = 0..max_order and returns the BIC minimizer. The error-variant
/// conditioning length is held at max_order across candidates so every
/// order sees the same effective sample.
Result select_order(const model::Series& data, const Config& cfg);

/// Two-stage baseline: the transform/regression parameters are estimated
/// under an independence likelihood, then the AR coefficients by a Gaussian
/// fit of the back-transformed residual series.
Result fit_sequential(const model::Series& data, std::size_t p,
                      const Config& cfg);

/// BIC under this library's convention: p + 4 parameters (xi, omega, g, h
/// and the AR coefficients; regression coefficients excluded).
double bic_value(model::Variant variant, double loglik, std::size_t p,
                 std::size_t n, std::size_t k);

}  // namespace tghar::fit
