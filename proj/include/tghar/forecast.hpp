#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tghar/fit.hpp"
#include "tghar/model.hpp"
#include "tghar/tgh.hpp"

namespace tghar::forecast {

// One-step-ahead predictive law Y = det + omega * tau(mu + sigma * Z) with
// Z standard normal. The error model always has mu = 0, sigma = 1 and folds
// the AR carry into det.
struct Distribution {
  model::Variant kind = model::Variant::Latent;
  double det = 0.0;
  double omega = 1.0;
  tgh::Shape shape;
  double mu = 0.0;
  double sigma = 1.0;
};

enum class IntervalKind { SymmetricWeight, MinimumLength };

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  IntervalKind kind = IntervalKind::SymmetricWeight;
  double gamma = 0.0;  // lower-tail mass left outside the interval
};

// history must hold at least p observations; for the latent model the last
// p of them are back-transformed exactly.
Distribution predictive(const model::Spec& spec, const model::Series& history,
                        std::span<const double> x_next);

double point_median(const Distribution& d);

// Conditional mean; requires h * sigma^2 < 1.
double point_mean(const Distribution& d);

double quantile(const Distribution& d, double u);
double cdf(const Distribution& d, double y);

Interval interval(const Distribution& d, double level, IntervalKind kind);

double pit(const Distribution& d, double y);

// Requires h * sigma^2 < 1/2 so that both cdf tails are integrable.
double crps(const Distribution& d, double y);

struct StepRecord {
  std::size_t t = 0;  // index of the forecast target within the series
  double realized = 0.0;
  double median = 0.0;
  double mean = 0.0;  // NaN when the conditional mean does not exist
  Interval symmetric;
  Interval min_length;
  double pit = 0.0;
  double crps = 0.0;  // NaN when the tail condition fails
  bool scored = false;
};

struct RollingOptions {
  std::size_t refit_every = 1;
  double level = 0.95;
  bool inflate_variance = false;  // scale sigma^2 by 1 + p/w
};

struct RollingResult {
  std::vector<StepRecord> steps;
  std::size_t n_scored = 0;
  std::size_t n_failed = 0;
  double mae = 0.0;   // median predictor vs realized
  double rmse = 0.0;  // mean predictor vs realized
  double coverage_symmetric = 0.0;
  double coverage_min_length = 0.0;
  double width_symmetric = 0.0;
  double width_min_length = 0.0;
  double mean_crps = 0.0;
};

// Fits on the trailing window of length w (refitting every refit_every
// steps) and scores the one-step forecast of each subsequent point.
RollingResult rolling_forecast(const model::Series& data, std::size_t p,
                               const fit::Config& cfg, std::size_t w,
                               const RollingOptions& opts = {});

}  // namespace tghar::forecast
