#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tghar/fit.hpp"
#include "tghar/model.hpp"
#include "tghar/tgh.hpp"

namespace tghar::study {

/// TGHAR_THREADS override, else hardware concurrency; always >= 1.
std::size_t thread_count();

/// Runs body(0..n-1) over a thread pool. Each index writes only its own
/// slot, so results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Row-major (cos, sin) harmonic pairs for t = first_t .. first_t + n - 1.
std::vector<double> harmonic_covariates(std::size_t n, std::size_t first_t = 1,
                                        double period = 24.0);

/// The comparison-study scenario: seasonal regression plus an AR(1)
/// disturbance pushed through the transform.
struct Scenario {
  model::Variant variant = model::Variant::Latent;
  double xi = -3.0;
  double omega = 1.5;
  tgh::Shape shape{0.3, 0.1};
  std::vector<double> phi{0.8};
  std::vector<double> beta{3.0, -2.0};
  double period = 24.0;

  model::Spec spec() const;
};

struct FitKnobs {
  std::size_t multistarts = 3;
  std::size_t max_evals = 3000;
  bool use_table = true;
};

// ---------------------------------------------------------------- order

struct OrderCell {
  model::Variant variant = model::Variant::Latent;
  std::vector<double> phi;  // empty means true order zero
  std::size_t n = 100;
};

struct OrderConfig {
  tgh::Shape shape{0.3, 0.1};
  std::vector<OrderCell> cells;
  std::size_t p_max = 5;
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  FitKnobs knobs;
};

struct OrderCellResult {
  OrderCell cell;
  std::vector<std::size_t> selected_counts;  // index = selected order
  std::size_t failures = 0;
  double correct_rate = 0.0;
};

struct OrderReport {
  OrderConfig config;
  std::vector<OrderCellResult> cells;
};

/// The published grid of (variant, phi, n) cells for one variant.
std::vector<OrderCell> published_order_cells(model::Variant v);

OrderReport run_order_selection_study(const OrderConfig& cfg);

// ------------------------------------------------------------ estimator

struct EstimatorConfig {
  Scenario scenario;  // latent variant
  std::vector<std::size_t> sizes{100, 500};
  std::size_t reps = 200;
  std::uint64_t seed = 2;
  FitKnobs knobs;
};

struct EstimatorCellResult {
  std::size_t n = 0;
  std::string method;  // "joint" or "sequential"
  std::vector<std::string> names;
  std::vector<double> truth;
  std::vector<std::vector<double>> estimates;  // [param][successful rep]
  std::vector<double> rmse;
  std::size_t failures = 0;
};

struct EstimatorReport {
  EstimatorConfig config;
  std::vector<EstimatorCellResult> cells;
};

EstimatorReport run_estimator_comparison(const EstimatorConfig& cfg);

// ------------------------------------------------------------- forecast

enum class FitMethod { Latent, Error, Gaussian };

const char* fit_method_name(FitMethod m);

struct ForecastConfig {
  Scenario scenario;  // variant field ignored; both variants are generated
  std::size_t n = 500;
  std::size_t reps = 200;
  double level = 0.95;
  std::uint64_t seed = 3;
  FitKnobs knobs;
};

struct ForecastCellResult {
  model::Variant data_variant = model::Variant::Latent;
  FitMethod method = FitMethod::Latent;
  std::size_t failures = 0;
  double mae = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;  // minimum-length interval at the configured level
  double width = 0.0;
  double mean_crps = 0.0;
  double pit_ks = 0.0;
  std::vector<double> pits;
  std::vector<std::pair<double, double>> reliability;  // nominal, empirical
};

struct ForecastReport {
  ForecastConfig config;
  std::vector<ForecastCellResult> cells;  // 2 data variants x 3 methods
};

ForecastReport run_forecast_comparison(const ForecastConfig& cfg);

// ---------------------------------------------------------- realizations

struct RealizationMatrix {
  std::size_t reps = 0;
  std::size_t n = 0;
  std::vector<double> values;  // row-major reps x n
  tgh::Summary descriptors;    // stationary stochastic-part quadruple
};

/// Simulated paths for external functional plotting; spec must carry no
/// regression term.
RealizationMatrix export_realization_matrix(const model::Spec& spec,
                                            std::size_t n, std::size_t reps,
                                            std::uint64_t seed);

}  // namespace tghar::study
