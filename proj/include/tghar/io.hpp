#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tghar/model.hpp"
#include "tghar/study.hpp"

namespace tghar::io {

/// Malformed input file; the message carries path and line where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Round-trip-exact decimal rendering used in every CSV cell.
std::string format_double(double v);

struct SeriesFile {
  model::Series series;
  std::vector<std::string> covariate_names;
  long long t0 = 1;
};

/// CSV with header "t,y[,names...]"; t must advance in unit steps.
SeriesFile read_series_csv(const std::string& path);

void write_series_csv(const std::string& path, const model::Series& s,
                      const std::vector<std::string>& covariate_names = {},
                      long long t0 = 1);

struct ModelFile {
  model::Spec spec;
  std::vector<std::string> covariate_names;
  double loglik = 0.0;
  double bic = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

ModelFile read_model_json(const std::string& path);
void write_model_json(const std::string& path, const ModelFile& m);

// Study reports land as one JSON summary plus per-table CSV files inside
// dir (created if missing). Content depends only on the report, so a fixed
// seed yields byte-identical trees.
void write_order_report(const std::string& dir,
                        const study::OrderReport& report);
void write_estimator_report(const std::string& dir,
                            const study::EstimatorReport& report);
void write_forecast_report(const std::string& dir,
                           const study::ForecastReport& report);
void write_realizations(const std::string& dir,
                        const study::RealizationMatrix& m,
                        const std::string& stem = "realizations");

void write_matrix_csv(const std::string& path, std::size_t rows,
                      std::size_t cols, const std::vector<double>& values);

}  // namespace tghar::io
