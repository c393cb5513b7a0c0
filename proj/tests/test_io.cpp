// File formats: CSV series, JSON model documents and the study report
// writers. Round trips must be lossless and rewrites byte-identical.

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "tghar/io.hpp"
#include "tghar/model.hpp"
#include "tghar/study.hpp"

#include "test_util.hpp"

using namespace tghar;
using testutil::TempDir;
using testutil::slurp;

TEST_SUITE_BEGIN("io");

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("format_double round trips") {
  // strtod, not stod: stod raises out_of_range on subnormals.
  for (double v : {0.1, 1.0 / 3.0, -0.0, 1e300, 5e-324, 3.141592653589793,
                   -123456.789, 0.0}) {
    CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
  }
  CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("series csv round trip") {
  TempDir dir;
  model::Series s;
  s.y = {1.5, -0.25, 1.0 / 3.0, 1e-17};
  s.xdim = 2;
  s.x = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};

  const std::string path = dir.file("series.csv");
  io::write_series_csv(path, s, {"cos24", "sin24"}, 10);
  const io::SeriesFile back = io::read_series_csv(path);
  CHECK(back.series.y == s.y);
  CHECK(back.series.x == s.x);
  CHECK(back.series.xdim == 2);
  CHECK(back.covariate_names == std::vector<std::string>{"cos24", "sin24"});
  CHECK(back.t0 == 10);

  // Writing the parsed series again reproduces the bytes.
  const std::string again = dir.file("series2.csv");
  io::write_series_csv(again, back.series, back.covariate_names, back.t0);
  CHECK(slurp(path) == slurp(again));

  // Default covariate names.
  const std::string defaulted = dir.file("series3.csv");
  io::write_series_csv(defaulted, s);
  CHECK(io::read_series_csv(defaulted).covariate_names ==
        std::vector<std::string>{"x1", "x2"});
}

TEST_CASE("series csv rejects malformed input with line numbers") {
  TempDir dir;
  const std::string path = dir.file("bad.csv");

  write_text(path, "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(io::read_series_csv(path),
                       doctest::Contains(":1:"), io::ParseError);

  write_text(path, "t,y\n1,0.5\n3,0.7\n");
  CHECK_THROWS_WITH_AS(io::read_series_csv(path),
                       doctest::Contains(":3:"), io::ParseError);

  write_text(path, "t,y\n1,zebra\n");
  CHECK_THROWS_WITH_AS(io::read_series_csv(path),
                       doctest::Contains(":2:"), io::ParseError);

  write_text(path, "t,y\n1,0.5\n\n2,0.7\n");
  CHECK_THROWS_AS(io::read_series_csv(path), io::ParseError);

  write_text(path, "t,y,x1\n1,0.5\n");
  CHECK_THROWS_WITH_AS(io::read_series_csv(path),
                       doctest::Contains("fields"), io::ParseError);

  write_text(path, "t,y\n");
  CHECK_THROWS_AS(io::read_series_csv(path), io::ParseError);

  CHECK_THROWS_AS(io::read_series_csv(dir.file("missing.csv")),
                  io::ParseError);
}

TEST_CASE("model json round trip") {
  TempDir dir;
  io::ModelFile m;
  m.spec.variant = model::Variant::Error;
  m.spec.tgh.xi = -3.0;
  m.spec.tgh.omega = 1.5;
  m.spec.tgh.shape = {0.3, 0.1};
  m.spec.arc.phi = {0.8, -0.25};
  m.spec.beta = {3.0, -2.0};
  m.covariate_names = {"cos24", "sin24"};
  m.loglik = -123.456;
  m.bic = 260.0 + 1.0 / 3.0;
  m.n = 500;
  m.k = 2;
  m.seed = 42;

  const std::string path = dir.file("model.json");
  io::write_model_json(path, m);
  const io::ModelFile back = io::read_model_json(path);
  CHECK(back.spec.variant == m.spec.variant);
  CHECK(back.spec.tgh.xi == m.spec.tgh.xi);
  CHECK(back.spec.tgh.omega == m.spec.tgh.omega);
  CHECK(back.spec.tgh.shape.g == m.spec.tgh.shape.g);
  CHECK(back.spec.tgh.shape.h == m.spec.tgh.shape.h);
  CHECK(back.spec.arc.phi == m.spec.arc.phi);
  CHECK(back.spec.beta == m.spec.beta);
  CHECK(back.covariate_names == m.covariate_names);
  CHECK(back.loglik == m.loglik);
  CHECK(back.bic == m.bic);
  CHECK(back.n == m.n);
  CHECK(back.k == m.k);
  CHECK(back.seed == m.seed);

  const std::string again = dir.file("model2.json");
  io::write_model_json(again, back);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("model json validation") {
  TempDir dir;
  const std::string path = dir.file("bad.json");

  write_text(path, "{not json");
  CHECK_THROWS_AS(io::read_model_json(path), io::ParseError);

  write_text(path, R"({"schema":"other/9","variant":"t"})");
  CHECK_THROWS_AS(io::read_model_json(path), io::ParseError);

  // Non-stationary coefficients fail spec validation.
  write_text(path, R"({
    "schema": "tghar-model/1",
    "variant": "t",
    "xi": 0, "omega": 1, "g": 0, "h": 0,
    "phi": [1.5], "beta": [], "covariate_names": [],
    "fit": {"loglik": 0, "bic": 0, "n": 10, "k": 0, "seed": 0}
  })");
  CHECK_THROWS_AS(io::read_model_json(path), io::ParseError);

  CHECK_THROWS_AS(io::read_model_json(dir.file("missing.json")),
                  io::ParseError);
}

TEST_CASE("order report files") {
  TempDir dir;
  study::OrderReport rep;
  rep.config.p_max = 2;
  rep.config.reps = 3;
  rep.config.seed = 11;
  study::OrderCellResult cell;
  cell.cell = {model::Variant::Latent, {0.8}, 100};
  cell.selected_counts = {0, 2, 1};
  cell.failures = 0;
  cell.correct_rate = 2.0 / 3.0;
  rep.cells.push_back(cell);

  const std::string out = dir.file("order");
  io::write_order_report(out, rep);
  const std::string json_text = slurp(out + "/order_selection.json");
  CHECK(json_text.find("tghar-order-study/1") != std::string::npos);
  const std::string csv_text = slurp(out + "/order_selection.csv");
  CHECK(csv_text.find("variant,true_order,phi,n") != std::string::npos);
  CHECK(csv_text.find("selected_0") != std::string::npos);

  const std::string out2 = dir.file("order2");
  io::write_order_report(out2, rep);
  CHECK(slurp(out + "/order_selection.json") ==
        slurp(out2 + "/order_selection.json"));
  CHECK(slurp(out + "/order_selection.csv") ==
        slurp(out2 + "/order_selection.csv"));
}

TEST_CASE("estimator report files") {
  TempDir dir;
  study::EstimatorReport rep;
  rep.config.reps = 2;
  study::EstimatorCellResult cell;
  cell.n = 100;
  cell.method = "joint";
  cell.names = {"xi", "omega"};
  cell.truth = {-3.0, 1.5};
  cell.estimates = {{-2.9, -3.1}, {1.4, 1.6}};
  cell.rmse = {0.1, 0.1};
  rep.cells.push_back(cell);

  const std::string out = dir.file("estimator");
  io::write_estimator_report(out, rep);
  CHECK(slurp(out + "/estimator_comparison.json")
            .find("tghar-estimator-study/1") != std::string::npos);
  const std::string csv_text = slurp(out + "/estimates_joint_n100.csv");
  CHECK(csv_text.find("xi") != std::string::npos);
}

TEST_CASE("forecast report files") {
  TempDir dir;
  study::ForecastReport rep;
  rep.config.reps = 2;
  study::ForecastCellResult cell;
  cell.data_variant = model::Variant::Latent;
  cell.method = study::FitMethod::Latent;
  cell.mae = 0.8;
  cell.rmse = 1.1;
  cell.coverage = 0.95;
  cell.width = 4.2;
  cell.mean_crps = 0.6;
  cell.pits = {0.2, 0.7};
  cell.pit_ks = 0.3;
  for (int j = 1; j <= 19; ++j) {
    cell.reliability.emplace_back(j / 20.0, j / 20.0);
  }
  rep.cells.push_back(cell);

  const std::string out = dir.file("forecast");
  io::write_forecast_report(out, rep);
  CHECK(slurp(out + "/forecast_comparison.json")
            .find("tghar-forecast-study/1") != std::string::npos);
  const std::string scores = slurp(out + "/forecast_scores.csv");
  CHECK(scores.find("data,fit,") != std::string::npos);
  CHECK(slurp(out + "/pit_t_t.csv").find("pit") != std::string::npos);
  CHECK(slurp(out + "/reliability_t_t.csv").find("nominal") !=
        std::string::npos);
}

TEST_CASE("realization files") {
  TempDir dir;
  study::RealizationMatrix m;
  m.reps = 2;
  m.n = 3;
  m.values = {1, 2, 3, 4, 5, 6};
  m.descriptors = {0.0, 1.0, 0.0, 0.0};
  io::write_realizations(dir.file("real"), m);
  const std::string csv_text = slurp(dir.file("real") + "/realizations.csv");
  CHECK(csv_text.find("1,2,3") != std::string::npos);
  CHECK(slurp(dir.file("real") + "/realizations_descriptors.csv")
            .find("mean") != std::string::npos);
}

TEST_SUITE_END();
