#include "tghar/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tghar/version.hpp"

namespace tghar::io {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void fail(const std::string& path, std::size_t lineno,
                       const std::string& what) {
  throw ParseError(path + ":" + std::to_string(lineno) + ": " + what);
}

double parse_double(const std::string& s, const std::string& path,
                    std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) {
    fail(path, lineno, "not a number: '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& s, const std::string& path,
                    std::size_t lineno) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty()) {
    fail(path, lineno, "not an integer: '" + s + "'");
  }
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory: " + dir);
}

json shape_json(const tgh::Shape& s) {
  return json{{"g", s.g}, {"h", s.h}};
}

json spec_json(const model::Spec& s,
               const std::vector<std::string>& covariate_names) {
  return json{{"variant", model::variant_name(s.variant)},
              {"xi", s.tgh.xi},
              {"omega", s.tgh.omega},
              {"g", s.tgh.shape.g},
              {"h", s.tgh.shape.h},
              {"phi", s.arc.phi},
              {"beta", s.beta},
              {"covariate_names", covariate_names}};
}

void dump_json(const std::string& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string scores_csv_header() {
  return "data,fit,failures,mae,rmse,coverage,width,mean_crps,pit_ks";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SeriesFile read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line, ',');
  if (header.size() < 2 || header[0] != "t" || header[1] != "y") {
    fail(path, lineno, "header must start with 't,y'");
  }

  SeriesFile out;
  out.covariate_names.assign(header.begin() + 2, header.end());
  out.series.xdim = header.size() - 2;

  bool first = true;
  long long prev_t = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in.peek() == std::ifstream::traits_type::eof()) break;
      fail(path, lineno, "blank line");
    }
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != header.size()) {
      fail(path, lineno,
           "expected " + std::to_string(header.size()) + " fields, got " +
               std::to_string(f.size()));
    }
    const long long t = parse_int(f[0], path, lineno);
    if (first) {
      out.t0 = t;
      first = false;
    } else if (t != prev_t + 1) {
      fail(path, lineno, "time index must advance in unit steps");
    }
    prev_t = t;
    out.series.y.push_back(parse_double(f[1], path, lineno));
    for (std::size_t j = 0; j < out.series.xdim; ++j) {
      out.series.x.push_back(parse_double(f[2 + j], path, lineno));
    }
  }
  if (out.series.y.empty()) fail(path, lineno, "no observations");
  return out;
}

void write_series_csv(const std::string& path, const model::Series& s,
                      const std::vector<std::string>& covariate_names,
                      long long t0) {
  if (!covariate_names.empty() && covariate_names.size() != s.xdim) {
    throw std::invalid_argument("write_series_csv: covariate name count");
  }
  std::ofstream out = open_out(path);
  out << "t,y";
  for (std::size_t j = 0; j < s.xdim; ++j) {
    out << ','
        << (covariate_names.empty() ? "x" + std::to_string(j + 1)
                                    : covariate_names[j]);
  }
  out << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << (t0 + static_cast<long long>(i)) << ',' << format_double(s.y[i]);
    for (std::size_t j = 0; j < s.xdim; ++j) {
      out << ',' << format_double(s.xrow(i)[j]);
    }
    out << '\n';
  }
}

ModelFile read_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != "tghar-model/1") {
      throw ParseError(path + ": unsupported schema");
    }
    ModelFile m;
    m.spec.variant =
        model::variant_from_name(j.at("variant").get<std::string>());
    m.spec.tgh.xi = j.at("xi").get<double>();
    m.spec.tgh.omega = j.at("omega").get<double>();
    m.spec.tgh.shape.g = j.at("g").get<double>();
    m.spec.tgh.shape.h = j.at("h").get<double>();
    m.spec.arc.phi = j.at("phi").get<std::vector<double>>();
    m.spec.beta = j.at("beta").get<std::vector<double>>();
    m.covariate_names =
        j.at("covariate_names").get<std::vector<std::string>>();
    if (m.covariate_names.size() != m.spec.beta.size()) {
      throw ParseError(path + ": covariate_names/beta size mismatch");
    }
    if (!m.spec.valid()) {
      throw ParseError(path + ": invalid model (scale or stationarity)");
    }
    if (j.contains("fit")) {
      const json& f = j.at("fit");
      m.loglik = f.value("loglik", 0.0);
      m.bic = f.value("bic", 0.0);
      m.n = f.value("n", std::size_t{0});
      m.k = f.value("k", std::size_t{0});
      m.seed = f.value("seed", std::uint64_t{0});
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_model_json(const std::string& path, const ModelFile& m) {
  json j = spec_json(m.spec, m.covariate_names);
  j["schema"] = "tghar-model/1";
  j["fit"] = json{{"loglik", m.loglik},
                  {"bic", m.bic},
                  {"n", m.n},
                  {"k", m.k},
                  {"seed", m.seed}};
  j["tool_version"] = kToolVersion;
  dump_json(path, j);
}

void write_order_report(const std::string& dir,
                        const study::OrderReport& report) {
  ensure_dir(dir);
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back(json{{"variant", model::variant_name(c.cell.variant)},
                         {"true_order", c.cell.phi.size()},
                         {"phi", c.cell.phi},
                         {"n", c.cell.n},
                         {"failures", c.failures},
                         {"correct_rate", c.correct_rate},
                         {"selected_counts", c.selected_counts}});
  }
  const json j{{"schema", "tghar-order-study/1"},
               {"seed", report.config.seed},
               {"reps", report.config.reps},
               {"p_max", report.config.p_max},
               {"shape", shape_json(report.config.shape)},
               {"cells", cells},
               {"tool_version", kToolVersion}};
  dump_json(dir + "/order_selection.json", j);

  std::ofstream csv = open_out(dir + "/order_selection.csv");
  csv << "variant,true_order,phi,n,failures,correct_rate";
  for (std::size_t s = 0; s <= report.config.p_max; ++s) {
    csv << ",selected_" << s;
  }
  csv << '\n';
  for (const auto& c : report.cells) {
    csv << model::variant_name(c.cell.variant) << ',' << c.cell.phi.size()
        << ',';
    for (std::size_t j2 = 0; j2 < c.cell.phi.size(); ++j2) {
      if (j2 > 0) csv << ';';
      csv << format_double(c.cell.phi[j2]);
    }
    csv << ',' << c.cell.n << ',' << c.failures << ','
        << format_double(c.correct_rate);
    for (std::size_t cnt : c.selected_counts) csv << ',' << cnt;
    csv << '\n';
  }
}

void write_estimator_report(const std::string& dir,
                            const study::EstimatorReport& report) {
  ensure_dir(dir);
  json cells = json::array();
  for (const auto& c : report.cells) {
    json rmse = json::object();
    for (std::size_t j = 0; j < c.names.size(); ++j) {
      rmse[c.names[j]] = c.rmse[j];
    }
    cells.push_back(json{{"n", c.n},
                         {"method", c.method},
                         {"failures", c.failures},
                         {"rmse", rmse}});
    std::ofstream csv = open_out(dir + "/estimates_" + c.method + "_n" +
                                 std::to_string(c.n) + ".csv");
    for (std::size_t j = 0; j < c.names.size(); ++j) {
      csv << (j ? "," : "") << c.names[j];
    }
    csv << '\n';
    const std::size_t rows = c.estimates.empty() ? 0 : c.estimates[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < c.estimates.size(); ++j) {
        csv << (j ? "," : "") << format_double(c.estimates[j][r]);
      }
      csv << '\n';
    }
  }
  const json j{{"schema", "tghar-estimator-study/1"},
               {"seed", report.config.seed},
               {"reps", report.config.reps},
               {"sizes", report.config.sizes},
               {"shape", shape_json(report.config.scenario.shape)},
               {"truth", report.cells.empty() ? json::array()
                                              : json(report.cells[0].truth)},
               {"cells", cells},
               {"tool_version", kToolVersion}};
  dump_json(dir + "/estimator_comparison.json", j);
}

void write_forecast_report(const std::string& dir,
                           const study::ForecastReport& report) {
  ensure_dir(dir);
  json cells = json::array();
  std::ofstream scores = open_out(dir + "/forecast_scores.csv");
  scores << scores_csv_header() << '\n';
  for (const auto& c : report.cells) {
    const std::string data_name = model::variant_name(c.data_variant);
    const std::string fit_name = study::fit_method_name(c.method);
    json rel = json::array();
    for (const auto& [nominal, empirical] : c.reliability) {
      rel.push_back(json::array({nominal, empirical}));
    }
    cells.push_back(json{{"data", data_name},
                         {"fit", fit_name},
                         {"failures", c.failures},
                         {"mae", c.mae},
                         {"rmse", c.rmse},
                         {"coverage", c.coverage},
                         {"width", c.width},
                         {"mean_crps", c.mean_crps},
                         {"pit_ks", c.pit_ks},
                         {"reliability", rel}});
    scores << data_name << ',' << fit_name << ',' << c.failures << ','
           << format_double(c.mae) << ',' << format_double(c.rmse) << ','
           << format_double(c.coverage) << ',' << format_double(c.width)
           << ',' << format_double(c.mean_crps) << ','
           << format_double(c.pit_ks) << '\n';

    std::ofstream pits =
        open_out(dir + "/pit_" + data_name + "_" + fit_name + ".csv");
    pits << "pit\n";
    for (double u : c.pits) pits << format_double(u) << '\n';

    std::ofstream reli =
        open_out(dir + "/reliability_" + data_name + "_" + fit_name + ".csv");
    reli << "nominal,empirical\n";
    for (const auto& [nominal, empirical] : c.reliability) {
      reli << format_double(nominal) << ',' << format_double(empirical)
           << '\n';
    }
  }
  const json j{{"schema", "tghar-forecast-study/1"},
               {"seed", report.config.seed},
               {"reps", report.config.reps},
               {"n", report.config.n},
               {"level", report.config.level},
               {"shape", shape_json(report.config.scenario.shape)},
               {"cells", cells},
               {"tool_version", kToolVersion}};
  dump_json(dir + "/forecast_comparison.json", j);
}

void write_matrix_csv(const std::string& path, std::size_t rows,
                      std::size_t cols, const std::vector<double>& values) {
  if (values.size() != rows * cols) {
    throw std::invalid_argument("write_matrix_csv: size mismatch");
  }
  std::ofstream out = open_out(path);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out << (c ? "," : "") << format_double(values[r * cols + c]);
    }
    out << '\n';
  }
}

void write_realizations(const std::string& dir,
                        const study::RealizationMatrix& m,
                        const std::string& stem) {
  ensure_dir(dir);
  write_matrix_csv(dir + "/" + stem + ".csv", m.reps, m.n, m.values);
  std::ofstream out = open_out(dir + "/" + stem + "_descriptors.csv");
  out << "mean,sd,skewness,excess_kurtosis\n";
  out << format_double(m.descriptors.mean) << ','
      << format_double(m.descriptors.sd) << ','
      << format_double(m.descriptors.skewness) << ','
      << format_double(m.descriptors.excess_kurtosis) << '\n';
}

}  // namespace tghar::io
