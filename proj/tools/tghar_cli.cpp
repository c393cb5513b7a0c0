// Command-line front end: simulate, fit, forecast, evaluate, study.
//
// Exit codes: 0 success, 1 usage or data error, 2 numerical
// non-convergence (best-effort output still written).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tghar/fit.hpp"
#include "tghar/forecast.hpp"
#include "tghar/io.hpp"
#include "tghar/model.hpp"
#include "tghar/study.hpp"
#include "tghar/version.hpp"

namespace {

using nlohmann::json;
using tghar::io::format_double;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

std::string trim_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// ------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string model_path;
  std::string variant = "t";
  double xi = 0.0, omega = 1.0, g = 0.0, h = 0.0;
  std::vector<double> phi, beta;
  double harmonic = 0.0;  // covariate period; 0 disables
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int run_simulate(const SimulateArgs& a, bool inline_params) {
  tghar::model::Spec spec;
  std::vector<std::string> names;
  if (!a.model_path.empty()) {
    if (inline_params) {
      throw UsageError("--model cannot be combined with inline parameters");
    }
    const tghar::io::ModelFile m = tghar::io::read_model_json(a.model_path);
    spec = m.spec;
    names = m.covariate_names;
  } else {
    spec.variant = tghar::model::variant_from_name(a.variant);
    spec.tgh = {a.xi, a.omega, {a.g, a.h}};
    spec.arc.phi = a.phi;
    spec.beta = a.beta;
  }
  if (a.n == 0) throw UsageError("--n must be positive");
  if (!spec.valid()) {
    throw UsageError("invalid model: require omega > 0, h >= 0 and a "
                     "stationary phi");
  }

  std::vector<double> x;
  if (a.harmonic > 0.0) {
    if (spec.beta.size() != 2) {
      throw UsageError("--harmonic requires exactly two beta coefficients");
    }
    x = tghar::study::harmonic_covariates(a.n, 1, a.harmonic);
    if (names.size() != 2) {
      names = {"cos" + trim_number(a.harmonic), "sin" + trim_number(a.harmonic)};
    }
  } else if (!spec.beta.empty()) {
    throw UsageError("beta given but no covariate generator (--harmonic)");
  }

  tghar::Pcg64 rng = tghar::substream(a.seed, 0);
  const tghar::model::Series series =
      tghar::model::simulate(spec, a.n, x, rng);
  tghar::io::write_series_csv(a.out, series, names, 1);

  tghar::io::ModelFile sidecar;
  sidecar.spec = spec;
  sidecar.covariate_names = names;
  sidecar.n = a.n;
  sidecar.seed = a.seed;
  tghar::io::write_model_json(a.out + ".model.json", sidecar);

  std::cout << "wrote " << a.out << " (" << a.n << " rows) and " << a.out
            << ".model.json\n";
  return kExitOk;
}

// ------------------------------------------------------------------ fit

// Returns the series restricted to the named covariate columns (all
// columns when names is empty).
tghar::model::Series select_covariates(const tghar::io::SeriesFile& file,
                                       const std::vector<std::string>& names,
                                       std::vector<std::string>& used) {
  if (names.empty()) {
    used = file.covariate_names;
    return file.series;
  }
  std::vector<std::size_t> idx;
  for (const std::string& want : names) {
    bool found = false;
    for (std::size_t j = 0; j < file.covariate_names.size(); ++j) {
      if (file.covariate_names[j] == want) {
        idx.push_back(j);
        found = true;
        break;
      }
    }
    if (!found) throw UsageError("unknown covariate column: " + want);
  }
  tghar::model::Series out;
  out.y = file.series.y;
  out.xdim = idx.size();
  out.x.reserve(out.y.size() * idx.size());
  for (std::size_t t = 0; t < out.y.size(); ++t) {
    for (std::size_t j : idx) {
      out.x.push_back(file.series.xrow(t)[j]);
    }
  }
  used = names;
  return out;
}

struct FitArgs {
  std::string series_path;
  std::string variant = "t";
  std::optional<std::size_t> order;
  bool select = false;
  std::size_t pmax = 6;
  std::size_t k = 0;
  std::vector<std::string> covariates;
  std::size_t multistarts = 5;
  std::size_t max_evals = 3000;
  std::uint64_t seed = 0;
  bool exact_inverse = false;
  std::string out;
};

void print_fit_summary(const tghar::fit::Result& r, std::size_t n,
                       bool selected) {
  std::cout << "variant=" << tghar::model::variant_name(r.spec.variant)
            << " n=" << n << " order=" << r.order << " k=" << r.k
            << " selected=" << (selected ? "yes" : "no") << '\n';
  std::cout << "loglik=" << format_double(r.loglik)
            << " bic=" << format_double(r.bic)
            << " converged=" << (r.converged ? "yes" : "no")
            << " evaluations=" << r.evaluations << '\n';
  std::cout << "xi=" << format_double(r.spec.tgh.xi)
            << " omega=" << format_double(r.spec.tgh.omega)
            << " g=" << format_double(r.spec.tgh.shape.g)
            << " h=" << format_double(r.spec.tgh.shape.h) << '\n';
  std::cout << "beta=" << join_doubles(r.spec.beta) << '\n';
  std::cout << "phi=" << join_doubles(r.spec.arc.phi) << '\n';
}

int run_fit(const FitArgs& a) {
  if (a.order.has_value() == a.select) {
    throw UsageError("exactly one of --order and --select is required");
  }
  const tghar::io::SeriesFile file = tghar::io::read_series_csv(a.series_path);
  std::vector<std::string> used_names;
  const tghar::model::Series data =
      select_covariates(file, a.covariates, used_names);

  tghar::fit::Config cfg;
  cfg.variant = tghar::model::variant_from_name(a.variant);
  cfg.max_order = a.pmax;
  cfg.k = a.k;
  cfg.multistarts = a.multistarts;
  cfg.max_evals = a.max_evals;
  cfg.use_table = !a.exact_inverse;
  cfg.seed = a.seed;

  const tghar::fit::Result r = a.select
                                   ? tghar::fit::select_order(data, cfg)
                                   : tghar::fit::fit(data, *a.order, cfg);
  print_fit_summary(r, data.size(), a.select);

  if (!a.out.empty()) {
    tghar::io::ModelFile m;
    m.spec = r.spec;
    m.covariate_names = used_names;
    m.loglik = r.loglik;
    m.bic = r.bic;
    m.n = data.size();
    m.k = r.k;
    m.seed = a.seed;
    tghar::io::write_model_json(a.out, m);
    std::cout << "wrote " << a.out << '\n';
  }
  return r.converged ? kExitOk : kExitNoConvergence;
}

// ------------------------------------------------------------- forecast

struct ForecastArgs {
  std::string model_path;
  std::string series_path;
  double level = 0.95;
  std::string interval = "both";
  std::vector<double> x_next;
  std::optional<double> realized;
  std::string out;
};

int run_forecast(const ForecastArgs& a) {
  if (!(a.level > 0.0 && a.level < 1.0)) {
    throw UsageError("--level must lie in (0, 1)");
  }
  if (a.interval != "both" && a.interval != "symmetric" &&
      a.interval != "minlength") {
    throw UsageError("--interval must be both, symmetric or minlength");
  }
  const tghar::io::ModelFile m = tghar::io::read_model_json(a.model_path);
  const tghar::io::SeriesFile file = tghar::io::read_series_csv(a.series_path);
  if (file.covariate_names != m.covariate_names) {
    throw UsageError("series covariates do not match the model");
  }
  if (a.x_next.size() != m.spec.beta.size()) {
    throw UsageError("--x-next must supply " +
                     std::to_string(m.spec.beta.size()) + " value(s)");
  }

  const tghar::forecast::Distribution dist =
      tghar::forecast::predictive(m.spec, file.series, a.x_next);
  const double median = tghar::forecast::point_median(dist);
  double mean = std::numeric_limits<double>::quiet_NaN();
  try {
    mean = tghar::forecast::point_mean(dist);
  } catch (const std::domain_error&) {
  }

  std::vector<tghar::forecast::Interval> intervals;
  if (a.interval != "minlength") {
    intervals.push_back(tghar::forecast::interval(
        dist, a.level, tghar::forecast::IntervalKind::SymmetricWeight));
  }
  if (a.interval != "symmetric") {
    intervals.push_back(tghar::forecast::interval(
        dist, a.level, tghar::forecast::IntervalKind::MinimumLength));
  }

  double pit_v = std::numeric_limits<double>::quiet_NaN();
  double crps_v = std::numeric_limits<double>::quiet_NaN();
  if (a.realized) {
    pit_v = tghar::forecast::pit(dist, *a.realized);
    try {
      crps_v = tghar::forecast::crps(dist, *a.realized);
    } catch (const std::domain_error&) {
    }
  }

  std::cout << "median=" << format_double(median)
            << " mean=" << format_double(mean) << '\n';
  for (const auto& ci : intervals) {
    const char* kind =
        ci.kind == tghar::forecast::IntervalKind::SymmetricWeight
            ? "symmetric"
            : "minlength";
    std::cout << "interval kind=" << kind
              << " lower=" << format_double(ci.lower)
              << " upper=" << format_double(ci.upper)
              << " level=" << format_double(ci.level)
              << " gamma=" << format_double(ci.gamma) << '\n';
  }
  if (a.realized) {
    std::cout << "pit=" << format_double(pit_v)
              << " crps=" << format_double(crps_v) << '\n';
  }

  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    if (!csv) throw UsageError("cannot open for writing: " + a.out);
    csv << "kind,median,mean,lower,upper,level,gamma,pit,crps\n";
    for (const auto& ci : intervals) {
      const char* kind =
          ci.kind == tghar::forecast::IntervalKind::SymmetricWeight
              ? "symmetric"
              : "minlength";
      csv << kind << ',' << format_double(median) << ','
          << format_double(mean) << ',' << format_double(ci.lower) << ','
          << format_double(ci.upper) << ',' << format_double(ci.level) << ','
          << format_double(ci.gamma) << ',' << format_double(pit_v) << ','
          << format_double(crps_v) << '\n';
    }
    std::cout << "wrote " << a.out << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string series_path;
  std::string variant = "t";
  std::size_t order = 0;
  std::size_t window = 0;
  std::size_t refit_every = 1;
  double level = 0.95;
  std::vector<std::string> covariates;
  std::size_t multistarts = 5;
  std::size_t max_evals = 3000;
  std::uint64_t seed = 0;
  bool inflate = false;
  std::string out;
  std::string steps_out;
};

int run_evaluate(const EvaluateArgs& a) {
  if (!(a.level > 0.0 && a.level < 1.0)) {
    throw UsageError("--level must lie in (0, 1)");
  }
  const tghar::io::SeriesFile file = tghar::io::read_series_csv(a.series_path);
  std::vector<std::string> used_names;
  const tghar::model::Series data =
      select_covariates(file, a.covariates, used_names);
  if (a.window == 0 || a.window >= data.size()) {
    throw UsageError("--window must be positive and smaller than the series");
  }

  tghar::fit::Config cfg;
  cfg.variant = tghar::model::variant_from_name(a.variant);
  cfg.multistarts = a.multistarts;
  cfg.max_evals = a.max_evals;
  cfg.seed = a.seed;

  tghar::forecast::RollingOptions opts;
  opts.refit_every = a.refit_every;
  opts.level = a.level;
  opts.inflate_variance = a.inflate;

  const tghar::forecast::RollingResult r =
      tghar::forecast::rolling_forecast(data, a.order, cfg, a.window, opts);

  std::cout << "steps=" << r.steps.size() << " scored=" << r.n_scored
            << " failed=" << r.n_failed << '\n';
  std::cout << "mae=" << format_double(r.mae)
            << " rmse=" << format_double(r.rmse)
            << " coverage_sym=" << format_double(r.coverage_symmetric)
            << " coverage_min=" << format_double(r.coverage_min_length)
            << " width_sym=" << format_double(r.width_symmetric)
            << " width_min=" << format_double(r.width_min_length)
            << " mean_crps=" << format_double(r.mean_crps) << '\n';

  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    if (!csv) throw UsageError("cannot open for writing: " + a.out);
    csv << "mae,rmse,coverage_sym,coverage_min,width_sym,width_min,"
           "mean_crps,scored,failed\n";
    csv << format_double(r.mae) << ',' << format_double(r.rmse) << ','
        << format_double(r.coverage_symmetric) << ','
        << format_double(r.coverage_min_length) << ','
        << format_double(r.width_symmetric) << ','
        << format_double(r.width_min_length) << ','
        << format_double(r.mean_crps) << ',' << r.n_scored << ','
        << r.n_failed << '\n';
    std::cout << "wrote " << a.out << '\n';
  }
  if (!a.steps_out.empty()) {
    std::ofstream csv(a.steps_out);
    if (!csv) throw UsageError("cannot open for writing: " + a.steps_out);
    csv << "t,realized,median,mean,pit,crps,sym_lower,sym_upper,min_lower,"
           "min_upper,min_gamma,scored\n";
    for (const auto& s : r.steps) {
      csv << (file.t0 + static_cast<long long>(s.t)) << ','
          << format_double(s.realized) << ',' << format_double(s.median)
          << ',' << format_double(s.mean) << ',' << format_double(s.pit)
          << ',' << format_double(s.crps) << ','
          << format_double(s.symmetric.lower) << ','
          << format_double(s.symmetric.upper) << ','
          << format_double(s.min_length.lower) << ','
          << format_double(s.min_length.upper) << ','
          << format_double(s.min_length.gamma) << ','
          << (s.scored ? 1 : 0) << '\n';
    }
    std::cout << "wrote " << a.steps_out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- study

struct StudyArgs {
  std::string grid_path;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const std::string& k : allowed) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw UsageError("grid: unknown key '" + key + "' in " + where);
  }
}

tghar::study::Scenario parse_scenario(const json& j) {
  tghar::study::Scenario sc;
  sc.xi = j.value("xi", sc.xi);
  sc.omega = j.value("omega", sc.omega);
  sc.shape.g = j.value("g", sc.shape.g);
  sc.shape.h = j.value("h", sc.shape.h);
  sc.phi = j.value("phi", sc.phi);
  sc.beta = j.value("beta", sc.beta);
  sc.period = j.value("period", sc.period);
  return sc;
}

tghar::study::FitKnobs parse_knobs(const json& j) {
  tghar::study::FitKnobs k;
  k.multistarts = j.value("multistarts", k.multistarts);
  k.max_evals = j.value("max_evals", k.max_evals);
  k.use_table = j.value("use_table", k.use_table);
  return k;
}

int run_study(const StudyArgs& a) {
  std::ifstream in(a.grid_path);
  if (!in) throw UsageError("cannot open grid: " + a.grid_path);
  json grid;
  try {
    in >> grid;
  } catch (const json::exception& e) {
    throw UsageError("grid: " + std::string(e.what()));
  }
  if (!grid.is_object()) throw UsageError("grid: top level must be an object");
  check_keys(grid, {"order_selection", "estimator", "forecast",
                    "realizations"},
             "top level");

  using Clock = std::chrono::steady_clock;
  const auto since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  try {
    if (grid.contains("order_selection")) {
      const json& sec = grid["order_selection"];
      check_keys(sec,
                 {"cells", "published", "p_max", "reps", "seed", "g", "h",
                  "multistarts", "max_evals", "use_table"},
                 "order_selection");
      tghar::study::OrderConfig cfg;
      cfg.shape.g = sec.value("g", cfg.shape.g);
      cfg.shape.h = sec.value("h", cfg.shape.h);
      cfg.p_max = sec.value("p_max", std::size_t{5});
      cfg.reps = a.reps.value_or(sec.value("reps", cfg.reps));
      cfg.seed = a.seed.value_or(sec.value("seed", cfg.seed));
      cfg.knobs = parse_knobs(sec);
      if (sec.value("published", false)) {
        for (auto v : {tghar::model::Variant::Latent,
                       tghar::model::Variant::Error}) {
          for (const auto& c : tghar::study::published_order_cells(v)) {
            cfg.cells.push_back(c);
          }
        }
      }
      if (sec.contains("cells")) {
        for (const json& cj : sec.at("cells")) {
          check_keys(cj, {"variant", "phi", "n"}, "order cell");
          tghar::study::OrderCell cell;
          cell.variant = tghar::model::variant_from_name(
              cj.value("variant", std::string("t")));
          cell.phi = cj.value("phi", std::vector<double>{});
          cell.n = cj.at("n").get<std::size_t>();
          cfg.cells.push_back(cell);
        }
      }
      if (cfg.cells.empty()) {
        throw UsageError("grid: order_selection has no cells");
      }
      const auto t0 = Clock::now();
      const tghar::study::OrderReport report =
          tghar::study::run_order_selection_study(cfg);
      tghar::io::write_order_report(a.out + "/order", report);
      std::cout << "order_selection: " << cfg.cells.size() << " cells x "
                << cfg.reps << " reps -> " << a.out << "/order ("
                << format_double(since(t0)) << " s)\n";
    }

    if (grid.contains("estimator")) {
      const json& sec = grid["estimator"];
      check_keys(sec,
                 {"sizes", "reps", "seed", "xi", "omega", "g", "h", "phi",
                  "beta", "period", "multistarts", "max_evals", "use_table"},
                 "estimator");
      tghar::study::EstimatorConfig cfg;
      cfg.scenario = parse_scenario(sec);
      cfg.sizes = sec.value("sizes", cfg.sizes);
      cfg.reps = a.reps.value_or(sec.value("reps", cfg.reps));
      cfg.seed = a.seed.value_or(sec.value("seed", cfg.seed));
      cfg.knobs = parse_knobs(sec);
      const auto t0 = Clock::now();
      const tghar::study::EstimatorReport report =
          tghar::study::run_estimator_comparison(cfg);
      tghar::io::write_estimator_report(a.out + "/estimator", report);
      std::cout << "estimator: " << cfg.sizes.size() << " sizes x "
                << cfg.reps << " reps -> " << a.out << "/estimator ("
                << format_double(since(t0)) << " s)\n";
    }

    if (grid.contains("forecast")) {
      const json& sec = grid["forecast"];
      check_keys(sec,
                 {"n", "reps", "seed", "level", "xi", "omega", "g", "h",
                  "phi", "beta", "period", "multistarts", "max_evals",
                  "use_table"},
                 "forecast");
      tghar::study::ForecastConfig cfg;
      cfg.scenario = parse_scenario(sec);
      cfg.n = sec.value("n", cfg.n);
      cfg.level = sec.value("level", cfg.level);
      cfg.reps = a.reps.value_or(sec.value("reps", cfg.reps));
      cfg.seed = a.seed.value_or(sec.value("seed", cfg.seed));
      cfg.knobs = parse_knobs(sec);
      const auto t0 = Clock::now();
      const tghar::study::ForecastReport report =
          tghar::study::run_forecast_comparison(cfg);
      tghar::io::write_forecast_report(a.out + "/forecast", report);
      std::cout << "forecast: 6 cells x " << cfg.reps << " reps -> " << a.out
                << "/forecast (" << format_double(since(t0)) << " s)\n";
    }

    if (grid.contains("realizations")) {
      const json& sec = grid["realizations"];
      check_keys(sec, {"variant", "xi", "omega", "g", "h", "phi", "n",
                       "reps", "seed"},
                 "realizations");
      tghar::model::Spec spec;
      spec.variant = tghar::model::variant_from_name(
          sec.value("variant", std::string("t")));
      spec.tgh.xi = sec.value("xi", 0.0);
      spec.tgh.omega = sec.value("omega", 1.0);
      spec.tgh.shape.g = sec.value("g", 0.0);
      spec.tgh.shape.h = sec.value("h", 0.0);
      spec.arc.phi = sec.value("phi", std::vector<double>{});
      const std::size_t n = sec.value("n", std::size_t{100});
      const std::size_t reps =
          a.reps.value_or(sec.value("reps", std::size_t{1000}));
      const std::uint64_t seed =
          a.seed.value_or(sec.value("seed", std::uint64_t{4}));
      const auto t0 = Clock::now();
      const tghar::study::RealizationMatrix m =
          tghar::study::export_realization_matrix(spec, n, reps, seed);
      tghar::io::write_realizations(a.out + "/realizations", m);
      std::cout << "realizations: " << reps << " x " << n << " -> " << a.out
                << "/realizations (" << format_double(since(t0)) << " s)\n";
    }
  } catch (const json::exception& e) {
    throw UsageError("grid: " + std::string(e.what()));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tukey g-and-h autoregressive modeling tool"};
  // --h is a model parameter, so help is long-form only.
  app.set_help_flag("--help", "Print help and exit");
  app.set_version_flag("--version", tghar::kToolVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* c_sim =
      app.add_subcommand("simulate", "Draw a series from a model");
  c_sim->set_help_flag("--help", "Print help and exit");
  c_sim->add_option("--model", sim.model_path,
                    "Model JSON to simulate from");
  auto* o_variant = c_sim->add_option("--variant", sim.variant,
                                      "Model variant: t or e");
  auto* o_xi = c_sim->add_option("--xi", sim.xi, "Location");
  auto* o_omega = c_sim->add_option("--omega", sim.omega, "Scale (> 0)");
  auto* o_g = c_sim->add_option("--g", sim.g, "Skewness parameter");
  auto* o_h = c_sim->add_option("--h", sim.h, "Tail parameter (>= 0)");
  auto* o_phi = c_sim->add_option("--phi", sim.phi, "AR coefficients")
                    ->delimiter(',');
  auto* o_beta = c_sim->add_option("--beta", sim.beta,
                                   "Regression coefficients")
                     ->delimiter(',');
  c_sim->add_option("--harmonic", sim.harmonic,
                    "Generate cos/sin covariates with this period");
  c_sim->add_option("--n", sim.n, "Series length")->required();
  c_sim->add_option("--seed", sim.seed, "RNG seed");
  c_sim->add_option("--out", sim.out, "Output series CSV")->required();

  FitArgs fita;
  CLI::App* c_fit = app.add_subcommand("fit", "Estimate a model from a CSV");
  c_fit->add_option("series", fita.series_path, "Input series CSV")
      ->required();
  c_fit->add_option("--variant", fita.variant, "Model variant: t or e");
  c_fit->add_option("--order", fita.order, "AR order to fit");
  c_fit->add_flag("--select", fita.select, "Pick the order by BIC");
  c_fit->add_option("--pmax", fita.pmax, "Largest order for --select");
  c_fit->add_option("--k", fita.k,
                    "Conditioning length for the e variant (0 = auto)");
  c_fit->add_option("--covariates", fita.covariates,
                    "Covariate columns to use (default: all)")
      ->delimiter(',');
  c_fit->add_option("--multistarts", fita.multistarts, "Optimizer starts");
  c_fit->add_option("--max-evals", fita.max_evals,
                    "Objective evaluations per start");
  c_fit->add_option("--seed", fita.seed, "Seed for start jitter");
  c_fit->add_flag("--exact-inverse", fita.exact_inverse,
                  "Skip the piecewise-linear inverse table");
  c_fit->add_option("--out", fita.out, "Output model JSON");

  ForecastArgs fca;
  CLI::App* c_fc =
      app.add_subcommand("forecast", "One-step forecast from a fitted model");
  c_fc->add_option("model", fca.model_path, "Model JSON")->required();
  c_fc->add_option("series", fca.series_path, "History series CSV")
      ->required();
  c_fc->add_option("--level", fca.level, "Interval level in (0, 1)");
  c_fc->add_option("--interval", fca.interval,
                   "both, symmetric or minlength");
  c_fc->add_option("--x-next", fca.x_next,
                   "Covariate row for the forecast step")
      ->delimiter(',');
  c_fc->add_option("--realized", fca.realized,
                   "Realized next value (enables PIT/CRPS)");
  c_fc->add_option("--out", fca.out, "Output CSV");

  EvaluateArgs eva;
  CLI::App* c_ev = app.add_subcommand(
      "evaluate", "Rolling one-step forecast evaluation");
  c_ev->add_option("series", eva.series_path, "Input series CSV")->required();
  c_ev->add_option("--variant", eva.variant, "Model variant: t or e");
  c_ev->add_option("--order", eva.order, "AR order")->required();
  c_ev->add_option("--window", eva.window, "Rolling window length")
      ->required();
  c_ev->add_option("--refit-every", eva.refit_every,
                   "Refit cadence in steps");
  c_ev->add_option("--level", eva.level, "Interval level in (0, 1)");
  c_ev->add_option("--covariates", eva.covariates,
                   "Covariate columns to use (default: all)")
      ->delimiter(',');
  c_ev->add_option("--multistarts", eva.multistarts, "Optimizer starts");
  c_ev->add_option("--max-evals", eva.max_evals,
                   "Objective evaluations per start");
  c_ev->add_option("--seed", eva.seed, "Seed for start jitter");
  c_ev->add_flag("--inflate", eva.inflate,
                 "Scale predictive variance by 1 + p/window");
  c_ev->add_option("--out", eva.out, "Aggregate scores CSV");
  c_ev->add_option("--steps-out", eva.steps_out, "Per-step records CSV");

  StudyArgs sta;
  CLI::App* c_st = app.add_subcommand("study", "Run Monte Carlo studies");
  c_st->add_option("grid", sta.grid_path, "Grid JSON")->required();
  c_st->add_option("--reps", sta.reps, "Override replication counts");
  c_st->add_option("--seed", sta.seed, "Override section seeds");
  c_st->add_option("--out", sta.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_sim->parsed()) {
      const bool inline_params =
          o_variant->count() || o_xi->count() || o_omega->count() ||
          o_g->count() || o_h->count() || o_phi->count() || o_beta->count();
      return run_simulate(sim, inline_params);
    }
    if (c_fit->parsed()) return run_fit(fita);
    if (c_fc->parsed()) return run_forecast(fca);
    if (c_ev->parsed()) return run_evaluate(eva);
    if (c_st->parsed()) return run_study(sta);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const tghar::io::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
