#include "tghar/study.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tghar/forecast.hpp"
#include "tghar/num.hpp"
#include "tghar/rng.hpp"

namespace tghar::study {

namespace {

// splitmix64 finalizer; spreads (base, unit) into independent fit seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t unit) {
  std::uint64_t x = base + 0x9e3779b97f4a7c15ull * (unit + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t cell_unit(std::uint64_t cell, std::uint64_t rep) {
  return (cell << 32) | rep;
}

fit::Config make_fit_config(model::Variant v, const FitKnobs& knobs,
                            std::uint64_t seed) {
  fit::Config fc;
  fc.variant = v;
  fc.multistarts = knobs.multistarts;
  fc.max_evals = knobs.max_evals;
  fc.use_table = knobs.use_table;
  fc.seed = seed;
  return fc;
}

std::vector<std::string> parameter_names(std::size_t d, std::size_t p) {
  std::vector<std::string> names{"xi", "omega", "g", "h"};
  for (std::size_t j = 1; j <= d; ++j) names.push_back("beta" + std::to_string(j));
  for (std::size_t j = 1; j <= p; ++j) names.push_back("phi" + std::to_string(j));
  return names;
}

std::vector<double> parameter_vector(const model::Spec& s) {
  std::vector<double> v{s.tgh.xi, s.tgh.omega, s.tgh.shape.g, s.tgh.shape.h};
  v.insert(v.end(), s.beta.begin(), s.beta.end());
  v.insert(v.end(), s.arc.phi.begin(), s.arc.phi.end());
  return v;
}

}  // namespace

std::size_t thread_count() {
  if (const char* env = std::getenv("TGHAR_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min(thread_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::vector<double> harmonic_covariates(std::size_t n, std::size_t first_t,
                                        double period) {
  std::vector<double> x(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(first_t + i);
    x[2 * i] = std::cos(2.0 * num::kPi * t / period);
    x[2 * i + 1] = std::sin(2.0 * num::kPi * t / period);
  }
  return x;
}

model::Spec Scenario::spec() const {
  model::Spec s;
  s.variant = variant;
  s.tgh.xi = xi;
  s.tgh.omega = omega;
  s.tgh.shape = shape;
  s.arc.phi = phi;
  s.beta = beta;
  return s;
}

// ---------------------------------------------------------------- order

std::vector<OrderCell> published_order_cells(model::Variant v) {
  const std::vector<std::vector<double>> rows{
      {},
      {-0.5},
      {0.5},
      {-0.8},
      {0.8},
      {-0.5, -0.3},
      {0.2, 0.4},
      {0.8, -0.25},
      {1.5, -0.75},
  };
  std::vector<OrderCell> cells;
  for (const auto& phi : rows) {
    for (std::size_t n : {std::size_t{100}, std::size_t{500}}) {
      cells.push_back({v, phi, n});
    }
  }
  return cells;
}

OrderReport run_order_selection_study(const OrderConfig& cfg) {
  if (cfg.reps == 0) throw std::invalid_argument("order study: reps == 0");
  OrderReport report;
  report.config = cfg;
  report.cells.resize(cfg.cells.size());

  for (std::size_t ci = 0; ci < cfg.cells.size(); ++ci) {
    const OrderCell& cell = cfg.cells[ci];
    model::Spec spec;
    spec.variant = cell.variant;
    spec.tgh = {0.0, 1.0, cfg.shape};
    spec.arc.phi = cell.phi;
    if (!spec.valid()) throw std::invalid_argument("order study: bad cell");

    // -1 records a failed replication, otherwise the selected order.
    std::vector<int> selected(cfg.reps, -1);
    parallel_for(cfg.reps, [&](std::size_t rep) {
      const std::uint64_t unit = cell_unit(ci, rep);
      Pcg64 rng = substream(cfg.seed, unit);
      const model::Series data = model::simulate(spec, cell.n, {}, rng);
      fit::Config fc = make_fit_config(cell.variant, cfg.knobs,
                                       mix_seed(cfg.seed, unit));
      fc.max_order = cfg.p_max;
      try {
        selected[rep] = static_cast<int>(fit::select_order(data, fc).order);
      } catch (const std::exception&) {
      }
    });

    OrderCellResult& out = report.cells[ci];
    out.cell = cell;
    out.selected_counts.assign(cfg.p_max + 1, 0);
    const int truth = static_cast<int>(cell.phi.size());
    std::size_t correct = 0;
    for (int s : selected) {
      if (s < 0) {
        ++out.failures;
        continue;
      }
      ++out.selected_counts[static_cast<std::size_t>(s)];
      if (s == truth) ++correct;
    }
    const std::size_t done = cfg.reps - out.failures;
    out.correct_rate =
        done == 0 ? 0.0
                  : static_cast<double>(correct) / static_cast<double>(done);
  }
  return report;
}

// ------------------------------------------------------------ estimator

EstimatorReport run_estimator_comparison(const EstimatorConfig& cfg) {
  if (cfg.reps == 0) throw std::invalid_argument("estimator study: reps == 0");
  const model::Spec truth_spec = cfg.scenario.spec();
  if (truth_spec.variant != model::Variant::Latent) {
    throw std::invalid_argument("estimator study: latent scenarios only");
  }
  const std::size_t p = truth_spec.arc.order();
  const std::size_t d = truth_spec.beta.size();
  const std::vector<std::string> names = parameter_names(d, p);
  const std::vector<double> truth = parameter_vector(truth_spec);
  const std::size_t nparam = truth.size();

  EstimatorReport report;
  report.config = cfg;

  for (std::size_t ni = 0; ni < cfg.sizes.size(); ++ni) {
    const std::size_t n = cfg.sizes[ni];
    const std::vector<double> x =
        d > 0 ? harmonic_covariates(n, 1, cfg.scenario.period)
              : std::vector<double>{};

    struct Slot {
      bool joint_ok = false;
      bool seq_ok = false;
      std::vector<double> joint, seq;
    };
    std::vector<Slot> slots(cfg.reps);
    parallel_for(cfg.reps, [&](std::size_t rep) {
      const std::uint64_t unit = cell_unit(ni, rep);
      Pcg64 rng = substream(cfg.seed, unit);
      const model::Series data = model::simulate(truth_spec, n, x, rng);
      const fit::Config fc = make_fit_config(
          model::Variant::Latent, cfg.knobs, mix_seed(cfg.seed, unit));
      Slot& slot = slots[rep];
      try {
        slot.joint = parameter_vector(fit::fit(data, p, fc).spec);
        slot.joint_ok = true;
      } catch (const std::exception&) {
      }
      try {
        slot.seq = parameter_vector(fit::fit_sequential(data, p, fc).spec);
        slot.seq_ok = true;
      } catch (const std::exception&) {
      }
    });

    for (const char* method : {"joint", "sequential"}) {
      const bool joint = std::string(method) == "joint";
      EstimatorCellResult cell;
      cell.n = n;
      cell.method = method;
      cell.names = names;
      cell.truth = truth;
      cell.estimates.assign(nparam, {});
      for (const Slot& slot : slots) {
        const bool ok = joint ? slot.joint_ok : slot.seq_ok;
        if (!ok) {
          ++cell.failures;
          continue;
        }
        const std::vector<double>& est = joint ? slot.joint : slot.seq;
        for (std::size_t j = 0; j < nparam; ++j) {
          cell.estimates[j].push_back(est[j]);
        }
      }
      cell.rmse.assign(nparam, 0.0);
      for (std::size_t j = 0; j < nparam; ++j) {
        long double ss = 0.0L;
        for (double e : cell.estimates[j]) {
          ss += (e - truth[j]) * (e - truth[j]);
        }
        const std::size_t m = cell.estimates[j].size();
        cell.rmse[j] = m == 0 ? 0.0
                              : std::sqrt(static_cast<double>(
                                    ss / static_cast<long double>(m)));
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

// ------------------------------------------------------------- forecast

const char* fit_method_name(FitMethod m) {
  switch (m) {
    case FitMethod::Latent:
      return "t";
    case FitMethod::Error:
      return "e";
    default:
      return "gaussian";
  }
}

ForecastReport run_forecast_comparison(const ForecastConfig& cfg) {
  if (cfg.reps == 0) throw std::invalid_argument("forecast study: reps == 0");
  const std::size_t n = cfg.n;
  const std::size_t p = cfg.scenario.phi.size();
  const std::size_t d = cfg.scenario.beta.size();
  const std::vector<double> x =
      d > 0 ? harmonic_covariates(n + 1, 1, cfg.scenario.period)
            : std::vector<double>{};
  constexpr FitMethod kMethods[] = {FitMethod::Latent, FitMethod::Error,
                                    FitMethod::Gaussian};
  constexpr model::Variant kVariants[] = {model::Variant::Latent,
                                          model::Variant::Error};

  struct MethodScore {
    bool ok = false;
    double med_err = 0.0;
    double mean_err = std::numeric_limits<double>::quiet_NaN();
    double width = 0.0;
    bool covered = false;
    double pit = 0.0;
    double crps = std::numeric_limits<double>::quiet_NaN();
  };
  struct Slot {
    MethodScore m[3];
  };

  ForecastReport report;
  report.config = cfg;

  for (std::size_t vi = 0; vi < 2; ++vi) {
    Scenario sc = cfg.scenario;
    sc.variant = kVariants[vi];
    const model::Spec data_spec = sc.spec();

    std::vector<Slot> slots(cfg.reps);
    parallel_for(cfg.reps, [&](std::size_t rep) {
      const std::uint64_t unit = cell_unit(vi, rep);
      Pcg64 rng = substream(cfg.seed, unit);
      const model::Series full = model::simulate(data_spec, n + 1, x, rng);
      const model::Series train = full.slice(0, n);
      const double y_next = full.y[n];
      const std::span<const double> x_next{full.xrow(n), full.xdim};

      for (std::size_t mi = 0; mi < 3; ++mi) {
        fit::Config fc = make_fit_config(
            kMethods[mi] == FitMethod::Error ? model::Variant::Error
                                             : model::Variant::Latent,
            cfg.knobs, mix_seed(cfg.seed, unit * 3 + mi));
        if (kMethods[mi] == FitMethod::Gaussian) {
          fc.fix_g = 0.0;
          fc.fix_h = 0.0;
        }
        MethodScore& ms = slots[rep].m[mi];
        try {
          const fit::Result fr = fit::fit(train, p, fc);
          const forecast::Distribution dist =
              forecast::predictive(fr.spec, train, x_next);
          ms.med_err = forecast::point_median(dist) - y_next;
          const forecast::Interval ci = forecast::interval(
              dist, cfg.level, forecast::IntervalKind::MinimumLength);
          ms.width = ci.upper - ci.lower;
          ms.covered = y_next >= ci.lower && y_next <= ci.upper;
          ms.pit = forecast::pit(dist, y_next);
          try {
            ms.mean_err = forecast::point_mean(dist) - y_next;
          } catch (const std::domain_error&) {
          }
          try {
            ms.crps = forecast::crps(dist, y_next);
          } catch (const std::domain_error&) {
          }
          ms.ok = true;
        } catch (const std::exception&) {
        }
      }
    });

    for (std::size_t mi = 0; mi < 3; ++mi) {
      ForecastCellResult cell;
      cell.data_variant = kVariants[vi];
      cell.method = kMethods[mi];
      long double abs_err = 0.0L, sq_err = 0.0L, wid = 0.0L, crps_sum = 0.0L;
      std::size_t n_ok = 0, n_mean = 0, n_crps = 0, hits = 0;
      for (const Slot& slot : slots) {
        const MethodScore& ms = slot.m[mi];
        if (!ms.ok) {
          ++cell.failures;
          continue;
        }
        ++n_ok;
        abs_err += std::abs(ms.med_err);
        wid += ms.width;
        if (ms.covered) ++hits;
        cell.pits.push_back(ms.pit);
        if (std::isfinite(ms.mean_err)) {
          sq_err += ms.mean_err * ms.mean_err;
          ++n_mean;
        }
        if (std::isfinite(ms.crps)) {
          crps_sum += ms.crps;
          ++n_crps;
        }
      }
      if (n_ok > 0) {
        cell.mae = static_cast<double>(abs_err / n_ok);
        cell.coverage = static_cast<double>(hits) / static_cast<double>(n_ok);
        cell.width = static_cast<double>(wid / n_ok);
      }
      if (n_mean > 0) {
        cell.rmse = std::sqrt(static_cast<double>(sq_err / n_mean));
      }
      if (n_crps > 0) cell.mean_crps = static_cast<double>(crps_sum / n_crps);
      if (!cell.pits.empty()) {
        cell.pit_ks = num::ks_uniform_statistic(cell.pits);
      }
      for (int j = 1; j <= 19; ++j) {
        const double nominal = j / 20.0;
        std::size_t cnt = 0;
        for (double u : cell.pits) {
          if (u <= nominal) ++cnt;
        }
        const double emp =
            cell.pits.empty()
                ? 0.0
                : static_cast<double>(cnt) /
                      static_cast<double>(cell.pits.size());
        cell.reliability.emplace_back(nominal, emp);
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

// ---------------------------------------------------------- realizations

RealizationMatrix export_realization_matrix(const model::Spec& spec,
                                            std::size_t n, std::size_t reps,
                                            std::uint64_t seed) {
  if (!spec.valid()) throw std::invalid_argument("realizations: bad spec");
  if (!spec.beta.empty()) {
    throw std::invalid_argument("realizations: regression term not supported");
  }
  if (n == 0 || reps == 0) {
    throw std::invalid_argument("realizations: empty request");
  }
  RealizationMatrix out;
  out.reps = reps;
  out.n = n;
  out.values.resize(reps * n);
  parallel_for(reps, [&](std::size_t rep) {
    Pcg64 rng = substream(seed, rep);
    const model::Series path = model::simulate(spec, n, {}, rng);
    std::copy(path.y.begin(), path.y.end(), out.values.begin() + rep * n);
  });
  out.descriptors = spec.variant == model::Variant::Latent
                        ? tgh::summary(spec.tgh.shape)
                        : model::error_model_descriptors(spec);
  return out;
}

}  // namespace tghar::study
