// Forecast layer: one-step predictive laws, point predictors, both interval
// kinds, PIT, CRPS and the rolling evaluation harness.

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tghar/fit.hpp"
#include "tghar/forecast.hpp"
#include "tghar/model.hpp"
#include "tghar/num.hpp"
#include "tghar/rng.hpp"
#include "tghar/tgh.hpp"

using namespace tghar;

TEST_SUITE_BEGIN("forecast");

namespace {

forecast::Distribution error_dist(double det, double omega, double g,
                                  double h) {
  forecast::Distribution d;
  d.kind = model::Variant::Error;
  d.det = det;
  d.omega = omega;
  d.shape = {g, h};
  d.mu = 0.0;
  d.sigma = 1.0;
  return d;
}

forecast::Distribution latent_dist(double det, double omega, double g,
                                   double h, double mu, double sigma) {
  forecast::Distribution d;
  d.kind = model::Variant::Latent;
  d.det = det;
  d.omega = omega;
  d.shape = {g, h};
  d.mu = mu;
  d.sigma = sigma;
  return d;
}

}  // namespace

TEST_CASE("latent predictive carries the conditional gaussian moments") {
  model::Spec spec;
  spec.tgh.xi = 2.0;
  spec.tgh.omega = 1.5;
  spec.arc.phi = {0.8};

  model::Series hist;
  hist.y = {2.0, 3.5};  // z-history (0, 1)
  const forecast::Distribution d = forecast::predictive(spec, hist, {});
  CHECK(d.kind == model::Variant::Latent);
  CHECK(d.det == doctest::Approx(2.0));
  CHECK(d.omega == doctest::Approx(1.5));
  CHECK(d.mu == doctest::Approx(0.8));
  CHECK(d.sigma == doctest::Approx(0.6));

  // Identity transform: the predictive is the usual Gaussian AR one.
  CHECK(forecast::point_median(d) == doctest::Approx(2.0 + 1.5 * 0.8));
  CHECK(forecast::point_mean(d) == doctest::Approx(2.0 + 1.5 * 0.8));
  const forecast::Interval sym =
      forecast::interval(d, 0.95, forecast::IntervalKind::SymmetricWeight);
  const double z975 = num::norm_quantile(0.975);
  CHECK(std::abs(sym.lower - (3.2 - z975 * 0.9)) < 1e-9);
  CHECK(std::abs(sym.upper - (3.2 + z975 * 0.9)) < 1e-9);
}

TEST_CASE("error predictive folds the AR carry into the deterministic part") {
  model::Spec spec;
  spec.variant = model::Variant::Error;
  spec.tgh.xi = 1.0;
  spec.tgh.omega = 1.5;
  spec.tgh.shape = {0.3, 0.1};
  spec.arc.phi = {0.6, 0.2};
  spec.beta = {2.0};

  model::Series hist;
  hist.y = {1.5, 3.0, 2.0};
  hist.xdim = 1;
  hist.x = {0.1, -0.2, 0.3};
  const std::vector<double> x_next{0.5};
  const forecast::Distribution d = forecast::predictive(spec, hist, x_next);
  CHECK(d.mu == 0.0);
  CHECK(d.sigma == 1.0);
  // det = xi + x b + phi1 ytil_t + phi2 ytil_{t-1}.
  const double ytil_t = 2.0 - 1.0 - 2.0 * 0.3;
  const double ytil_p = 3.0 - 1.0 - 2.0 * (-0.2);
  const double det = 1.0 + 2.0 * 0.5 + 0.6 * ytil_t + 0.2 * ytil_p;
  CHECK(d.det == doctest::Approx(det));
  // The conditional median has the Gaussian-AR point forecast form.
  CHECK(forecast::point_median(d) == doctest::Approx(det));
}

TEST_CASE("predictive validates its inputs") {
  model::Spec spec;
  spec.arc.phi = {0.5};
  model::Series empty;
  CHECK_THROWS_AS(forecast::predictive(spec, empty, {}),
                  std::invalid_argument);

  spec.beta = {1.0};
  model::Series hist;
  hist.y = {0.0};
  hist.xdim = 1;
  hist.x = {0.0};
  CHECK_THROWS_AS(forecast::predictive(spec, hist, {}),
                  std::invalid_argument);

  // A latent history outside the transform support names the bad index.
  model::Spec bounded;
  bounded.tgh.shape = {0.5, 0.0};
  bounded.arc.phi = {0.5};
  model::Series bad;
  bad.y = {-5.0};
  try {
    forecast::predictive(bounded, bad, {});
    FAIL("expected a domain error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("0") != std::string::npos);
  }
}

TEST_CASE("point mean closed forms") {
  // Error model: mean - median = omega E(T).
  const forecast::Distribution e = error_dist(1.0, 1.5, 0.3, 0.1);
  const double lift = forecast::point_mean(e) - forecast::point_median(e);
  CHECK(std::abs(lift - 1.5 * tgh::moment({0.3, 0.1}, 1)) < 1e-12);
  CHECK(std::abs(lift - 0.270223) < 1e-5);

  // Symmetric case: mean equals median equals det.
  const forecast::Distribution sym = error_dist(0.7, 2.0, 0.0, 0.2);
  CHECK(forecast::point_mean(sym) == doctest::Approx(0.7));

  // Latent model against a quadrature oracle.
  Pcg64 rng(67);
  for (int i = 0; i < 8; ++i) {
    const double g = -0.5 + rng.next_uniform();
    const double h = 0.25 * rng.next_uniform();
    const double mu = -1.0 + 2.0 * rng.next_uniform();
    const double sigma = 0.4 + 0.8 * rng.next_uniform();
    if (!(h * sigma * sigma < 0.9)) continue;
    const forecast::Distribution d =
        latent_dist(0.3, 1.2, g, h, mu, sigma);
    const double oracle =
        0.3 + 1.2 * num::integrate(
                        [&](double z) {
                          return tgh::tau({g, h}, mu + sigma * z) *
                                 num::norm_pdf(z);
                        },
                        -12.0, 12.0, 1e-10, 1e-13);
    CHECK(std::abs(forecast::point_mean(d) - oracle) < 1e-6);
  }

  // Existence boundary.
  const forecast::Distribution heavy = latent_dist(0.0, 1.0, 0.3, 0.5, 0.0,
                                                   1.5);
  CHECK_THROWS_AS(forecast::point_mean(heavy), std::domain_error);
}

TEST_CASE("mean-median ordering follows the skew direction") {
  CHECK(forecast::point_mean(error_dist(0.0, 1.0, 0.4, 0.1)) >
        forecast::point_median(error_dist(0.0, 1.0, 0.4, 0.1)));
  CHECK(forecast::point_mean(error_dist(0.0, 1.0, -0.4, 0.1)) <
        forecast::point_median(error_dist(0.0, 1.0, -0.4, 0.1)));
  const forecast::Distribution lat = latent_dist(0.0, 1.0, 0.3, 0.1, 0.5,
                                                 0.8);
  CHECK(forecast::point_mean(lat) > forecast::point_median(lat));
}

TEST_CASE("quantile, cdf and interval coherence") {
  const forecast::Distribution d = latent_dist(0.4, 1.3, 0.3, 0.1, 0.6, 0.7);
  for (double u : {0.01, 0.1, 0.5, 0.9, 0.99}) {
    CHECK(std::abs(forecast::cdf(d, forecast::quantile(d, u)) - u) < 1e-10);
  }
  CHECK(std::abs(forecast::quantile(d, 0.5) - forecast::point_median(d)) <
        1e-12);

  const forecast::Interval sym =
      forecast::interval(d, 0.95, forecast::IntervalKind::SymmetricWeight);
  CHECK(std::abs(sym.lower - forecast::quantile(d, 0.025)) < 1e-8);
  CHECK(std::abs(sym.upper - forecast::quantile(d, 0.975)) < 1e-8);
  CHECK(std::abs(forecast::cdf(d, sym.upper) - forecast::cdf(d, sym.lower) -
                 0.95) < 1e-8);
  CHECK(sym.gamma == doctest::Approx(0.025));

  const forecast::Interval minlen =
      forecast::interval(d, 0.95, forecast::IntervalKind::MinimumLength);
  CHECK(std::abs(forecast::cdf(d, minlen.upper) -
                 forecast::cdf(d, minlen.lower) - 0.95) < 1e-8);
  CHECK(minlen.upper - minlen.lower <= sym.upper - sym.lower + 1e-9);
  CHECK(minlen.gamma > 0.0);
  CHECK(minlen.gamma < 0.05);

  // Positive skew pushes the optimal split below alpha/2.
  CHECK(minlen.gamma < 0.025);
  CHECK(minlen.upper - minlen.lower < sym.upper - sym.lower);
}

TEST_CASE("symmetric predictives make both interval kinds coincide") {
  const forecast::Distribution d = error_dist(0.2, 1.4, 0.0, 0.15);
  const forecast::Interval sym =
      forecast::interval(d, 0.9, forecast::IntervalKind::SymmetricWeight);
  const forecast::Interval minlen =
      forecast::interval(d, 0.9, forecast::IntervalKind::MinimumLength);
  CHECK(std::abs(sym.lower - minlen.lower) < 1e-6);
  CHECK(std::abs(sym.upper - minlen.upper) < 1e-6);
  CHECK(std::abs(minlen.gamma - 0.05) < 1e-6);
}

TEST_CASE("pit basics") {
  const forecast::Distribution d = error_dist(0.3, 1.2, 0.3, 0.1);
  CHECK(forecast::pit(d, forecast::point_median(d)) ==
        doctest::Approx(0.5));
  // Below a bounded support the value clamps to zero.
  const forecast::Distribution bounded = error_dist(0.0, 1.0, 0.5, 0.0);
  CHECK(forecast::pit(bounded, -3.0) == 0.0);
  CHECK(forecast::pit(bounded, 1e9) == doctest::Approx(1.0));
}

TEST_CASE("crps reduces to the gaussian closed form") {
  const forecast::Distribution d = latent_dist(0.4, 1.5, 0.0, 0.0, 0.8, 0.6);
  for (double y : {-1.0, 1.6, 3.0}) {
    const double ref = num::gaussian_crps(0.4 + 1.5 * 0.8, 1.5 * 0.6, y);
    CHECK(std::abs(forecast::crps(d, y) - ref) < 1e-7);
  }
  CHECK(forecast::crps(d, 1.0) >= 0.0);
  const forecast::Distribution heavy =
      latent_dist(0.0, 1.0, 0.3, 0.4, 0.0, 1.2);
  CHECK_THROWS_AS(forecast::crps(heavy, 0.0), std::domain_error);
}

TEST_CASE("crps favors the true predictive on average") {
  const forecast::Distribution truth = error_dist(0.0, 1.0, 0.3, 0.1);
  forecast::Distribution wide = truth;
  wide.omega = 1.5;
  Pcg64 rng(73);
  long double acc_true = 0.0L, acc_wide = 0.0L;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = tgh::tau({0.3, 0.1}, rng.next_normal());
    acc_true += forecast::crps(truth, y);
    acc_wide += forecast::crps(wide, y);
  }
  CHECK(static_cast<double>(acc_true) < static_cast<double>(acc_wide));
}

TEST_CASE("one-step pits are uniform under the true model") {
  const std::size_t reps = 2000;
  const std::size_t n = 40;
  for (model::Variant variant :
       {model::Variant::Latent, model::Variant::Error}) {
    model::Spec spec;
    spec.variant = variant;
    spec.tgh.omega = 1.2;
    spec.tgh.shape = {0.3, 0.1};
    spec.arc.phi = {0.8};
    std::vector<double> pits(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      Pcg64 rng = substream(101, r);
      const model::Series path = model::simulate(spec, n + 1, {}, rng);
      const model::Series hist = path.slice(0, n);
      const forecast::Distribution d = forecast::predictive(spec, hist, {});
      pits[r] = forecast::pit(d, path.y[n]);
    }
    CHECK(num::ks_uniform_statistic(pits) <
          num::ks_critical_value(reps, 0.01));
  }
}

TEST_CASE("rolling evaluation") {
  model::Spec spec;
  spec.tgh.xi = 0.5;
  spec.tgh.omega = 1.0;
  spec.tgh.shape = {0.3, 0.1};
  spec.arc.phi = {0.8};
  Pcg64 rng(83);
  const model::Series data = model::simulate(spec, 160, {}, rng);

  fit::Config cfg;
  cfg.multistarts = 2;
  cfg.max_evals = 1500;
  forecast::RollingOptions opts;
  opts.refit_every = 20;
  const forecast::RollingResult r =
      forecast::rolling_forecast(data, 1, cfg, 120, opts);

  CHECK(r.steps.size() == 40);
  CHECK(r.n_scored + r.n_failed == r.steps.size());
  CHECK(r.n_scored > 30);
  CHECK(r.mae > 0.0);
  CHECK(r.rmse >= r.mae * 0.5);
  CHECK(r.width_min_length <= r.width_symmetric + 1e-9);
  CHECK(r.coverage_min_length >= 0.6);
  CHECK(r.coverage_min_length <= 1.0);
  CHECK(r.mean_crps > 0.0);
  for (const forecast::StepRecord& s : r.steps) {
    if (!s.scored) continue;
    CHECK(s.t >= 120);
    CHECK(s.pit >= 0.0);
    CHECK(s.pit <= 1.0);
  }

  forecast::RollingOptions wide = opts;
  wide.inflate_variance = true;
  const forecast::RollingResult ri =
      forecast::rolling_forecast(data, 1, cfg, 120, wide);
  CHECK(ri.width_min_length > r.width_min_length);

  CHECK_THROWS_AS(forecast::rolling_forecast(data, 1, cfg, 200, opts),
                  std::invalid_argument);
}

TEST_SUITE_END();
