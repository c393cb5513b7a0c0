// Model layer: simulation of both variants, the exact-start and conditional
// likelihoods, autocovariance and moment descriptors. Likelihood values are
// checked against a dense multivariate-normal Cholesky oracle and a direct
// conditional-Gaussian sum written out in the test.

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tghar/ar.hpp"
#include "tghar/model.hpp"
#include "tghar/num.hpp"
#include "tghar/rng.hpp"
#include "tghar/tgh.hpp"

using namespace tghar;

TEST_SUITE_BEGIN("model");

namespace {

// Log-density of z under the unit-variance stationary AR law, from the
// dense Toeplitz correlation matrix.
double mvn_loglik(const std::vector<double>& z, const ar::Coeffs& c) {
  const std::size_t n = z.size();
  const std::vector<double> rho = ar::acf(c, n - 1);
  std::vector<double> l(n * n, 0.0);
  double logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = rho[i - j];
      for (std::size_t k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        l[i * n + i] = std::sqrt(sum);
        logdet += 2.0 * std::log(l[i * n + i]);
      } else {
        l[i * n + j] = sum / l[j * n + j];
      }
    }
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = z[i];
    for (std::size_t k = 0; k < i; ++k) sum -= l[i * n + k] * y[k];
    y[i] = sum / l[i * n + i];
  }
  double quad = 0.0;
  for (double v : y) quad += v * v;
  return -0.5 * (static_cast<double>(n) * num::kLog2Pi + logdet + quad);
}

model::Series gaussian_ar_series(const ar::Coeffs& c, double xi, double omega,
                                 std::size_t n, std::uint64_t seed) {
  model::Spec spec;
  spec.variant = model::Variant::Latent;
  spec.tgh.xi = xi;
  spec.tgh.omega = omega;
  spec.arc = c;
  Pcg64 rng(seed);
  return model::simulate(spec, n, {}, rng);
}

}  // namespace

TEST_CASE("variant names") {
  CHECK(std::string(model::variant_name(model::Variant::Latent)) == "t");
  CHECK(std::string(model::variant_name(model::Variant::Error)) == "e");
  CHECK(model::variant_from_name("t") == model::Variant::Latent);
  CHECK(model::variant_from_name("e") == model::Variant::Error);
  CHECK_THROWS_AS(model::variant_from_name("x"), std::domain_error);
}

TEST_CASE("series slicing") {
  model::Series s;
  s.y = {0.0, 1.0, 2.0, 3.0, 4.0};
  s.xdim = 2;
  s.x = {0, 0, 1, 10, 2, 20, 3, 30, 4, 40};
  const model::Series cut = s.slice(1, 4);
  CHECK(cut.y == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(cut.xdim == 2);
  CHECK(cut.x == std::vector<double>{1, 10, 2, 20, 3, 30});
}

TEST_CASE("gaussian reduction of the latent likelihood") {
  const ar::Coeffs c{{0.6, -0.2}};
  const model::Series data = gaussian_ar_series(c, 0.7, 1.3, 400, 5);
  model::Spec spec;
  spec.tgh.xi = 0.7;
  spec.tgh.omega = 1.3;
  spec.arc = c;

  const model::LogLik ll = model::loglik_latent(spec, data);
  REQUIRE(ll.supported);
  const double ref = model::loglik_gaussian_ar(spec, data);
  CHECK(std::abs(ll.value - ref) < 1e-10 * data.size());

  // Independent dense-Cholesky oracle on the standardized series.
  std::vector<double> z(data.size());
  for (std::size_t t = 0; t < data.size(); ++t) {
    z[t] = (data.y[t] - 0.7) / 1.3;
  }
  const double dense =
      mvn_loglik(z, c) - static_cast<double>(data.size()) * std::log(1.3);
  CHECK(std::abs(ll.value - dense) < 1e-7);
}

TEST_CASE("latent likelihood with a transform matches the dense oracle") {
  model::Spec spec;
  spec.tgh.xi = -1.0;
  spec.tgh.omega = 1.5;
  spec.tgh.shape = {0.3, 0.1};
  spec.arc.phi = {0.8};
  Pcg64 rng(9);
  const model::Series data = model::simulate(spec, 200, {}, rng);

  const model::LogLik ll =
      model::loglik_latent(spec, data, {false, 1e-6, 1.0});
  REQUIRE(ll.supported);

  std::vector<double> z(data.size());
  double jac = 0.0;
  for (std::size_t t = 0; t < data.size(); ++t) {
    const double u = (data.y[t] + 1.0) / 1.5;
    z[t] = tgh::tau_inverse_exact(spec.tgh.shape, u);
    jac += tgh::log_tau_deriv(spec.tgh.shape, z[t]);
  }
  const double dense = mvn_loglik(z, spec.arc) -
                       static_cast<double>(data.size()) * std::log(1.5) - jac;
  CHECK(std::abs(ll.value - dense) < 1e-7);
}

TEST_CASE("gaussian reduction of the conditional likelihood") {
  const ar::Coeffs c{{0.5, 0.2}};
  const model::Series data = gaussian_ar_series(c, -0.4, 0.9, 300, 13);
  model::Spec spec;
  spec.variant = model::Variant::Error;
  spec.tgh.xi = -0.4;
  spec.tgh.omega = 0.9;
  spec.arc = c;

  const std::size_t k = 3;
  const model::LogLik ll = model::loglik_error(spec, data, k);
  REQUIRE(ll.supported);

  double ref = 0.0;
  for (std::size_t t = k; t < data.size(); ++t) {
    double mu = 0.0;
    for (std::size_t j = 1; j <= c.order(); ++j) {
      mu += c.phi[j - 1] * (data.y[t - j] + 0.4);
    }
    const double e = (data.y[t] + 0.4) - mu;
    ref += -std::log(0.9) - 0.5 * num::kLog2Pi - 0.5 * e * e / (0.9 * 0.9);
  }
  CHECK(std::abs(ll.value - ref) < 1e-10 * (data.size() - k));
}

TEST_CASE("conditional likelihood scale equivariance") {
  model::Spec spec;
  spec.variant = model::Variant::Error;
  spec.tgh.omega = 1.2;
  spec.tgh.shape = {0.3, 0.1};
  spec.arc.phi = {0.6};
  Pcg64 rng(21);
  model::Series data = model::simulate(spec, 250, {}, rng);

  const std::size_t k = 1;
  const model::LogLik base = model::loglik_error(spec, data, k);
  REQUIRE(base.supported);

  model::Spec doubled = spec;
  doubled.tgh.omega = 2.4;
  model::Series scaled = data;
  for (double& y : scaled.y) y *= 2.0;
  const model::LogLik twice = model::loglik_error(doubled, scaled, k);
  REQUIRE(twice.supported);
  const double drop = static_cast<double>(data.size() - k) * std::log(2.0);
  CHECK(std::abs(base.value - twice.value - drop) < 1e-8);
}

TEST_CASE("support violations flag instead of throwing") {
  model::Spec spec;
  spec.tgh.shape = {0.5, 0.0};  // support bounded below at -1/g = -2
  model::Series data;
  data.y = {0.0, 0.3, -2.5, 0.1, 0.4, 0.0, 0.2, -0.1, 0.3, 0.1};
  const model::LogLik ll = model::loglik_latent(spec, data);
  CHECK(!ll.supported);
  CHECK(ll.value == -std::numeric_limits<double>::infinity());

  model::Spec espec = spec;
  espec.variant = model::Variant::Error;
  const model::LogLik elle = model::loglik_error(espec, data, 0);
  CHECK(!elle.supported);
}

TEST_CASE("table inverse tracks the exact one") {
  model::Spec spec;
  spec.tgh.xi = 0.5;
  spec.tgh.omega = 1.1;
  spec.tgh.shape = {0.3, 0.1};
  spec.arc.phi = {0.8};
  Pcg64 rng(33);
  const model::Series data = model::simulate(spec, 500, {}, rng);

  const model::LogLik exact =
      model::loglik_latent(spec, data, {false, 1e-6, 1.0});
  const model::LogLik table =
      model::loglik_latent(spec, data, {true, 1e-6, 1.0});
  REQUIRE(exact.supported);
  REQUIRE(table.supported);
  CHECK(std::abs(exact.value - table.value) < 1e-4 * data.size());
}

TEST_CASE("latent autocovariance") {
  const tgh::Shape s{0.3, 0.1};
  CHECK(std::abs(model::latent_autocovariance(s, 0.0)) < 1e-12);
  const double var = tgh::moment(s, 2) - std::pow(tgh::moment(s, 1), 2);
  CHECK(std::abs(model::latent_autocovariance(s, 1.0) - var) < 1e-10);
  CHECK_THROWS_AS(model::latent_autocovariance({0.3, 0.6}, 0.5),
                  std::domain_error);

  // Bivariate-normal Monte Carlo oracle at rho = 0.8.
  const double rho = 0.8;
  Pcg64 rng(45);
  const std::size_t n = 1000000;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.next_normal();
    const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * rng.next_normal();
    a[i] = tgh::tau(s, z1);
    b[i] = tgh::tau(s, z2);
  }
  const double ma = num::sample_mean(a);
  const double mb = num::sample_mean(b);
  long double acc = 0.0L, accsq = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (a[i] - ma) * (b[i] - mb);
    acc += w;
    accsq += static_cast<long double>(w) * w;
  }
  const double cov = static_cast<double>(acc / n);
  const double wvar = static_cast<double>(accsq / n) - cov * cov;
  const double se = std::sqrt(std::max(wvar, 0.0) / n);
  CHECK(std::abs(model::latent_autocovariance(s, rho) - cov) < 4.0 * se);
}

TEST_CASE("error-model descriptors") {
  model::Spec iid;
  iid.variant = model::Variant::Error;
  iid.tgh.shape = {0.3, 0.1};
  iid.tgh.omega = 1.0;
  const tgh::Summary inno = tgh::summary(iid.tgh.shape);
  const tgh::Summary d0 = model::error_model_descriptors(iid);
  CHECK(std::abs(d0.mean - inno.mean) < 1e-12);
  CHECK(std::abs(d0.sd - inno.sd) < 1e-12);
  CHECK(std::abs(d0.skewness - inno.skewness) < 1e-12);
  CHECK(std::abs(d0.excess_kurtosis - inno.excess_kurtosis) < 1e-12);

  model::Spec arspec = iid;
  arspec.arc.phi = {0.8};
  const tgh::Summary d1 = model::error_model_descriptors(arspec);
  // Skewness shrinks by sum(psi^3) / sum(psi^2)^(3/2); geometric sums.
  const double ratio =
      (1.0 / (1.0 - 0.512)) / std::pow(1.0 / 0.36, 1.5);
  CHECK(std::abs(d1.skewness / inno.skewness - ratio) < 1e-9);
  CHECK(std::abs(ratio - 0.442623) < 1e-6);
  // Mean scales by 1/(1 - sum(phi)), sd by sqrt(sum(psi^2)).
  CHECK(std::abs(d1.mean - inno.mean / 0.2) < 1e-9);
  CHECK(std::abs(d1.sd - inno.sd * std::sqrt(1.0 / 0.36)) < 1e-9);

  model::Spec sym = arspec;
  sym.tgh.shape = {0.0, 0.1};
  CHECK(model::error_model_descriptors(sym).skewness == 0.0);
}

TEST_CASE("simulated gaussian variance scales") {
  // Latent variant: stochastic part has marginal variance omega^2.
  model::Spec spec;
  spec.tgh.xi = 2.0;
  spec.tgh.omega = 1.5;
  spec.arc.phi = {0.8};
  Pcg64 rng(57);
  const model::Series t_path = model::simulate(spec, 200000, {}, rng);
  std::vector<double> centered = t_path.y;
  for (double& y : centered) y -= 2.0;
  CHECK(std::abs(num::sample_mean(centered)) < 0.05);
  CHECK(std::abs(num::sample_variance(centered) - 2.25) < 0.1);

  // Error variant: variance omega^2 sum(psi_j^2) = omega^2 / (1 - phi^2).
  model::Spec espec = spec;
  espec.variant = model::Variant::Error;
  Pcg64 erng(58);
  const model::Series e_path = model::simulate(espec, 200000, {}, erng);
  std::vector<double> ecen = e_path.y;
  for (double& y : ecen) y -= 2.0;
  const double target = 2.25 / (1.0 - 0.64);
  CHECK(std::abs(num::sample_variance(ecen) - target) < 0.2);
}

TEST_CASE("latent marginals follow the transform law") {
  model::Spec spec;
  spec.tgh.omega = 1.0;
  spec.tgh.shape = {0.3, 0.1};
  spec.arc.phi = {0.8};
  Pcg64 rng(61);
  const model::Series path = model::simulate(spec, 200000, {}, rng);

  // KS distance of the marginal sample against the stationary cdf; the
  // serial dependence shrinks the effective sample, hence the loose bound.
  std::vector<double> u(path.size());
  for (std::size_t t = 0; t < path.size(); ++t) {
    u[t] = tgh::cdf(spec.tgh, path.y[t]);
  }
  CHECK(num::ks_uniform_statistic(u) < 0.01);
}

TEST_CASE("error-model sample mean matches the descriptor") {
  model::Spec spec;
  spec.variant = model::Variant::Error;
  spec.tgh.omega = 1.0;
  spec.tgh.shape = {0.3, 0.1};
  spec.arc.phi = {0.8};
  Pcg64 rng(63);
  const model::Series path = model::simulate(spec, 200000, {}, rng);
  const double target = tgh::moment(spec.tgh.shape, 1) / 0.2;
  CHECK(std::abs(num::sample_mean(path.y) - target) < 0.05);
}

TEST_CASE("regression terms shift the path deterministically") {
  model::Spec plain;
  plain.tgh.shape = {0.3, 0.1};
  plain.arc.phi = {0.8};

  model::Spec reg = plain;
  reg.beta = {3.0, -2.0};
  const std::size_t n = 64;
  std::vector<double> x(n * 2);
  for (std::size_t t = 0; t < n; ++t) {
    x[2 * t] = std::cos(2.0 * num::kPi * (t + 1) / 24.0);
    x[2 * t + 1] = std::sin(2.0 * num::kPi * (t + 1) / 24.0);
  }

  Pcg64 r1(71), r2(71);
  const model::Series base = model::simulate(plain, n, {}, r1);
  const model::Series shifted = model::simulate(reg, n, x, r2);
  for (std::size_t t = 0; t < n; ++t) {
    const double lin = 3.0 * x[2 * t] - 2.0 * x[2 * t + 1];
    CHECK(std::abs(shifted.y[t] - base.y[t] - lin) < 1e-12);
  }
  CHECK(shifted.xdim == 2);
  CHECK(shifted.x == x);
}

TEST_CASE("lag plot pairs") {
  model::Series flat;
  flat.y = {2.0, 2.0, 2.0, 2.0};
  const auto pairs = model::lag_plot_data(flat, {});
  REQUIRE(pairs.size() == 3);
  for (const auto& [prev, cur] : pairs) {
    CHECK(prev == 2.0);
    CHECK(cur == 2.0);
  }

  model::Series tiny;
  tiny.y = {1.5, -0.5};
  const auto one = model::lag_plot_data(tiny, {});
  REQUIRE(one.size() == 1);
  CHECK(one[0].first == 1.5);
  CHECK(one[0].second == -0.5);
}

TEST_CASE("simulation determinism and burn-in bookkeeping") {
  model::Spec spec;
  spec.variant = model::Variant::Error;
  spec.tgh.shape = {0.2, 0.05};
  spec.arc.phi = {0.5};
  Pcg64 a(81), b(81);
  const model::Series s1 = model::simulate(spec, 100, {}, a);
  const model::Series s2 = model::simulate(spec, 100, {}, b);
  CHECK(s1.y == s2.y);

  CHECK(model::error_model_burn_in(1) == 500);
  CHECK(model::error_model_burn_in(20) == 1000);
}

TEST_SUITE_END();
