#include "tghar/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tghar/kernels.hpp"
#include "tghar/num.hpp"

namespace tghar::model {

const char* variant_name(Variant v) {
  return v == Variant::Latent ? "t" : "e";
}

Variant variant_from_name(const std::string& s) {
  if (s == "t") return Variant::Latent;
  if (s == "e") return Variant::Error;
  throw std::domain_error("unknown model variant '" + s + "' (use t or e)");
}

namespace {

void add_deterministic(const Spec& spec, std::span<const double> x,
                       std::vector<double>* y) {
  const std::size_t d = spec.beta.size();
  for (std::size_t t = 0; t < y->size(); ++t) {
    double m = spec.tgh.xi;
    for (std::size_t j = 0; j < d; ++j) m += x[t * d + j] * spec.beta[j];
    (*y)[t] += m;
  }
}

}  // namespace

Series simulate(const Spec& spec, std::size_t n, std::span<const double> x,
                Pcg64& rng) {
  if (n == 0) throw std::domain_error("simulate: n must be positive");
  const std::size_t d = spec.beta.size();
  if (x.size() != n * d) {
    throw std::domain_error("simulate: covariate matrix size mismatch");
  }
  if (!spec.valid()) throw std::domain_error("simulate: invalid model spec");

  const auto& k = kernels::active();
  const tgh::Shape& sh = spec.tgh.shape;
  std::vector<double> y(n);

  if (spec.variant == Variant::Latent) {
    const std::vector<double> z = ar::simulate_unit(spec.arc, n, rng);
    k.tau(z.data(), n, sh.g, sh.h, y.data());
    for (double& v : y) v *= spec.tgh.omega;
  } else {
    const std::size_t p = spec.arc.order();
    const std::size_t total = n + error_model_burn_in(p);
    std::vector<double> eps(total);
    for (double& e : eps) e = rng.next_normal();
    std::vector<double> shock(total);
    k.tau(eps.data(), total, sh.g, sh.h, shock.data());
    std::vector<double> acc(total);
    for (std::size_t t = 0; t < total; ++t) {
      double v = spec.tgh.omega * shock[t];
      for (std::size_t j = 1; j <= p && j <= t; ++j) {
        v += spec.arc.phi[j - 1] * acc[t - j];
      }
      acc[t] = v;
    }
    std::copy(acc.end() - static_cast<std::ptrdiff_t>(n), acc.end(),
              y.begin());
  }
  add_deterministic(spec, x, &y);

  Series out;
  out.y = std::move(y);
  out.x.assign(x.begin(), x.end());
  out.xdim = d;
  return out;
}

namespace {

// Inverts the standardized residuals in u (in place, into z) with either
// closed forms, a piecewise-linear table, or exact solves. Returns false
// when some u lies outside the transform support.
bool invert_residuals(const tgh::Shape& sh, const std::vector<double>& u,
                      std::vector<double>* z, const LikOptions& opt) {
  const std::size_t n = u.size();
  z->resize(n);
  const bool g0 = sh.g_is_zero();
  if (sh.h == 0.0 && g0) {
    *z = u;
    return true;
  }
  if (sh.h == 0.0) {
    // Support one-sided at -1/g; the inverse is log1p(g u)/g.
    for (std::size_t t = 0; t < n; ++t) {
      const double a = sh.g * u[t];
      if (!(a > -1.0)) return false;
      (*z)[t] = std::log1p(a) / sh.g;
    }
    return true;
  }
  const auto [lo_it, hi_it] = std::minmax_element(u.begin(), u.end());
  if (!opt.use_table) {
    for (std::size_t t = 0; t < n; ++t) {
      (*z)[t] = tgh::tau_inverse_exact(sh, u[t]);
    }
    return true;
  }
  const double z_lo = tgh::tau_inverse_exact(sh, *lo_it) - opt.range_pad;
  const double z_hi = tgh::tau_inverse_exact(sh, *hi_it) + opt.range_pad;
  const tgh::InverseTable table(sh, z_lo, z_hi, opt.table_tol);
  for (std::size_t t = 0; t < n; ++t) (*z)[t] = table(u[t]);
  return true;
}

}  // namespace

LogLik loglik_latent(const Spec& spec, const Series& data,
                     const LikOptions& opt) {
  const std::size_t n = data.size();
  const std::size_t p = spec.arc.order();
  if (n <= p) throw std::domain_error("loglik: series shorter than AR order");
  const auto& k = kernels::active();
  const tgh::Shape& sh = spec.tgh.shape;

  // Optimizers call this in a tight loop; scratch lives per thread.
  thread_local std::vector<double> u, z, resid;
  u.resize(n);
  k.standardize(data.y.data(), data.x.data(), n, data.xdim,
                spec.beta.data(), spec.tgh.xi, spec.tgh.omega, u.data());

  if (!invert_residuals(sh, u, &z, opt)) return {};

  const double jac = k.sum_log_jacobian(z.data(), n, sh.g, sh.h);

  const ar::Ladder ladder = ar::levinson_ladder(spec.arc);
  double gauss = 0.0;
  const std::size_t head = std::min(p, n);
  for (std::size_t t = 0; t < head; ++t) {
    double mu = 0.0;
    for (std::size_t j = 1; j <= t; ++j) {
      mu += ladder.phis[t][j - 1] * z[t - j];
    }
    const double e = z[t] - mu;
    gauss += -0.5 * (num::kLog2Pi + std::log(ladder.v[t])) -
             0.5 * e * e / ladder.v[t];
  }
  if (n > p) {
    resid.resize(n - p);
    k.ar_residuals(z.data(), n, spec.arc.phi.data(), p, 1.0, resid.data());
    const double ss = k.sum_sq(resid.data(), resid.size());
    const double v = ladder.v[p];
    gauss += -0.5 * static_cast<double>(n - p) * (num::kLog2Pi + std::log(v)) -
             0.5 * ss / v;
  }

  const double value =
      gauss - static_cast<double>(n) * std::log(spec.tgh.omega) - jac;
  return {value, true};
}

LogLik loglik_error(const Spec& spec, const Series& data, std::size_t k_cond,
                    const LikOptions& opt) {
  const std::size_t n = data.size();
  const std::size_t p = spec.arc.order();
  if (k_cond < p) throw std::domain_error("loglik: k must be at least p");
  if (n <= k_cond) throw std::domain_error("loglik: no observations beyond k");
  const auto& k = kernels::active();
  const tgh::Shape& sh = spec.tgh.shape;

  thread_local std::vector<double> detr, u, eps;
  detr.resize(n);
  k.standardize(data.y.data(), data.x.data(), n, data.xdim,
                spec.beta.data(), spec.tgh.xi, 1.0, detr.data());

  const std::size_t m = n - k_cond;
  u.resize(m);
  k.ar_residuals(detr.data() + (k_cond - p), n - (k_cond - p),
                 spec.arc.phi.data(), p, spec.tgh.omega, u.data());

  if (!invert_residuals(sh, u, &eps, opt)) return {};

  const double jac = k.sum_log_jacobian(eps.data(), m, sh.g, sh.h);
  const double ss = k.sum_sq(eps.data(), m);
  const double md = static_cast<double>(m);
  const double value = -0.5 * ss - 0.5 * md * num::kLog2Pi -
                       md * std::log(spec.tgh.omega) - jac;
  return {value, true};
}

double loglik_gaussian_ar(const Spec& spec, const Series& data) {
  Spec g = spec;
  g.variant = Variant::Latent;
  g.tgh.shape = {0.0, 0.0};
  const LogLik ll = loglik_latent(g, data, {});
  return ll.value;
}

double latent_autocovariance(const tgh::Shape& s, double rho_z) {
  if (!(s.h < 0.5)) {
    throw std::domain_error("autocovariance: needs h < 1/2");
  }
  if (!(rho_z >= -1.0 && rho_z <= 1.0)) {
    throw std::domain_error("autocovariance: correlation outside [-1,1]");
  }
  const double h = s.h;
  const double r = rho_z;
  const double denom_sq = (1.0 - h) * (1.0 - h) - h * h * r * r;
  const double root = std::sqrt(denom_sq);
  const double a1 = (1.0 + r) / (1.0 - h * (1.0 + r));
  const double a2 = 0.5 * (1.0 - h * (1.0 - r * r)) / denom_sq;
  if (s.g_is_zero()) {
    return (a1 - 2.0 * a2) / root;
  }
  const double g2 = s.g * s.g;
  // 1 - 2 + 1 = 0 lets exp collapse to expm1, avoiding cancellation at
  // small g.
  const double num = std::expm1(a1 * g2) - 2.0 * std::expm1(a2 * g2);
  const double m1 = tgh::moment(s, 1);
  return num / (g2 * root) - m1 * m1;
}

tgh::Summary error_model_descriptors(const Spec& spec) {
  const tgh::Summary base = tgh::summary(spec.tgh.shape);
  const std::vector<double> psi = ar::psi_weights(spec.arc);
  double sum_phi = 0.0;
  for (double f : spec.arc.phi) sum_phi += f;
  long double s2 = 0.0L, s3 = 0.0L, s4 = 0.0L;
  for (double w : psi) {
    const long double lw = w;
    s2 += lw * lw;
    s3 += lw * lw * lw;
    s4 += lw * lw * lw * lw;
  }
  const double omega = spec.tgh.omega;
  const double var = omega * omega * static_cast<double>(s2) * base.sd *
                     base.sd;
  const double skew =
      static_cast<double>(s3 / (s2 * std::sqrt(s2))) * base.skewness;
  const double kurt =
      static_cast<double>(s4 / (s2 * s2)) * base.excess_kurtosis;
  return {omega / (1.0 - sum_phi) * base.mean, std::sqrt(var), skew, kurt};
}

std::vector<std::pair<double, double>> lag_plot_data(
    const Series& data, std::span<const double> beta) {
  const std::size_t n = data.size();
  if (n < 2) throw std::domain_error("lag_plot_data: need at least 2 points");
  if (data.xdim != beta.size()) {
    throw std::domain_error("lag_plot_data: beta length != covariate dim");
  }
  std::vector<double> detr(n);
  for (std::size_t t = 0; t < n; ++t) {
    double m = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) {
      m += data.xrow(t)[j] * beta[j];
    }
    detr[t] = data.y[t] - m;
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(n - 1);
  for (std::size_t t = 1; t < n; ++t) {
    out.emplace_back(detr[t - 1], detr[t]);
  }
  return out;
}

}  // namespace tghar::model
