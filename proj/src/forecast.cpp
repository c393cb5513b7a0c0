#include "tghar/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tghar/num.hpp"

namespace tghar::forecast {

namespace {

double regression_mean(const model::Spec& spec, const double* xrow) {
  double m = spec.tgh.xi;
  for (std::size_t j = 0; j < spec.beta.size(); ++j) {
    m += xrow[j] * spec.beta[j];
  }
  return m;
}

double interval_width(const Distribution& d, double alpha, double gamma) {
  return quantile(d, 1.0 - alpha + gamma) - quantile(d, gamma);
}

}  // namespace

Distribution predictive(const model::Spec& spec, const model::Series& history,
                        std::span<const double> x_next) {
  const std::size_t p = spec.arc.order();
  const std::size_t n = history.size();
  if (n < p) {
    throw std::invalid_argument("predictive: history shorter than the order");
  }
  if (x_next.size() != spec.beta.size() || history.xdim != spec.beta.size()) {
    throw std::invalid_argument("predictive: covariate width mismatch");
  }

  Distribution out;
  out.kind = spec.variant;
  out.omega = spec.tgh.omega;
  out.shape = spec.tgh.shape;
  out.det = spec.tgh.xi;
  for (std::size_t j = 0; j < spec.beta.size(); ++j) {
    out.det += x_next[j] * spec.beta[j];
  }

  if (spec.variant == model::Variant::Latent) {
    std::vector<double> z(p);
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t t = n - p + j;
      const double u =
          (history.y[t] - regression_mean(spec, history.xrow(t))) / out.omega;
      if (!tgh::in_support(out.shape, u)) {
        throw std::domain_error(
            "predictive: observation at index " + std::to_string(t) +
            " is outside the transform support");
      }
      z[j] = tgh::tau_inverse_exact(out.shape, u);
    }
    const ar::ConditionalMoments cm = ar::conditional_moments(spec.arc, z);
    out.mu = cm.mu;
    out.sigma = std::sqrt(cm.sigma2);
  } else {
    for (std::size_t j = 1; j <= p; ++j) {
      const std::size_t t = n - j;
      out.det += spec.arc.phi[j - 1] *
                 (history.y[t] - regression_mean(spec, history.xrow(t)));
    }
  }
  return out;
}

double point_median(const Distribution& d) {
  return d.det + d.omega * tgh::tau(d.shape, d.mu);
}

double point_mean(const Distribution& d) {
  const double g = d.shape.g;
  const double h = d.shape.h;
  const double s2 = d.sigma * d.sigma;
  const double c = 1.0 - h * s2;
  if (!(c > 0.0)) {
    throw std::domain_error("point_mean: undefined, h * sigma^2 >= 1");
  }
  double et;
  if (d.shape.g_is_zero()) {
    et = d.mu * std::pow(c, -1.5) * std::exp(h * d.mu * d.mu / (2.0 * c));
  } else {
    et = std::exp(h * d.mu * d.mu / (2.0 * c)) *
         std::expm1((g * g * s2 + 2.0 * g * d.mu) / (2.0 * c)) /
         (g * std::sqrt(c));
  }
  return d.det + d.omega * et;
}

double quantile(const Distribution& d, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("quantile: probability must lie in (0, 1)");
  }
  return d.det +
         d.omega * tgh::tau(d.shape, d.mu + d.sigma * num::norm_quantile(u));
}

double cdf(const Distribution& d, double y) {
  const double u = (y - d.det) / d.omega;
  if (u <= tgh::support_lower(d.shape)) return 0.0;
  if (u >= tgh::support_upper(d.shape)) return 1.0;
  const double z = tgh::tau_inverse_exact(d.shape, u);
  return num::norm_cdf((z - d.mu) / d.sigma);
}

Interval interval(const Distribution& d, double level, IntervalKind kind) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("interval: level must lie in (0, 1)");
  }
  const double alpha = 1.0 - level;

  Interval out;
  out.level = level;
  out.kind = kind;
  if (kind == IntervalKind::SymmetricWeight) {
    out.gamma = alpha / 2.0;
  } else {
    // Width is unimodal in the tail split, so golden-section suffices.
    constexpr double kInvPhi = 0.6180339887498949;
    constexpr double kInvPhi2 = 1.0 - kInvPhi;
    double a = 0.0;
    double b = alpha;
    double c = a + kInvPhi2 * (b - a);
    double e = a + kInvPhi * (b - a);
    double fc = interval_width(d, alpha, c);
    double fe = interval_width(d, alpha, e);
    while (b - a > 1e-10) {
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = a + kInvPhi2 * (b - a);
        fc = interval_width(d, alpha, c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + kInvPhi * (b - a);
        fe = interval_width(d, alpha, e);
      }
    }
    out.gamma = 0.5 * (a + b);
  }
  out.lower = quantile(d, out.gamma);
  out.upper = quantile(d, 1.0 - alpha + out.gamma);
  return out;
}

double pit(const Distribution& d, double y) {
  return std::clamp(cdf(d, y), 0.0, 1.0);
}

double crps(const Distribution& d, double y) {
  if (!(d.shape.h * d.sigma * d.sigma < 0.5)) {
    throw std::domain_error("crps: undefined, h * sigma^2 >= 1/2");
  }
  return tgh::crps_latent(d.shape, d.det, d.omega, d.mu, d.sigma, y);
}

RollingResult rolling_forecast(const model::Series& data, std::size_t p,
                               const fit::Config& cfg, std::size_t w,
                               const RollingOptions& opts) {
  const std::size_t n = data.size();
  if (w == 0 || w >= n) {
    throw std::invalid_argument(
        "rolling_forecast: window must be shorter than the series");
  }
  const std::size_t cadence = std::max<std::size_t>(opts.refit_every, 1);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  RollingResult out;
  bool have_fit = false;
  fit::Result cur;

  long double abs_err = 0.0L, sq_err = 0.0L, crps_sum = 0.0L;
  long double wid_sym = 0.0L, wid_min = 0.0L;
  std::size_t n_mean = 0, n_crps = 0, hit_sym = 0, hit_min = 0;

  for (std::size_t t = w; t < n; ++t) {
    if (!have_fit || (t - w) % cadence == 0) {
      try {
        cur = fit::fit(data.slice(t - w, t), p, cfg);
        have_fit = true;
      } catch (const std::exception&) {
        have_fit = false;
      }
    }
    StepRecord rec;
    rec.t = t;
    rec.realized = data.y[t];
    rec.mean = nan;
    rec.crps = nan;
    if (have_fit) {
      try {
        const model::Series hist = data.slice(t - w, t);
        Distribution dist = predictive(cur.spec, hist, {data.xrow(t),
                                                        data.xdim});
        if (opts.inflate_variance) {
          dist.sigma *= std::sqrt(1.0 + static_cast<double>(p) /
                                            static_cast<double>(w));
        }
        rec.median = point_median(dist);
        rec.symmetric = interval(dist, opts.level,
                                 IntervalKind::SymmetricWeight);
        rec.min_length = interval(dist, opts.level,
                                  IntervalKind::MinimumLength);
        rec.pit = pit(dist, rec.realized);
        try {
          rec.mean = point_mean(dist);
        } catch (const std::domain_error&) {
        }
        try {
          rec.crps = crps(dist, rec.realized);
        } catch (const std::domain_error&) {
        }
        rec.scored = true;
      } catch (const std::exception&) {
        rec.scored = false;
      }
    }
    if (rec.scored) {
      ++out.n_scored;
      abs_err += std::abs(rec.median - rec.realized);
      if (std::isfinite(rec.mean)) {
        sq_err += (rec.mean - rec.realized) * (rec.mean - rec.realized);
        ++n_mean;
      }
      if (std::isfinite(rec.crps)) {
        crps_sum += rec.crps;
        ++n_crps;
      }
      wid_sym += rec.symmetric.upper - rec.symmetric.lower;
      wid_min += rec.min_length.upper - rec.min_length.lower;
      if (rec.realized >= rec.symmetric.lower &&
          rec.realized <= rec.symmetric.upper) {
        ++hit_sym;
      }
      if (rec.realized >= rec.min_length.lower &&
          rec.realized <= rec.min_length.upper) {
        ++hit_min;
      }
    } else {
      ++out.n_failed;
    }
    out.steps.push_back(rec);
  }

  if (out.n_scored > 0) {
    const double m = static_cast<double>(out.n_scored);
    out.mae = static_cast<double>(abs_err) / m;
    out.coverage_symmetric = static_cast<double>(hit_sym) / m;
    out.coverage_min_length = static_cast<double>(hit_min) / m;
    out.width_symmetric = static_cast<double>(wid_sym) / m;
    out.width_min_length = static_cast<double>(wid_min) / m;
  }
  if (n_mean > 0) {
    out.rmse = std::sqrt(static_cast<double>(sq_err) /
                         static_cast<double>(n_mean));
  }
  if (n_crps > 0) {
    out.mean_crps = static_cast<double>(crps_sum) /
                    static_cast<double>(n_crps);
  }
  return out;
}

}  // namespace tghar::forecast
