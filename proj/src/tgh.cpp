#include "tghar/tgh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tghar/kernels.hpp"
#include "tghar/num.hpp"

namespace tghar::tgh {

double tau(const Shape& s, double z) {
  if (!std::isfinite(z)) throw std::domain_error("tau: non-finite argument");
  const double gauss = std::exp(0.5 * s.h * z * z);
  if (s.g_is_zero()) return z * gauss;
  return std::expm1(s.g * z) / s.g * gauss;
}

double tau_deriv(const Shape& s, double z) {
  return std::exp(log_tau_deriv(s, z));
}

double log_tau_deriv(const Shape& s, double z) {
  const double half_hzz = 0.5 * s.h * z * z;
  if (s.g_is_zero()) {
    return half_hzz + std::log1p(s.h * z * z);
  }
  if (s.h == 0.0) return s.g * z;
  const double gz = s.g * z;
  if (gz > 500.0) {
    // Factor out exp(gz) so the bracket stays representable.
    return half_hzz + gz +
           std::log1p(s.h / s.g * z * -std::expm1(-gz));
  }
  const double b = std::exp(gz) + s.h / s.g * std::expm1(gz) * z;
  return half_hzz + std::log(b);
}

double support_lower(const Shape& s) {
  if (s.h == 0.0 && !s.g_is_zero() && s.g > 0.0) return -1.0 / s.g;
  return -std::numeric_limits<double>::infinity();
}

double support_upper(const Shape& s) {
  if (s.h == 0.0 && !s.g_is_zero() && s.g < 0.0) return -1.0 / s.g;
  return std::numeric_limits<double>::infinity();
}

bool in_support(const Shape& s, double t) {
  return t > support_lower(s) && t < support_upper(s);
}

namespace {

double newton_inverse(const Shape& s, double t, double guess) {
  // Establish a bracket around the root of tau(z) = t; tau(0) = 0.
  double lo, hi;
  if (t >= 0.0) {
    lo = 0.0;
    hi = 1.0;
    while (tau(s, hi) < t) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) throw std::runtime_error("tau inverse: bracket overflow");
    }
  } else {
    hi = 0.0;
    lo = -1.0;
    while (tau(s, lo) > t) {
      hi = lo;
      lo *= 2.0;
      if (lo < -1e6) throw std::runtime_error("tau inverse: bracket overflow");
    }
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  double z = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double f = tau(s, z) - t;
    if (std::abs(f) <= tol) return z;
    if (f > 0.0) {
      hi = z;
    } else {
      lo = z;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(z))) return z;
    const double step = f / tau_deriv(s, z);
    double next = z - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    z = next;
  }
  char msg[128];
  std::snprintf(msg, sizeof msg,
                "tau inverse: no convergence, bracket [%.17g, %.17g]", lo, hi);
  throw std::runtime_error(msg);
}

}  // namespace

double tau_inverse_exact(const Shape& s, double t) {
  if (!std::isfinite(t)) {
    throw std::domain_error("tau inverse: non-finite argument");
  }
  if (!in_support(s, t)) {
    throw std::domain_error("tau inverse: argument outside support");
  }
  const bool g0 = s.g_is_zero();
  if (s.h == 0.0) {
    if (g0) return t;
    return std::log1p(s.g * t) / s.g;
  }
  if (g0) {
    if (t == 0.0) return 0.0;
    const double w = num::lambert_w0(s.h * t * t);
    return std::copysign(std::sqrt(w / s.h), t);
  }
  // Seed from the h = 0 closed form when it applies.
  double guess;
  if (1.0 + s.g * t > 0.0) {
    guess = std::log1p(s.g * t) / s.g;
  } else {
    guess = std::copysign(1.0, t);
  }
  return newton_inverse(s, t, guess);
}

InverseTable::InverseTable(const Shape& s, double z_lo, double z_hi,
                           double max_abs_err)
    : shape_(s), tol_(max_abs_err) {
  if (!(z_lo < z_hi) || !std::isfinite(z_lo) || !std::isfinite(z_hi)) {
    throw std::domain_error("inverse table: empty or non-finite range");
  }
  if (!(max_abs_err > 0.0)) {
    throw std::domain_error("inverse table: tolerance must be positive");
  }
  if (s.g_is_zero() && s.h == 0.0) {
    z_ = {z_lo, z_hi};
    t_ = {z_lo, z_hi};
    return;
  }
  const auto& k = kernels::active();
  constexpr std::size_t kMaxKnots = std::size_t{1} << 22;
  constexpr double kMinWidth = 1e-9;

  // Phase 1: coarse adaptive bisection at a relaxed tolerance maps out
  // where the curvature sits without paying per-knot bookkeeping.
  struct Seg {
    double zl, tl, zr, tr;
  };
  // Estimation rebuilds a table on every objective evaluation; reusing the
  // scratch keeps the allocator out of that loop.
  thread_local std::vector<Seg> done, level, next;
  thread_local std::vector<double> zs, ts, zm, tm, nz, nt;
  constexpr std::size_t kInit = 33;
  zs.resize(kInit);
  ts.resize(kInit);
  for (std::size_t i = 0; i < kInit; ++i) {
    zs[i] = z_lo + (z_hi - z_lo) * static_cast<double>(i) /
                       static_cast<double>(kInit - 1);
  }
  k.tau(zs.data(), kInit, s.g, s.h, ts.data());

  const double coarse = 256.0 * max_abs_err;
  done.clear();
  level.clear();
  next.clear();
  level.reserve(kInit - 1);
  for (std::size_t i = 0; i + 1 < kInit; ++i) {
    level.push_back({zs[i], ts[i], zs[i + 1], ts[i + 1]});
  }
  while (!level.empty()) {
    zm.resize(level.size());
    tm.resize(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
      zm[i] = 0.5 * (level[i].zl + level[i].zr);
    }
    k.tau(zm.data(), zm.size(), s.g, s.h, tm.data());
    next.clear();
    for (std::size_t i = 0; i < level.size(); ++i) {
      const Seg& sg = level[i];
      const double width = sg.tr - sg.tl;
      const double z_hat = sg.zl + (sg.zr - sg.zl) * (tm[i] - sg.tl) / width;
      if (std::abs(z_hat - zm[i]) > coarse && sg.zr - sg.zl > kMinWidth &&
          width > 0.0) {
        next.push_back({sg.zl, sg.tl, zm[i], tm[i]});
        next.push_back({zm[i], tm[i], sg.zr, sg.tr});
      } else {
        done.push_back(sg);
      }
    }
    if (done.size() + next.size() > kMaxKnots) {
      throw std::runtime_error("inverse table: knot budget exceeded");
    }
    level.swap(next);
  }
  std::sort(done.begin(), done.end(),
            [](const Seg& a, const Seg& b) { return a.zl < b.zl; });

  // Phase 2: measure each coarse segment's midpoint error and subdivide
  // uniformly; linear-interpolation error scales with the square of the
  // segment width.
  zm.resize(done.size());
  tm.resize(done.size());
  for (std::size_t i = 0; i < done.size(); ++i) {
    zm[i] = 0.5 * (done[i].zl + done[i].zr);
  }
  k.tau(zm.data(), zm.size(), s.g, s.h, tm.data());
  const double target = 0.8 * max_abs_err;
  thread_local std::vector<std::size_t> parts;
  parts.resize(done.size());
  std::size_t total = 1;
  for (std::size_t i = 0; i < done.size(); ++i) {
    const Seg& sg = done[i];
    const double z_hat = sg.zl + (sg.zr - sg.zl) * (tm[i] - sg.tl) /
                                     (sg.tr - sg.tl);
    const double err = std::abs(z_hat - zm[i]);
    std::size_t n = err <= target
                        ? 1
                        : static_cast<std::size_t>(
                              std::ceil(std::sqrt(err / target)));
    n = std::min<std::size_t>(std::max<std::size_t>(n, 1), 4096);
    parts[i] = n;
    total += n;
  }
  if (total > kMaxKnots) {
    throw std::runtime_error("inverse table: knot budget exceeded");
  }

  // Phase 3: emit the fine grid in order and evaluate it in one batch.
  nz.clear();
  nz.reserve(total);
  for (std::size_t i = 0; i < done.size(); ++i) {
    const Seg& sg = done[i];
    for (std::size_t j = 0; j < parts[i]; ++j) {
      nz.push_back(sg.zl + (sg.zr - sg.zl) * static_cast<double>(j) /
                               static_cast<double>(parts[i]));
    }
  }
  nz.push_back(z_hi);
  nt.resize(nz.size());
  k.tau(nz.data(), nz.size(), s.g, s.h, nt.data());
  z_ = nz;
  t_ = nt;

  // Phase 4: verify every midpoint, bisecting the rare stragglers.
  for (;;) {
    const std::size_t m = z_.size() - 1;
    zm.resize(m);
    tm.resize(m);
    for (std::size_t i = 0; i < m; ++i) zm[i] = 0.5 * (z_[i] + z_[i + 1]);
    k.tau(zm.data(), m, s.g, s.h, tm.data());
    std::size_t violations = 0;
    nz.clear();
    nt.clear();
    nz.reserve(z_.size() + 64);
    nt.reserve(z_.size() + 64);
    for (std::size_t i = 0; i < m; ++i) {
      nz.push_back(z_[i]);
      nt.push_back(t_[i]);
      const double width = t_[i + 1] - t_[i];
      const double z_hat =
          z_[i] + (z_[i + 1] - z_[i]) * (tm[i] - t_[i]) / width;
      if (std::abs(z_hat - zm[i]) > max_abs_err &&
          z_[i + 1] - z_[i] > kMinWidth && width > 0.0) {
        nz.push_back(zm[i]);
        nt.push_back(tm[i]);
        ++violations;
      }
    }
    nz.push_back(z_.back());
    nt.push_back(t_.back());
    if (violations == 0) break;
    if (nz.size() > kMaxKnots) {
      throw std::runtime_error("inverse table: knot budget exceeded");
    }
    z_.swap(nz);
    t_.swap(nt);
  }

  for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
    if (!(t_[i] < t_[i + 1])) {
      throw std::runtime_error("inverse table: non-monotone knots");
    }
  }
}

double InverseTable::operator()(double t) const {
  if (t > t_.front() && t < t_.back()) {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return z_[i] + w * (z_[i + 1] - z_[i]);
  }
  // Outside the covered range: one exact solve. Closed-form cases (and the
  // support check) live in tau_inverse_exact; the general case reuses the
  // nearest knot as the Newton seed.
  if (shape_.h == 0.0 || shape_.g_is_zero()) {
    return tau_inverse_exact(shape_, t);
  }
  return newton_inverse(shape_, t, t <= t_.front() ? z_.front() : z_.back());
}

double moment(const Shape& s, int q) {
  if (q < 1) throw std::domain_error("moment: q must be >= 1");
  if (!(s.h * q < 1.0)) {
    throw std::domain_error("moment: undefined, requires h < 1/q");
  }
  const long double a = 1.0L - static_cast<long double>(q) * s.h;
  if (s.g_is_zero()) {
    if (q % 2 == 1) return 0.0;
    long double dfact = 1.0L;
    for (int i = q - 1; i >= 2; i -= 2) dfact *= i;
    return static_cast<double>(
        dfact * std::pow(a, -(static_cast<long double>(q) + 1.0L) / 2.0L));
  }
  const long double g = s.g;
  long double acc = 0.0L;
  long double binom = 1.0L;
  long double sign = 1.0L;
  for (int i = 0; i <= q; ++i) {
    const long double m = (q - i) * g;
    acc += sign * binom * std::expm1(m * m / (2.0L * a));
    binom = binom * (q - i) / (i + 1);
    sign = -sign;
  }
  return static_cast<double>(acc / (std::pow(g, q) * std::sqrt(a)));
}

Summary summary(const Shape& s) {
  if (!(s.h < 0.25)) {
    throw std::domain_error("summary: needs h < 1/4 for four moments");
  }
  const double m1 = moment(s, 1);
  const double m2 = moment(s, 2);
  const double m3 = moment(s, 3);
  const double m4 = moment(s, 4);
  const double var = m2 - m1 * m1;
  const double sd = std::sqrt(var);
  const double mu3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
  const double mu4 =
      m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
  return {m1, sd, mu3 / (var * sd), mu4 / (var * var) - 3.0};
}

double pdf(const Params& p, double y) {
  const double t = (y - p.xi) / p.omega;
  if (!in_support(p.shape, t)) return 0.0;
  const double z = tau_inverse_exact(p.shape, t);
  return num::norm_pdf(z) / (p.omega * tau_deriv(p.shape, z));
}

double cdf(const Params& p, double y) {
  const double t = (y - p.xi) / p.omega;
  if (t <= support_lower(p.shape)) return 0.0;
  if (t >= support_upper(p.shape)) return 1.0;
  return num::norm_cdf(tau_inverse_exact(p.shape, t));
}

double quantile(const Params& p, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("quantile: u must lie in (0,1)");
  }
  return p.xi + p.omega * tau(p.shape, num::norm_quantile(u));
}

double crps_latent(const Shape& s, double xi, double omega, double mu,
                   double sigma, double y) {
  if (!(s.h * sigma * sigma < 0.5)) {
    throw std::domain_error("crps: undefined, requires h*sigma^2 < 1/2");
  }
  const auto quantile_at = [&](double u) {
    return xi + omega * tau(s, mu + sigma * num::norm_quantile(u));
  };
  const auto cdf_at = [&](double x) {
    const double t = (x - xi) / omega;
    if (t <= support_lower(s)) return 0.0;
    if (t >= support_upper(s)) return 1.0;
    return num::norm_cdf((tau_inverse_exact(s, t) - mu) / sigma);
  };
  constexpr double kTail = 1e-8;
  const double lo = std::min(quantile_at(kTail), y);
  const double hi = std::max(quantile_at(1.0 - kTail), y);
  const double left = num::integrate(
      [&](double x) {
        const double f = cdf_at(x);
        return f * f;
      },
      lo, y, 1e-8, 1e-12);
  const double right = num::integrate(
      [&](double x) {
        const double f = 1.0 - cdf_at(x);
        return f * f;
      },
      y, hi, 1e-8, 1e-12);
  return left + right;
}

}  // namespace tghar::tgh
