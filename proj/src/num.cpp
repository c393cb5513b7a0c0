#include "tghar/num.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tghar::num {

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

namespace {

// Acklam's rational approximation to the normal quantile.
double norm_quantile_approx(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_quantile: p must lie in (0,1)");
  }
  double z = norm_quantile_approx(p);
  // One Halley step against the exact cdf.
  const double e = norm_cdf(z) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * z * z);
  z -= u / (1.0 + 0.5 * z * u);
  return z;
}

double lambert_w0(double x) {
  if (x < 0.0) {
    throw std::domain_error("lambert_w0: negative argument");
  }
  if (x == 0.0) return 0.0;
  // Initial guess: series near 0, asymptotic log form for large x.
  double w;
  if (x < 1.0) {
    w = x * (1.0 - x + 1.5 * x * x);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(std::max(l1, 1e-300));
    w = (l1 > 2.0) ? l1 - l2 + l2 / l1 : 0.5 * l1 + 0.5;
    if (w < 0.0) w = l1 > 0.0 ? l1 : 0.5;
  }
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    // Halley update.
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double gaussian_crps(double mu, double sigma, double y) {
  const double z = (y - mu) / sigma;
  return sigma *
         (z * (2.0 * norm_cdf(z) - 1.0) + 2.0 * norm_pdf(z) - 1.0 / std::sqrt(kPi));
}

double ks_uniform_statistic(std::span<const double> u) {
  std::vector<double> s(u.begin(), u.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = std::clamp(s[i], 0.0, 1.0);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - v);
    d = std::max(d, v - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) /
         std::sqrt(static_cast<double>(n));
}

double sample_quantile(std::span<const double> x, double p) {
  if (x.empty()) throw std::invalid_argument("sample_quantile: empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  if (p <= 0.0) return s.front();
  if (p >= 1.0) return s.back();
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= s.size()) return s.back();
  return s[lo] + frac * (s[lo + 1] - s[lo]);
}

double sample_mean(std::span<const double> x) {
  long double acc = 0.0L;
  for (double v : x) acc += v;
  return static_cast<double>(acc / static_cast<long double>(x.size()));
}

double sample_variance(std::span<const double> x) {
  const double m = sample_mean(x);
  long double acc = 0.0L;
  for (double v : x) {
    const long double d = v - m;
    acc += d * d;
  }
  return static_cast<double>(acc / static_cast<long double>(x.size() - 1));
}

std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b,
                              std::size_t n) {
  // In-place Cholesky a = L L^T (lower triangle).
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0) throw std::runtime_error("solve_spd: not positive definite");
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / l;
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
    b[ii] = s / a[ii * n + ii];
  }
  return b;
}

}  // namespace tghar::num
