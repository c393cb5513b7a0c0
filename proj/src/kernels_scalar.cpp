#include <cmath>
#include <cstddef>

#include "tghar/kernels.hpp"

namespace tghar::kernels {
namespace {

void tau_scalar(const double* z, std::size_t n, double g, double h,
                double* out) {
  if (g == 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = z[i] * std::exp(0.5 * h * z[i] * z[i]);
    }
  } else {
    const double inv_g = 1.0 / g;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = inv_g * std::expm1(g * z[i]) * std::exp(0.5 * h * z[i] * z[i]);
    }
  }
}

// log tau'(z) = h z^2/2 + log B(z) with
//   B(z) = exp(gz) + (h/g) expm1(gz) z   (g != 0)
//   B(z) = 1 + h z^2                     (g == 0)
// B is strictly positive whenever h >= 0.
double sum_log_jacobian_scalar(const double* z, std::size_t n, double g,
                               double h) {
  double acc = 0.0;
  if (h == 0.0) {
    // tau'(z) = exp(gz); the sum collapses to g * sum(z).
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += z[i];
    return g * s;
  }
  if (g == 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double zz = z[i] * z[i];
      acc += 0.5 * h * zz + std::log1p(h * zz);
    }
    return acc;
  }
  const double h_over_g = h / g;
  for (std::size_t i = 0; i < n; ++i) {
    const double gz = g * z[i];
    const double b = std::exp(gz) + h_over_g * std::expm1(gz) * z[i];
    acc += 0.5 * h * z[i] * z[i] + std::log(b);
  }
  return acc;
}

double sum_sq_scalar(const double* z, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += z[i] * z[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void standardize_scalar(const double* y, const double* x, std::size_t n,
                        std::size_t d, const double* beta, double xi,
                        double omega, double* out) {
  const double inv_omega = 1.0 / omega;
  if (d == 0) {
    for (std::size_t t = 0; t < n; ++t) out[t] = (y[t] - xi) * inv_omega;
    return;
  }
  for (std::size_t t = 0; t < n; ++t) {
    double m = xi;
    for (std::size_t j = 0; j < d; ++j) m += x[t * d + j] * beta[j];
    out[t] = (y[t] - m) * inv_omega;
  }
}

void ar_residuals_scalar(const double* z, std::size_t n, const double* phi,
                         std::size_t p, double omega, double* out) {
  const double inv_omega = 1.0 / omega;
  for (std::size_t t = p; t < n; ++t) {
    double m = 0.0;
    for (std::size_t j = 1; j <= p; ++j) m += phi[j - 1] * z[t - j];
    out[t - p] = (z[t] - m) * inv_omega;
  }
}

}  // namespace

const Kernels& scalar() {
  static const Kernels k{
      "scalar",          tau_scalar,   sum_log_jacobian_scalar,
      sum_sq_scalar,     dot_scalar,   standardize_scalar,
      ar_residuals_scalar,
  };
  return k;
}

}  // namespace tghar::kernels
