#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tghar::kernels {

/// Table of the array primitives behind the likelihood and simulation hot
/// loops. One scalar reference implementation always exists; wider variants
/// are selected at runtime and must agree with the reference up to rounding
/// (see tests/kernels_test.cpp).
struct Kernels {
  const char* name;

  /// out[i] = tau_{g,h}(z[i]).
  void (*tau)(const double* z, std::size_t n, double g, double h,
              double* out);

  /// Sum over i of log tau'_{g,h}(z[i]) given the unit-slope bracket
  /// log tau'(z) = h z^2 / 2 + log B(z); returns the full sum.
  double (*sum_log_jacobian)(const double* z, std::size_t n, double g,
                             double h);

  /// Sum of squares.
  double (*sum_sq)(const double* z, std::size_t n);

  /// Dot product.
  double (*dot)(const double* a, const double* b, std::size_t n);

  /// out[t] = (y[t] - xi - sum_j x[t*d+j] beta[j]) / omega, t = 0..n-1.
  /// x may be null when d == 0.
  void (*standardize)(const double* y, const double* x, std::size_t n,
                      std::size_t d, const double* beta, double xi,
                      double omega, double* out);

  /// out[t-p] = (z[t] - sum_{j=1..p} phi[j-1] z[t-j]) / omega for
  /// t = p..n-1 (n-p values).
  void (*ar_residuals)(const double* z, std::size_t n, const double* phi,
                       std::size_t p, double omega, double* out);
};

/// Portable reference implementation.
const Kernels& scalar();

/// Best implementation for this process: AVX2 when the CPU supports it,
/// otherwise scalar. The TGHAR_KERNEL environment variable ("scalar" or
/// "avx2") overrides the automatic choice; an unavailable request falls
/// back to scalar.
const Kernels& active();

/// Every implementation compiled into this binary and usable on this CPU.
std::vector<const Kernels*> available();

}  // namespace tghar::kernels
