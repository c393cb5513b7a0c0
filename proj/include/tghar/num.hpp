#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tghar::num {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLog2Pi = 1.83787706640934548356;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
double norm_pdf(double z);

/// Standard normal cdf, accurate in both tails (erfc based).
double norm_cdf(double z);

/// Standard normal quantile for p in (0,1). Rational approximation
/// polished by one Halley step; relative error near machine precision.
/// Throws std::domain_error outside (0,1).
double norm_quantile(double p);

/// Principal branch of the Lambert W function for x >= 0.
double lambert_w0(double x);

/// Adaptive Simpson quadrature of f on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-8, double abs_tol = 1e-12,
                 int max_depth = 48);

/// CRPS of a N(mu, sigma^2) forecast at observation y (closed form).
double gaussian_crps(double mu, double sigma, double y);

/// Kolmogorov-Smirnov distance between a sample and Uniform(0,1).
/// The input need not be sorted; values are clamped to [0,1].
double ks_uniform_statistic(std::span<const double> u);

/// Asymptotic KS critical value: reject uniformity at level alpha when
/// the statistic exceeds this.
double ks_critical_value(std::size_t n, double alpha);

/// Quantile of a sample by linear interpolation (type-7). Sorts a copy.
double sample_quantile(std::span<const double> x, double p);

double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);

/// Solves the symmetric positive definite system A x = b in place via
/// Cholesky; A is row-major n x n. Throws std::runtime_error if A is not
/// positive definite.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b,
                              std::size_t n);

}  // namespace tghar::num
