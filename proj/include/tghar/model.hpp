#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tghar/ar.hpp"
#include "tghar/rng.hpp"
#include "tghar/tgh.hpp"

namespace tghar::model {

/// Latent: the transform is applied to a unit-variance Gaussian AR path and
/// the result is shifted/scaled (plus regression). Error: the AR recursion
/// runs on the detrended series and the transform is applied to its iid
/// innovations.
enum class Variant { Latent, Error };

const char* variant_name(Variant v);           // "t" or "e"
Variant variant_from_name(const std::string&);  // throws std::domain_error

struct Spec {
  Variant variant = Variant::Latent;
  tgh::Params tgh;
  ar::Coeffs arc;
  std::vector<double> beta;

  bool valid() const {
    return tgh.valid() && ar::is_stationary(arc);
  }
};

/// Observations plus an optional row-major covariate matrix (n x dim).
struct Series {
  std::vector<double> y;
  std::vector<double> x;
  std::size_t xdim = 0;

  std::size_t size() const { return y.size(); }
  const double* xrow(std::size_t t) const {
    return xdim == 0 ? nullptr : x.data() + t * xdim;
  }

  /// Copy of the half-open index range [first, last).
  Series slice(std::size_t first, std::size_t last) const {
    Series s;
    s.y.assign(y.begin() + first, y.begin() + last);
    s.xdim = xdim;
    if (xdim > 0) {
      s.x.assign(x.begin() + first * xdim, x.begin() + last * xdim);
    }
    return s;
  }
};

/// Burn-in length used when initializing the error-variant recursion.
inline std::size_t error_model_burn_in(std::size_t p) {
  return std::max<std::size_t>(500, 50 * p);
}

/// Draws n points. x is the covariate matrix for the emitted window
/// (row-major n x beta.size(); empty when there is no regression).
Series simulate(const Spec& spec, std::size_t n, std::span<const double> x,
                Pcg64& rng);

struct LogLik {
  double value = -std::numeric_limits<double>::infinity();
  bool supported = false;  // false: a residual left the transform support
};

struct LikOptions {
  bool use_table = true;    // piecewise-linear inverse for the h > 0 case
  double table_tol = 1e-6;  // max |z| error of that inverse
  double range_pad = 1.0;   // z-range widening beyond observed residuals
};

/// Exact-start log-likelihood of the latent variant: Gaussian AR density of
/// the back-transformed series (growing-order conditionals for the first p
/// points) minus n log omega minus the transform Jacobian.
LogLik loglik_latent(const Spec& spec, const Series& data,
                     const LikOptions& opt = {});

/// Conditional log-likelihood of the error variant given the first k >= p
/// observations.
LogLik loglik_error(const Spec& spec, const Series& data, std::size_t k,
                    const LikOptions& opt = {});

/// Reference Gaussian AR log-likelihood with mean xi + x beta and scale
/// omega (exact stationary start). Equals loglik_latent at g = h = 0.
double loglik_gaussian_ar(const Spec& spec, const Series& data);

/// Lag-1 autocovariance of the transformed stochastic part of the latent
/// variant, as a function of the latent autocorrelation. Needs h < 1/2.
double latent_autocovariance(const tgh::Shape& s, double rho_z);

/// Stationary mean/sd/skewness/excess kurtosis of the detrended error
/// variant, from the transform moments and moving-average weights.
tgh::Summary error_model_descriptors(const Spec& spec);

/// Consecutive detrended pairs (y_{t-1} - x_{t-1} beta, y_t - x_t beta)
/// for the linearity diagnostic.
std::vector<std::pair<double, double>> lag_plot_data(
    const Series& data, std::span<const double> beta);

}  // namespace tghar::model
