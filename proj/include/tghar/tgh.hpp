#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace tghar::tgh {

/// Treat |g| below this as g = 0; the g != 0 branch cancels catastrophically
/// near zero.
inline constexpr double kGSwitch = 1e-8;

/// Shape of the transform: g drives skewness, h >= 0 drives tail weight.
struct Shape {
  double g = 0.0;
  double h = 0.0;

  bool valid() const { return h >= 0.0; }
  bool g_is_zero() const { return g > -kGSwitch && g < kGSwitch; }
};

/// Location-scale wrapper: Y = xi + omega * tau(Z), Z standard normal.
struct Params {
  double xi = 0.0;
  double omega = 1.0;
  Shape shape;

  bool valid() const { return omega > 0.0 && shape.valid(); }
};

/// The transform itself. Strictly increasing for h >= 0.
double tau(const Shape& s, double z);

/// First derivative of tau; strictly positive for h >= 0.
double tau_deriv(const Shape& s, double z);

/// log tau'(z), evaluated without overflow for |z| within table ranges.
double log_tau_deriv(const Shape& s, double z);

/// Lower/upper endpoint of the image of tau. Only h = 0, g != 0 is bounded
/// (one-sided at -1/g).
double support_lower(const Shape& s);
double support_upper(const Shape& s);
bool in_support(const Shape& s, double t);

/// Exact inverse of tau. Closed forms when g or h vanishes, otherwise a
/// bracketed Newton iteration converged to |tau(z) - t| <= 1e-12 * max(1,|t|).
/// Throws std::domain_error outside the support and std::runtime_error if
/// the iteration fails to converge (message carries the final bracket).
double tau_inverse_exact(const Shape& s, double t);

/// Piecewise-linear inverse: knots (tau(z_i), z_i) refined until linear
/// interpolation in t stays within max_abs_err of the exact inverse on
/// [z_lo, z_hi]. Queries outside the covered range fall back to one exact
/// Newton solve seeded from the nearest knot.
class InverseTable {
 public:
  InverseTable(const Shape& s, double z_lo, double z_hi, double max_abs_err);

  /// Default coverage used when no data-driven range is supplied.
  static InverseTable standard(const Shape& s) {
    return InverseTable(s, -8.0, 8.0, 1e-8);
  }

  double operator()(double t) const;

  std::size_t knot_count() const { return z_.size(); }
  double tolerance() const { return tol_; }
  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }
  const Shape& shape() const { return shape_; }

 private:
  Shape shape_;
  std::vector<double> t_;
  std::vector<double> z_;
  double tol_;
};

/// Raw moment E[tau(Z)^q] for Z standard normal; defined only for h < 1/q
/// (std::domain_error otherwise). Alternating sums are grouped through
/// expm1 in extended precision to avoid cancellation at small g.
double moment(const Shape& s, int q);

struct Summary {
  double mean;
  double sd;
  double skewness;
  double excess_kurtosis;
};

/// Central-moment summary; needs h < 1/4.
Summary summary(const Shape& s);

/// Distribution of Y = xi + omega * tau(Z).
double pdf(const Params& p, double y);
double cdf(const Params& p, double y);
double quantile(const Params& p, double u);

/// CRPS of the law xi + omega * tau(mu + sigma Z) at observation y, by
/// adaptive quadrature of the squared cdf deviation between extreme
/// quantiles. Requires h * sigma^2 < 1/2.
double crps_latent(const Shape& s, double xi, double omega, double mu,
                   double sigma, double y);

inline double crps(const Params& p, double y) {
  return crps_latent(p.shape, p.xi, p.omega, 0.0, 1.0, y);
}

}  // namespace tghar::tgh
