#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tghar/rng.hpp"

namespace tghar::ar {

/// AR(p) coefficients phi_1..phi_p. Order 0 (empty phi) is white noise.
struct Coeffs {
  std::vector<double> phi;

  std::size_t order() const { return phi.size(); }
};

/// Levinson ladder of an AR(p) model: coefficient vectors of every order
/// k = 0..p fitted to the same autocorrelations, plus the prediction error
/// variances v[k] of a unit-variance process. Feeds the exact likelihood
/// of the first p observations and the stationary-start simulator.
struct Ladder {
  std::vector<std::vector<double>> phis;  // phis[k] has length k
  std::vector<double> v;                  // v[0] = 1, v[k] = v[k-1](1-r_k^2)
  std::vector<double> pacf;               // r_1..r_p

  std::size_t order() const { return pacf.size(); }
};

/// True when all roots of the AR polynomial lie outside the unit circle,
/// with a 1e-10 safety margin.
bool is_stationary(const Coeffs& c);

/// Bijection between stationary coefficients and partial autocorrelations
/// in (-1,1)^p. pacf_to_phi always lands in the stationary region;
/// phi_to_pacf throws std::domain_error on non-stationary input.
Coeffs pacf_to_phi(std::span<const double> r);
std::vector<double> phi_to_pacf(const Coeffs& c);

/// Full ladder for a stationary model (throws otherwise).
Ladder levinson_ladder(const Coeffs& c);

/// Variance of the innovations driving a unit-variance stationary AR(p).
double innovation_variance(const Coeffs& c);
double innovation_sd(const Coeffs& c);

/// Autocorrelations rho(0..max_lag) of the stationary process.
std::vector<double> acf(const Coeffs& c, std::size_t max_lag);

/// Moving-average weights psi_0, psi_1, ...; extended past min_terms until
/// |psi_j| < 1e-12 (capped at 10^6 terms).
std::vector<double> psi_weights(const Coeffs& c, std::size_t min_terms = 0);

/// Unit-variance stationary path of length n. The first p values are drawn
/// from the exact joint stationary law through the ladder, so no burn-in
/// is needed.
std::vector<double> simulate_unit(const Coeffs& c, std::size_t n, Pcg64& rng);

struct ConditionalMoments {
  double mu;
  double sigma2;
};

/// One-step conditional law of the unit-variance process given the last p
/// values (history ordered oldest to newest; at least p entries).
ConditionalMoments conditional_moments(const Coeffs& c,
                                       std::span<const double> history);

}  // namespace tghar::ar
