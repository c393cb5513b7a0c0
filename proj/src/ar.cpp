#include "tghar/ar.hpp"

#include <cmath>
#include <stdexcept>

namespace tghar::ar {

namespace {

constexpr double kMargin = 1e-10;

// Backward Levinson recursion. Returns false (instead of throwing) when a
// reflection coefficient leaves (-1, 1), which is exactly the
// non-stationary case.
bool pacf_of(const std::vector<double>& phi, std::vector<double>* out) {
  const std::size_t p = phi.size();
  out->assign(p, 0.0);
  std::vector<double> work = phi;
  for (std::size_t k = p; k >= 1; --k) {
    const double rk = work[k - 1];
    (*out)[k - 1] = rk;
    if (!(std::abs(rk) < 1.0 - kMargin)) return false;
    const double denom = 1.0 - rk * rk;
    std::vector<double> prev(k - 1);
    for (std::size_t j = 1; j < k; ++j) {
      prev[j - 1] = (work[j - 1] + rk * work[k - 1 - j]) / denom;
    }
    work = std::move(prev);
  }
  return true;
}

}  // namespace

bool is_stationary(const Coeffs& c) {
  std::vector<double> r;
  return pacf_of(c.phi, &r);
}

Coeffs pacf_to_phi(std::span<const double> r) {
  std::vector<double> phi;
  for (double rk : r) {
    if (!(rk > -1.0 && rk < 1.0)) {
      throw std::domain_error("pacf_to_phi: partial correlation outside (-1,1)");
    }
    std::vector<double> next(phi.size() + 1);
    const std::size_t k = next.size();
    for (std::size_t j = 1; j < k; ++j) {
      next[j - 1] = phi[j - 1] - rk * phi[k - 1 - j];
    }
    next[k - 1] = rk;
    phi = std::move(next);
  }
  return Coeffs{std::move(phi)};
}

std::vector<double> phi_to_pacf(const Coeffs& c) {
  std::vector<double> r;
  if (!pacf_of(c.phi, &r)) {
    throw std::domain_error("phi_to_pacf: coefficients are not stationary");
  }
  return r;
}

Ladder levinson_ladder(const Coeffs& c) {
  Ladder l;
  l.pacf = phi_to_pacf(c);
  const std::size_t p = l.pacf.size();
  l.phis.resize(p + 1);
  l.v.resize(p + 1);
  l.v[0] = 1.0;
  for (std::size_t k = 1; k <= p; ++k) {
    const double rk = l.pacf[k - 1];
    l.phis[k].resize(k);
    for (std::size_t j = 1; j < k; ++j) {
      l.phis[k][j - 1] = l.phis[k - 1][j - 1] - rk * l.phis[k - 1][k - 1 - j];
    }
    l.phis[k][k - 1] = rk;
    l.v[k] = l.v[k - 1] * (1.0 - rk * rk);
  }
  return l;
}

double innovation_variance(const Coeffs& c) {
  const std::vector<double> r = phi_to_pacf(c);
  double v = 1.0;
  for (double rk : r) v *= 1.0 - rk * rk;
  return v;
}

double innovation_sd(const Coeffs& c) {
  return std::sqrt(innovation_variance(c));
}

std::vector<double> acf(const Coeffs& c, std::size_t max_lag) {
  const Ladder l = levinson_ladder(c);
  const std::size_t p = c.order();
  std::vector<double> rho(max_lag + 1, 0.0);
  rho[0] = 1.0;
  // rho(k) = sum_j phi^(k-1)_j rho(k-j) + r_k v_{k-1} while the ladder
  // grows, then the Yule-Walker extension with the full coefficients.
  for (std::size_t k = 1; k <= max_lag; ++k) {
    if (k <= p) {
      double s = l.pacf[k - 1] * l.v[k - 1];
      for (std::size_t j = 1; j < k; ++j) {
        s += l.phis[k - 1][j - 1] * rho[k - j];
      }
      rho[k] = s;
    } else {
      double s = 0.0;
      for (std::size_t j = 1; j <= p; ++j) s += c.phi[j - 1] * rho[k - j];
      rho[k] = s;
    }
  }
  return rho;
}

std::vector<double> psi_weights(const Coeffs& c, std::size_t min_terms) {
  const std::size_t p = c.order();
  constexpr std::size_t kCap = 1000000;
  std::vector<double> psi{1.0};
  std::size_t j = 1;
  while (j < min_terms || (psi.size() <= kCap &&
                           (j <= p || std::abs(psi.back()) >= 1e-12))) {
    double s = 0.0;
    for (std::size_t i = 1; i <= p && i <= j; ++i) {
      s += c.phi[i - 1] * psi[j - i];
    }
    psi.push_back(s);
    ++j;
    if (psi.size() > kCap) break;
  }
  return psi;
}

std::vector<double> simulate_unit(const Coeffs& c, std::size_t n, Pcg64& rng) {
  const std::size_t p = c.order();
  std::vector<double> z(n);
  if (n == 0) return z;
  const Ladder l = levinson_ladder(c);
  const std::size_t head = std::min(p, n);
  // Exact stationary start: z_{k+1} | z_1..z_k uses the order-k ladder.
  for (std::size_t k = 0; k < head; ++k) {
    double mu = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      mu += l.phis[k][j - 1] * z[k - j];
    }
    z[k] = mu + std::sqrt(l.v[k]) * rng.next_normal();
  }
  const double sd = std::sqrt(l.v[p]);
  for (std::size_t t = head; t < n; ++t) {
    double mu = 0.0;
    for (std::size_t j = 1; j <= p; ++j) mu += c.phi[j - 1] * z[t - j];
    z[t] = mu + sd * rng.next_normal();
  }
  return z;
}

ConditionalMoments conditional_moments(const Coeffs& c,
                                       std::span<const double> history) {
  const std::size_t p = c.order();
  if (history.size() < p) {
    throw std::domain_error("conditional_moments: history shorter than order");
  }
  double mu = 0.0;
  for (std::size_t j = 1; j <= p; ++j) {
    mu += c.phi[j - 1] * history[history.size() - j];
  }
  return {mu, innovation_variance(c)};
}

}  // namespace tghar::ar
