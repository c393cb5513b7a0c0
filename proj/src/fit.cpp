#include "tghar/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tghar/num.hpp"
#include "tghar/optim.hpp"
#include "tghar/rng.hpp"

namespace tghar::fit {

namespace {

constexpr double kPacfClip = 1.0 - 1e-10;

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inverse(double h) {
  if (h <= 0.0) return -40.0;
  if (h > 30.0) return h;
  return std::log(std::expm1(h));
}

// Mapping between the optimizer's unconstrained vector and natural
// parameters, honoring fixed components.
struct ParamMap {
  std::size_t p = 0;
  std::size_t d = 0;
  Config cfg;

  std::size_t dim() const {
    std::size_t n = p + d;
    if (!cfg.fix_xi) ++n;
    if (!cfg.fix_omega) ++n;
    if (!cfg.fix_g) ++n;
    if (!cfg.fix_h) ++n;
    return n;
  }

  model::Spec unpack(std::span<const double> x) const {
    model::Spec s;
    s.variant = cfg.variant;
    std::size_t i = 0;
    s.tgh.xi = cfg.fix_xi ? *cfg.fix_xi : x[i++];
    s.tgh.omega = cfg.fix_omega ? *cfg.fix_omega : std::exp(x[i++]);
    s.tgh.shape.g = cfg.fix_g ? *cfg.fix_g : x[i++];
    if (cfg.fix_h) {
      s.tgh.shape.h = *cfg.fix_h;
    } else {
      const double h = softplus(x[i++]);
      s.tgh.shape.h = h < 1e-12 ? 0.0 : h;
    }
    s.beta.assign(x.begin() + i, x.begin() + i + d);
    i += d;
    std::vector<double> r(p);
    for (std::size_t j = 0; j < p; ++j) {
      r[j] = std::clamp(std::tanh(x[i + j]), -kPacfClip, kPacfClip);
    }
    s.arc = ar::pacf_to_phi(r);
    return s;
  }

  // natural = (xi, omega, g, h, beta..., phi...)
  std::vector<double> pack(std::span<const double> natural) const {
    std::vector<double> x;
    x.reserve(dim());
    if (!cfg.fix_xi) x.push_back(natural[0]);
    if (!cfg.fix_omega) x.push_back(std::log(natural[1]));
    if (!cfg.fix_g) x.push_back(natural[2]);
    if (!cfg.fix_h) x.push_back(softplus_inverse(natural[3]));
    for (std::size_t j = 0; j < d; ++j) x.push_back(natural[4 + j]);
    if (p > 0) {
      ar::Coeffs c{{natural.begin() + 4 + d, natural.end()}};
      const std::vector<double> r = ar::phi_to_pacf(c);
      for (double rj : r) {
        x.push_back(std::atanh(std::clamp(rj, -kPacfClip, kPacfClip)));
      }
    }
    return x;
  }
};

// Durbin-Levinson on sample autocorrelations, with clipping so noisy input
// still yields a usable stationary start.
std::vector<double> pacf_from_rho(const std::vector<double>& rho,
                                  std::size_t p) {
  std::vector<double> r(p), phi;
  double v = 1.0;
  for (std::size_t k = 1; k <= p; ++k) {
    double num = rho[k];
    for (std::size_t j = 1; j < k; ++j) num -= phi[j - 1] * rho[k - j];
    double rk = v > 1e-12 ? num / v : 0.0;
    rk = std::clamp(rk, -0.95, 0.95);
    r[k - 1] = rk;
    std::vector<double> next(k);
    for (std::size_t j = 1; j < k; ++j) {
      next[j - 1] = phi[j - 1] - rk * phi[k - 1 - j];
    }
    next[k - 1] = rk;
    phi = std::move(next);
    v *= 1.0 - rk * rk;
  }
  return r;
}

std::vector<double> sample_acf(const std::vector<double>& w, std::size_t p) {
  const std::size_t n = w.size();
  const double mean = num::sample_mean(w);
  std::vector<double> rho(p + 1, 0.0);
  double g0 = 0.0;
  for (double v : w) g0 += (v - mean) * (v - mean);
  rho[0] = 1.0;
  if (g0 <= 0.0) return rho;
  for (std::size_t k = 1; k <= p && k < n; ++k) {
    double s = 0.0;
    for (std::size_t t = k; t < n; ++t) s += (w[t] - mean) * (w[t - k] - mean);
    rho[k] = s / g0;
  }
  return rho;
}

std::size_t effective_k(const Config& cfg, std::size_t p) {
  return std::max(cfg.k, p);
}

double objective_value(const model::Spec& s, const model::Series& data,
                       const Config& cfg, std::size_t k_eff) {
  const model::LikOptions opt{cfg.use_table, 1e-6, 1.0};
  model::LogLik ll;
  try {
    ll = cfg.variant == model::Variant::Latent
             ? model::loglik_latent(s, data, opt)
             : model::loglik_error(s, data, k_eff, opt);
  } catch (const std::exception&) {
    // Extreme trial shapes can overflow the transform inversion; score them
    // as unusable rather than aborting the whole search.
    return std::numeric_limits<double>::infinity();
  }
  if (!ll.supported || !std::isfinite(ll.value)) {
    return std::numeric_limits<double>::infinity();
  }
  return -ll.value;
}

void check_length(const model::Series& data, std::size_t p) {
  const std::size_t need = std::max<std::size_t>(
      30, 5 * (p + 4 + data.xdim));
  if (data.size() < need) {
    throw std::domain_error("fit: series too short for this order");
  }
}

std::vector<double> jittered_start(const std::vector<double>& natural,
                                   std::size_t p, std::size_t d,
                                   std::uint64_t seed, std::size_t attempt) {
  Pcg64 rng = substream(seed, 1000 + attempt);
  std::vector<double> th = natural;
  const double omega0 = natural[1];
  th[0] += 0.5 * omega0 * rng.next_normal();
  th[1] = omega0 * std::exp(0.3 * rng.next_normal());
  th[2] = std::clamp(natural[2] + 0.3 * rng.next_normal(), -1.5, 1.5);
  th[3] = std::abs(0.05 + 0.08 * rng.next_normal());
  for (std::size_t j = 0; j < d; ++j) {
    th[4 + j] += (0.1 * std::abs(natural[4 + j]) + 0.05 * omega0) *
                 rng.next_normal();
  }
  if (p > 0) {
    ar::Coeffs c{{natural.begin() + 4 + static_cast<std::ptrdiff_t>(d),
                  natural.end()}};
    std::vector<double> r = ar::phi_to_pacf(c);
    for (double& rj : r) {
      rj = std::clamp(rj + 0.25 * rng.next_normal(), -0.95, 0.95);
    }
    const ar::Coeffs cj = ar::pacf_to_phi(r);
    std::copy(cj.phi.begin(), cj.phi.end(), th.begin() + 4 + d);
  }
  return th;
}

}  // namespace

double bic_value(model::Variant variant, double loglik, std::size_t p,
                 std::size_t n, std::size_t k) {
  const double params = static_cast<double>(p) + 4.0;
  const double eff = variant == model::Variant::Latent
                         ? static_cast<double>(n)
                         : static_cast<double>(n - k);
  return -2.0 * loglik + params * std::log(eff);
}

std::vector<double> initial_values(const model::Series& data, std::size_t p,
                                   model::Variant variant) {
  const std::size_t n = data.size();
  const std::size_t d = data.xdim;
  if (n < p + 2) throw std::domain_error("initial_values: series too short");

  // Least squares on [1 X]; the intercept is discarded in favor of the
  // median below.
  std::vector<double> beta(d, 0.0);
  if (d > 0) {
    const std::size_t m = d + 1;
    std::vector<double> a(m * m, 0.0), b(m, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      double row[8];
      row[0] = 1.0;
      for (std::size_t j = 0; j < d; ++j) row[j + 1] = data.xrow(t)[j];
      for (std::size_t i = 0; i < m; ++i) {
        b[i] += row[i] * data.y[t];
        for (std::size_t j = 0; j < m; ++j) a[i * m + j] += row[i] * row[j];
      }
    }
    const std::vector<double> sol = num::solve_spd(std::move(a), std::move(b), m);
    for (std::size_t j = 0; j < d; ++j) beta[j] = sol[j + 1];
  }

  std::vector<double> detr(n);
  for (std::size_t t = 0; t < n; ++t) {
    double m = 0.0;
    for (std::size_t j = 0; j < d; ++j) m += data.xrow(t)[j] * beta[j];
    detr[t] = data.y[t] - m;
  }

  const double med = num::sample_quantile(detr, 0.5);
  const double iqr =
      num::sample_quantile(detr, 0.75) - num::sample_quantile(detr, 0.25);
  if (!(iqr > 0.0)) {
    throw std::domain_error("initial_values: degenerate (constant) series");
  }
  const double omega0 = iqr / 1.349;
  const double up = num::sample_quantile(detr, 0.875) - med;
  const double dn = med - num::sample_quantile(detr, 0.125);
  double g0 = 0.0;
  if (up > 0.0 && dn > 0.0) {
    g0 = std::clamp(std::log(up / dn) / 1.1503, -1.0, 1.0);
  }
  const double h0 = 0.05;

  std::vector<double> natural{med, omega0, g0, h0};
  natural.insert(natural.end(), beta.begin(), beta.end());

  if (p > 0) {
    std::vector<double> w(n);
    if (variant == model::Variant::Latent) {
      const tgh::Shape sh{g0, h0};
      for (std::size_t t = 0; t < n; ++t) {
        w[t] = tgh::tau_inverse_exact(sh, (detr[t] - med) / omega0);
      }
    } else {
      for (std::size_t t = 0; t < n; ++t) w[t] = detr[t] - med;
    }
    const std::vector<double> rho = sample_acf(w, p);
    const std::vector<double> r = pacf_from_rho(rho, p);
    const ar::Coeffs c = ar::pacf_to_phi(r);
    natural.insert(natural.end(), c.phi.begin(), c.phi.end());
  }
  return natural;
}

Result fit(const model::Series& data, std::size_t p, const Config& cfg) {
  check_length(data, p);
  const std::size_t k_eff =
      cfg.variant == model::Variant::Error ? effective_k(cfg, p) : 0;

  ParamMap map{p, data.xdim, cfg};
  const auto objective = [&](std::span<const double> x) {
    return objective_value(map.unpack(x), data, cfg, k_eff);
  };

  const std::vector<double> base = initial_values(data, p, cfg.variant);
  std::vector<std::vector<double>> starts;
  starts.push_back(map.pack(base));
  for (std::size_t s = 1; s < std::max<std::size_t>(cfg.multistarts, 1);
       ++s) {
    starts.push_back(map.pack(jittered_start(base, p, data.xdim, cfg.seed, s)));
  }

  optim::Options opt;
  opt.f_tol = cfg.f_tol;
  opt.x_tol = cfg.x_tol;
  opt.max_evals = cfg.max_evals;

  optim::Result best;
  best.fval = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
  for (const auto& x0 : starts) {
    optim::Result r = optim::nelder_mead(objective, x0, opt);
    evals += r.evaluations;
    if (r.fval < best.fval) best = r;
  }
  if (std::isfinite(best.fval)) {
    // Restart the winner with a fresh tightened simplex; this undoes any
    // premature simplex collapse.
    optim::Options again = opt;
    again.init_step = 0.05;
    again.max_evals = cfg.max_evals / 2;
    optim::Result polish = optim::nelder_mead(objective, best.x, again);
    evals += polish.evaluations;
    if (polish.fval < best.fval) {
      best = polish;
    } else {
      best.converged = best.converged || polish.converged;
    }
  }

  Result out;
  out.spec = map.unpack(best.x);
  out.loglik = -best.fval;
  out.order = p;
  out.k = k_eff;
  out.n_used = cfg.variant == model::Variant::Latent ? data.size()
                                                     : data.size() - k_eff;
  out.bic = bic_value(cfg.variant, out.loglik, p, data.size(), k_eff);
  out.converged = std::isfinite(best.fval) && best.converged;
  out.evaluations = evals;
  out.starts_tried = starts.size();
  return out;
}

Result select_order(const model::Series& data, const Config& cfg) {
  Config base = cfg;
  if (cfg.variant == model::Variant::Error) {
    base.k = std::max(cfg.k, cfg.max_order);
  }
  bool have = false;
  Result best;
  std::vector<double> warm;  // natural parameters of the previous order
  for (std::size_t p = 0; p <= cfg.max_order; ++p) {
    Result r;
    try {
      Config c = base;
      // Reuse the lower-order optimum as one extra start.
      if (!warm.empty()) {
        c.multistarts = std::max<std::size_t>(cfg.multistarts, 2) - 1;
      }
      r = fit(data, p, c);
      if (!warm.empty()) {
        ParamMap map{p, data.xdim, c};
        // Appending phi_p = 0 equals extending the pacf sequence with a
        // zero at the new lag.
        std::vector<double> extended = warm;
        extended.push_back(0.0);
        const auto objective = [&](std::span<const double> x) {
          return objective_value(map.unpack(x), data, c,
                                 c.variant == model::Variant::Error
                                     ? effective_k(c, p)
                                     : 0);
        };
        std::vector<double> x0 = map.pack(extended);
        optim::Options opt;
        opt.f_tol = cfg.f_tol;
        opt.x_tol = cfg.x_tol;
        opt.max_evals = cfg.max_evals;
        optim::Result wr = optim::nelder_mead(objective, x0, opt);
        if (-wr.fval > r.loglik) {
          r.spec = map.unpack(wr.x);
          r.loglik = -wr.fval;
          r.bic = bic_value(c.variant, r.loglik, p, data.size(), r.k);
          r.converged = wr.converged;
        }
        r.evaluations += wr.evaluations;
        ++r.starts_tried;
      }
    } catch (const std::exception&) {
      continue;  // this order failed; select among the rest
    }
    warm.assign(4 + data.xdim, 0.0);
    warm[0] = r.spec.tgh.xi;
    warm[1] = r.spec.tgh.omega;
    warm[2] = r.spec.tgh.shape.g;
    warm[3] = r.spec.tgh.shape.h;
    for (std::size_t j = 0; j < data.xdim; ++j) warm[4 + j] = r.spec.beta[j];
    warm.insert(warm.end(), r.spec.arc.phi.begin(), r.spec.arc.phi.end());
    if (!have || r.bic < best.bic) {
      best = r;
      have = true;
    }
  }
  if (!have) throw std::runtime_error("select_order: every order failed");
  return best;
}

Result fit_sequential(const model::Series& data, std::size_t p,
                      const Config& cfg) {
  // Stage 1: independence fit of the transform and regression parameters.
  Config c1 = cfg;
  c1.variant = model::Variant::Latent;
  c1.k = 0;
  const Result s1 = fit(data, 0, c1);

  // Stage 2: Gaussian AR on the back-transformed residuals.
  const std::size_t n = data.size();
  const tgh::Shape sh = s1.spec.tgh.shape;
  model::Series zs;
  zs.y.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    double m = s1.spec.tgh.xi;
    for (std::size_t j = 0; j < data.xdim; ++j) {
      m += data.xrow(t)[j] * s1.spec.beta[j];
    }
    double u = (data.y[t] - m) / s1.spec.tgh.omega;
    if (sh.h == 0.0 && !sh.g_is_zero()) {
      // Clamp into the open support so the stage-1 estimate cannot strand
      // an observation.
      const double a = std::max(sh.g * u, -1.0 + 1e-12);
      zs.y[t] = std::log1p(a) / sh.g;
    } else {
      zs.y[t] = tgh::tau_inverse_exact(sh, u);
    }
  }

  Config c2 = cfg;
  c2.variant = model::Variant::Latent;
  c2.fix_xi = 0.0;
  c2.fix_omega = 1.0;
  c2.fix_g = 0.0;
  c2.fix_h = 0.0;
  c2.k = 0;
  Result s2;
  if (p > 0) {
    s2 = fit(zs, p, c2);
  } else {
    s2.spec.arc = ar::Coeffs{};
    s2.converged = true;
  }

  Result out;
  out.spec = s1.spec;
  out.spec.variant = cfg.variant;
  out.spec.arc = s2.spec.arc;
  const model::LogLik joint =
      cfg.variant == model::Variant::Latent
          ? model::loglik_latent(out.spec, data, {false, 1e-6, 1.0})
          : model::loglik_error(out.spec, data, effective_k(cfg, p),
                                {false, 1e-6, 1.0});
  out.loglik = joint.value;
  out.order = p;
  out.k = cfg.variant == model::Variant::Error ? effective_k(cfg, p) : 0;
  out.n_used = cfg.variant == model::Variant::Latent ? n : n - out.k;
  out.bic = bic_value(cfg.variant, out.loglik, p, n, out.k);
  out.converged = s1.converged && s2.converged;
  out.evaluations = s1.evaluations + s2.evaluations;
  out.starts_tried = s1.starts_tried + s2.starts_tried;
  return out;
}

}  // namespace tghar::fit
