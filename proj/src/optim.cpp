#include "tghar/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tghar::optim {

namespace {

constexpr double kHuge = 1e300;

double guarded(const Objective& f, std::span<const double> x,
               std::size_t* evals) {
  ++*evals;
  const double v = f(x);
  return std::isfinite(v) ? v : kHuge;
}

}  // namespace

Result nelder_mead(const Objective& f, std::span<const double> x0,
                   const Options& opt) {
  const std::size_t d = x0.size();
  const double dn = static_cast<double>(d);
  // Dimension-adaptive coefficients; the classic 1/2/0.5/0.5 set stalls in
  // higher dimensions.
  const double refl = 1.0;
  const double expa = 1.0 + 2.0 / dn;
  const double contr = 0.75 - 0.5 / dn;
  const double shrink = 1.0 - 1.0 / dn;

  std::size_t evals = 0;
  std::vector<std::vector<double>> pts(d + 1, std::vector<double>(x0.begin(), x0.end()));
  std::vector<double> fv(d + 1);
  for (std::size_t i = 1; i <= d; ++i) {
    const double base = pts[i][i - 1];
    pts[i][i - 1] =
        base + opt.init_step * std::max(1.0, std::abs(base));
  }
  for (std::size_t i = 0; i <= d; ++i) fv[i] = guarded(f, pts[i], &evals);

  std::vector<std::size_t> idx(d + 1);
  std::vector<double> centroid(d), cand(d), cand2(d);

  Result res;
  while (true) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx[0];
    const std::size_t worst = idx[d];
    const std::size_t second = idx[d - 1];

    double diam = 0.0;
    for (std::size_t i = 1; i <= d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        diam = std::max(diam, std::abs(pts[idx[i]][j] - pts[best][j]));
      }
    }
    const bool f_done =
        fv[worst] - fv[best] <= opt.f_tol * (1.0 + std::abs(fv[best]));
    if ((f_done && diam <= opt.x_tol * (1.0 + std::abs(pts[best][0]))) ||
        evals >= opt.max_evals) {
      res.x = pts[best];
      res.fval = fv[best];
      res.evaluations = evals;
      res.converged = f_done || diam <= opt.x_tol;
      return res;
    }

    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i <= d; ++i) {
        if (i != worst) s += pts[i][j];
      }
      centroid[j] = s / dn;
    }

    for (std::size_t j = 0; j < d; ++j) {
      cand[j] = centroid[j] + refl * (centroid[j] - pts[worst][j]);
    }
    const double f_refl = guarded(f, cand, &evals);

    if (f_refl < fv[best]) {
      for (std::size_t j = 0; j < d; ++j) {
        cand2[j] = centroid[j] + expa * (cand[j] - centroid[j]);
      }
      const double f_exp = guarded(f, cand2, &evals);
      if (f_exp < f_refl) {
        pts[worst] = cand2;
        fv[worst] = f_exp;
      } else {
        pts[worst] = cand;
        fv[worst] = f_refl;
      }
      continue;
    }
    if (f_refl < fv[second]) {
      pts[worst] = cand;
      fv[worst] = f_refl;
      continue;
    }
    if (f_refl < fv[worst]) {
      // Outside contraction.
      for (std::size_t j = 0; j < d; ++j) {
        cand2[j] = centroid[j] + contr * (cand[j] - centroid[j]);
      }
      const double f_oc = guarded(f, cand2, &evals);
      if (f_oc <= f_refl) {
        pts[worst] = cand2;
        fv[worst] = f_oc;
        continue;
      }
    } else {
      // Inside contraction.
      for (std::size_t j = 0; j < d; ++j) {
        cand2[j] = centroid[j] - contr * (centroid[j] - pts[worst][j]);
      }
      const double f_ic = guarded(f, cand2, &evals);
      if (f_ic < fv[worst]) {
        pts[worst] = cand2;
        fv[worst] = f_ic;
        continue;
      }
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < d; ++j) {
        pts[i][j] = pts[best][j] + shrink * (pts[i][j] - pts[best][j]);
      }
      fv[i] = guarded(f, pts[i], &evals);
    }
  }
}

}  // namespace tghar::optim
