#include <immintrin.h>

#include <cstddef>

#include "tghar/kernels.hpp"

// AVX2 + FMA variants of the hot-loop primitives. The transcendental
// helpers are classic rational approximations (exp via Pade on a
// range-reduced argument, log via mantissa/exponent split); both are
// accurate to a couple of ulp, which the kernel equivalence tests pin down
// against libm.

namespace tghar::kernels {
namespace {

inline __m256d hset(double v) { return _mm256_set1_pd(v); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// Pade tables shared by exp and expm1.
inline __m256d exp_pade_p(__m256d rr) {
  __m256d p = _mm256_fmadd_pd(hset(1.26177193074810590878e-4), rr,
                              hset(3.02994407707441961300e-2));
  return _mm256_fmadd_pd(p, rr, hset(9.99999999999999999910e-1));
}

inline __m256d exp_pade_q(__m256d rr) {
  __m256d q = _mm256_fmadd_pd(hset(3.00198505138664455042e-6), rr,
                              hset(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, rr, hset(2.27265548208155028766e-1));
  return _mm256_fmadd_pd(q, rr, hset(2.00000000000000000005e0));
}

inline __m256d exp_pd(__m256d x) {
  x = _mm256_max_pd(_mm256_min_pd(x, hset(708.0)), hset(-708.0));
  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(x, hset(1.44269504088896340736)),
      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, hset(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(n, hset(1.42860682030941723212e-6), r);
  const __m256d rr = _mm256_mul_pd(r, r);
  const __m256d px = _mm256_mul_pd(r, exp_pade_p(rr));
  const __m256d qx = exp_pade_q(rr);
  const __m256d frac = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  const __m256d e = _mm256_fmadd_pd(hset(2.0), frac, hset(1.0));
  // Scale by 2^n through the exponent bits.
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i pow2 = _mm256_slli_epi64(
      _mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(pow2));
}

// Fills e = exp(x) and em1 = expm1(x). For |x| <= ln2/2 the Pade quotient
// gives expm1 directly with full relative accuracy; elsewhere exp(x) - 1
// is already safe.
inline void exp_expm1_pd(__m256d x, __m256d* e, __m256d* em1) {
  const __m256d ex = exp_pd(x);
  const __m256d rr = _mm256_mul_pd(x, x);
  const __m256d px = _mm256_mul_pd(x, exp_pade_p(rr));
  const __m256d qx = exp_pade_q(rr);
  const __m256d small = _mm256_div_pd(_mm256_mul_pd(hset(2.0), px),
                                      _mm256_sub_pd(qx, px));
  const __m256d big = _mm256_sub_pd(ex, hset(1.0));
  const __m256d absx = _mm256_andnot_pd(hset(-0.0), x);
  const __m256d mask = _mm256_cmp_pd(absx, hset(0.34657359027997264), _CMP_LE_OQ);
  *e = ex;
  *em1 = _mm256_blendv_pd(big, small, mask);
}

inline __m256d expm1_pd(__m256d x) {
  __m256d e, em1;
  exp_expm1_pd(x, &e, &em1);
  return em1;
}

// log for strictly positive finite inputs.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i raw_exp = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52),
                                           _mm256_set1_epi64x(1022));
  const __m256i mant_bits = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
      _mm256_set1_epi64x(0x3FE0000000000000ll));
  __m256d m = _mm256_castsi256_pd(mant_bits);
  const __m128i e32 = _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(
      raw_exp, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0)));
  __m256d e = _mm256_cvtepi32_pd(e32);
  // Fold m into [sqrt(1/2), sqrt(2)).
  const __m256d low = _mm256_cmp_pd(m, hset(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(low, hset(1.0)));
  m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), low);
  const __m256d t = _mm256_sub_pd(m, hset(1.0));
  const __m256d t2 = _mm256_mul_pd(t, t);
  __m256d p = _mm256_fmadd_pd(hset(1.01875663804580931796e-4), t,
                              hset(4.97494994976747001425e-1));
  p = _mm256_fmadd_pd(p, t, hset(4.70579119878881725854e0));
  p = _mm256_fmadd_pd(p, t, hset(1.44989225341610930846e1));
  p = _mm256_fmadd_pd(p, t, hset(1.79368678507819816313e1));
  p = _mm256_fmadd_pd(p, t, hset(7.70838733755885391666e0));
  __m256d q = _mm256_add_pd(t, hset(1.12873587189167450590e1));
  q = _mm256_fmadd_pd(q, t, hset(4.52279145837532221105e1));
  q = _mm256_fmadd_pd(q, t, hset(8.29875266912776603211e1));
  q = _mm256_fmadd_pd(q, t, hset(7.11544750618563894466e1));
  q = _mm256_fmadd_pd(q, t, hset(2.31251620126765340583e1));
  __m256d y = _mm256_mul_pd(_mm256_mul_pd(t, t2), _mm256_div_pd(p, q));
  y = _mm256_fmadd_pd(e, hset(-2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(hset(0.5), t2, y);
  __m256d res = _mm256_add_pd(t, y);
  return _mm256_fmadd_pd(e, hset(0.693359375), res);
}

void tau_avx2(const double* z, std::size_t n, double g, double h,
              double* out) {
  const std::size_t main = n & ~std::size_t{3};
  const __m256d half_h = hset(0.5 * h);
  if (g == 0.0) {
    for (std::size_t i = 0; i < main; i += 4) {
      const __m256d zv = _mm256_loadu_pd(z + i);
      const __m256d gauss =
          exp_pd(_mm256_mul_pd(half_h, _mm256_mul_pd(zv, zv)));
      _mm256_storeu_pd(out + i, _mm256_mul_pd(zv, gauss));
    }
  } else {
    const __m256d gv = hset(g);
    const __m256d inv_g = hset(1.0 / g);
    for (std::size_t i = 0; i < main; i += 4) {
      const __m256d zv = _mm256_loadu_pd(z + i);
      const __m256d skew = expm1_pd(_mm256_mul_pd(gv, zv));
      const __m256d gauss =
          exp_pd(_mm256_mul_pd(half_h, _mm256_mul_pd(zv, zv)));
      _mm256_storeu_pd(out + i,
                       _mm256_mul_pd(_mm256_mul_pd(inv_g, skew), gauss));
    }
  }
  if (main < n) scalar().tau(z + main, n - main, g, h, out + main);
}

double sum_log_jacobian_avx2(const double* z, std::size_t n, double g,
                             double h) {
  const std::size_t main = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  if (h == 0.0) {
    for (std::size_t i = 0; i < main; i += 4) {
      acc = _mm256_add_pd(acc, _mm256_loadu_pd(z + i));
    }
    double tail = 0.0;
    for (std::size_t i = main; i < n; ++i) tail += z[i];
    return g * (hsum(acc) + tail);
  }
  const __m256d half_h = hset(0.5 * h);
  if (g == 0.0) {
    const __m256d hv = hset(h);
    const __m256d one = hset(1.0);
    for (std::size_t i = 0; i < main; i += 4) {
      const __m256d zv = _mm256_loadu_pd(z + i);
      const __m256d zz = _mm256_mul_pd(zv, zv);
      const __m256d b = _mm256_fmadd_pd(hv, zz, one);
      acc = _mm256_add_pd(acc,
                          _mm256_fmadd_pd(half_h, zz, log_pd(b)));
    }
  } else {
    const __m256d gv = hset(g);
    const __m256d h_over_g = hset(h / g);
    for (std::size_t i = 0; i < main; i += 4) {
      const __m256d zv = _mm256_loadu_pd(z + i);
      const __m256d gz = _mm256_mul_pd(gv, zv);
      __m256d e, em1;
      exp_expm1_pd(gz, &e, &em1);
      const __m256d b =
          _mm256_fmadd_pd(_mm256_mul_pd(h_over_g, em1), zv, e);
      const __m256d zz = _mm256_mul_pd(zv, zv);
      acc = _mm256_add_pd(acc,
                          _mm256_fmadd_pd(half_h, zz, log_pd(b)));
    }
  }
  double total = hsum(acc);
  if (main < n) {
    total += scalar().sum_log_jacobian(z + main, n - main, g, h);
  }
  return total;
}

double sum_sq_avx2(const double* z, std::size_t n) {
  const std::size_t main = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < main; i += 4) {
    const __m256d zv = _mm256_loadu_pd(z + i);
    acc = _mm256_fmadd_pd(zv, zv, acc);
  }
  double total = hsum(acc);
  for (std::size_t i = main; i < n; ++i) total += z[i] * z[i];
  return total;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t main = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < main; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double total = hsum(acc);
  for (std::size_t i = main; i < n; ++i) total += a[i] * b[i];
  return total;
}

void standardize_avx2(const double* y, const double* x, std::size_t n,
                      std::size_t d, const double* beta, double xi,
                      double omega, double* out) {
  const __m256d inv_omega = hset(1.0 / omega);
  const __m256d xiv = hset(xi);
  const std::size_t main = n & ~std::size_t{3};
  if (d == 0) {
    for (std::size_t t = 0; t < main; t += 4) {
      const __m256d yv = _mm256_loadu_pd(y + t);
      _mm256_storeu_pd(out + t,
                       _mm256_mul_pd(_mm256_sub_pd(yv, xiv), inv_omega));
    }
    if (main < n) {
      scalar().standardize(y + main, nullptr, n - main, 0, beta, xi, omega,
                           out + main);
    }
    return;
  }
  // Covariate rows are tiny (d is 1 or 2 in practice); gather per lane.
  scalar().standardize(y, x, n, d, beta, xi, omega, out);
}

void ar_residuals_avx2(const double* z, std::size_t n, const double* phi,
                       std::size_t p, double omega, double* out) {
  if (n <= p) return;
  const __m256d inv_omega = hset(1.0 / omega);
  const std::size_t m = n - p;
  const std::size_t main = m & ~std::size_t{3};
  for (std::size_t i = 0; i < main; i += 4) {
    const std::size_t t = p + i;
    __m256d r = _mm256_loadu_pd(z + t);
    for (std::size_t j = 1; j <= p; ++j) {
      r = _mm256_fnmadd_pd(hset(phi[j - 1]), _mm256_loadu_pd(z + t - j), r);
    }
    _mm256_storeu_pd(out + i, _mm256_mul_pd(r, inv_omega));
  }
  for (std::size_t i = main; i < m; ++i) {
    const std::size_t t = p + i;
    double r = z[t];
    for (std::size_t j = 1; j <= p; ++j) r -= phi[j - 1] * z[t - j];
    out[i] = r / omega;
  }
}

}  // namespace

const Kernels& avx2() {
  static const Kernels k{
      "avx2",      tau_avx2, sum_log_jacobian_avx2, sum_sq_avx2,
      dot_avx2,    standardize_avx2, ar_residuals_avx2,
  };
  return k;
}

}  // namespace tghar::kernels
