// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "hfjump/kernels.hpp"

namespace hfjump::kernels {
namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void weighted_window_avx2(const double* x, std::size_t n_out, const double* w, std::size_t wlen,
                          double* out) {
  std::size_t i = 0;
  // Eight outputs per pass; each weight is broadcast once and applied to two
  // overlapping loads.
  for (; i + 8 <= n_out; i += 8) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    const double* base = x + i;
    for (std::size_t j = 0; j < wlen; ++j) {
      const __m256d wj = _mm256_set1_pd(w[j]);
      acc0 = _mm256_fmadd_pd(wj, _mm256_loadu_pd(base + j), acc0);
      acc1 = _mm256_fmadd_pd(wj, _mm256_loadu_pd(base + j + 4), acc1);
    }
    _mm256_storeu_pd(out + i, acc0);
    _mm256_storeu_pd(out + i + 4, acc1);
  }
  for (; i + 4 <= n_out; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < wlen; ++j)
      acc = _mm256_fmadd_pd(_mm256_set1_pd(w[j]), _mm256_loadu_pd(x + i + j), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n_out; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < wlen; ++j) acc = std::fma(w[j], x[i + j], acc);
    out[i] = acc;
  }
}

double truncated_sum_squares_avx2(const double* x, std::size_t n, double threshold) {
  const __m256d thr = _mm256_set1_pd(threshold);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d v0 = _mm256_loadu_pd(x + i);
    __m256d v1 = _mm256_loadu_pd(x + i + 4);
    v0 = _mm256_and_pd(v0, _mm256_cmp_pd(abs_pd(v0), thr, _CMP_LE_OQ));
    v1 = _mm256_and_pd(v1, _mm256_cmp_pd(abs_pd(v1), thr, _CMP_LE_OQ));
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    if (std::fabs(x[i]) <= threshold) acc += x[i] * x[i];
  }
  return acc;
}

double truncated_lagged_abs_product_avx2(const double* x, std::size_t n_pairs, std::size_t lag,
                                         double threshold) {
  const __m256d thr = _mm256_set1_pd(threshold);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  const double* y = x + lag;
  std::size_t i = 0;
  for (; i + 8 <= n_pairs; i += 8) {
    __m256d a0 = abs_pd(_mm256_loadu_pd(x + i));
    __m256d a1 = abs_pd(_mm256_loadu_pd(x + i + 4));
    __m256d b0 = abs_pd(_mm256_loadu_pd(y + i));
    __m256d b1 = abs_pd(_mm256_loadu_pd(y + i + 4));
    a0 = _mm256_and_pd(a0, _mm256_cmp_pd(a0, thr, _CMP_LE_OQ));
    a1 = _mm256_and_pd(a1, _mm256_cmp_pd(a1, thr, _CMP_LE_OQ));
    b0 = _mm256_and_pd(b0, _mm256_cmp_pd(b0, thr, _CMP_LE_OQ));
    b1 = _mm256_and_pd(b1, _mm256_cmp_pd(b1, thr, _CMP_LE_OQ));
    acc0 = _mm256_fmadd_pd(a0, b0, acc0);
    acc1 = _mm256_fmadd_pd(a1, b1, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n_pairs; ++i) {
    const double a = std::fabs(x[i]);
    const double b = std::fabs(y[i]);
    if (a <= threshold && b <= threshold) acc += a * b;
  }
  return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{weighted_window_avx2, truncated_sum_squares_avx2,
                             truncated_lagged_abs_product_avx2, dot_avx2};
}

}  // namespace hfjump::kernels
