// Compiled with -mavx2. Never called unless the CPU reports AVX2 support.
#include <immintrin.h>

#include "metais/simd.hpp"

namespace metais::simd::detail {
namespace {

void scaled_sq_dist_avx2(const double* query, std::size_t dim, const double* cols, std::size_t stride,
                         const double* inv_scale, double* out, std::size_t count) {
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      const __m256d q = _mm256_set1_pd(query[k]);
      const __m256d s = _mm256_set1_pd(inv_scale[k]);
      const double* col = cols + k * stride + i;
      const __m256d d0 = _mm256_mul_pd(_mm256_sub_pd(q, _mm256_loadu_pd(col)), s);
      const __m256d d1 = _mm256_mul_pd(_mm256_sub_pd(q, _mm256_loadu_pd(col + 4)), s);
      acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
      acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
    }
    _mm256_storeu_pd(out + i, acc0);
    _mm256_storeu_pd(out + i + 4, acc1);
  }
  for (; i + 4 <= count; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      const __m256d d = _mm256_mul_pd(
          _mm256_sub_pd(_mm256_set1_pd(query[k]), _mm256_loadu_pd(cols + k * stride + i)),
          _mm256_set1_pd(inv_scale[k]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < count; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = (query[k] - cols[k * stride + i]) * inv_scale[k];
      acc = acc + d * d;
    }
    out[i] = acc;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    lo = _mm256_add_pd(lo, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    hi = _mm256_add_pd(hi, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  const __m256d v = _mm256_add_pd(lo, hi);
  const __m128d pair = _mm_hadd_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
  double r = _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
  for (; i < n; ++i) r = r + a[i] * b[i];
  return r;
}

constexpr KernelTable kAvx2{Level::avx2, &scaled_sq_dist_avx2, &dot_avx2};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace metais::simd::detail
