#include <arm_neon.h>

#include "metais/simd.hpp"

namespace metais::simd::detail {
namespace {

void scaled_sq_dist_neon(const double* query, std::size_t dim, const double* cols, std::size_t stride,
                         const double* inv_scale, double* out, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      const float64x2_t q = vdupq_n_f64(query[k]);
      const float64x2_t s = vdupq_n_f64(inv_scale[k]);
      const double* col = cols + k * stride + i;
      const float64x2_t d0 = vmulq_f64(vsubq_f64(q, vld1q_f64(col)), s);
      const float64x2_t d1 = vmulq_f64(vsubq_f64(q, vld1q_f64(col + 2)), s);
      acc0 = vaddq_f64(acc0, vmulq_f64(d0, d0));
      acc1 = vaddq_f64(acc1, vmulq_f64(d1, d1));
    }
    vst1q_f64(out + i, acc0);
    vst1q_f64(out + i + 2, acc1);
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

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s01 = vdupq_n_f64(0.0), s23 = vdupq_n_f64(0.0);
  float64x2_t s45 = vdupq_n_f64(0.0), s67 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s01 = vaddq_f64(s01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    s23 = vaddq_f64(s23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    s45 = vaddq_f64(s45, vmulq_f64(vld1q_f64(a + i + 4), vld1q_f64(b + i + 4)));
    s67 = vaddq_f64(s67, vmulq_f64(vld1q_f64(a + i + 6), vld1q_f64(b + i + 6)));
  }
  const float64x2_t v01 = vaddq_f64(s01, s45);
  const float64x2_t v23 = vaddq_f64(s23, s67);
  double r = (vgetq_lane_f64(v01, 0) + vgetq_lane_f64(v01, 1)) +
             (vgetq_lane_f64(v23, 0) + vgetq_lane_f64(v23, 1));
  for (; i < n; ++i) r = r + a[i] * b[i];
  return r;
}

constexpr KernelTable kNeon{Level::neon, &scaled_sq_dist_neon, &dot_neon};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace metais::simd::detail
