#include "metais/simd.hpp"

namespace metais::simd::detail {
namespace {

void scaled_sq_dist_scalar(const double* query, std::size_t dim, const double* cols, std::size_t stride,
                           const double* inv_scale, double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double q = query[k];
    const double s = inv_scale[k];
    const double* col = cols + k * stride;
    for (std::size_t i = 0; i < count; ++i) {
      const double d = (q - col[i]) * s;
      out[i] = out[i] + d * d;
    }
  }
}

// Mirrors the vector reduction: eight striped partial sums, folded as
// (s0+s4, s1+s5, s2+s6, s3+s7), then ((v0+v1)+(v2+v3)), then the tail in order.
double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (std::size_t j = 0; j < 8; ++j) s[j] = s[j] + a[i + j] * b[i + j];
  double v[4];
  for (std::size_t j = 0; j < 4; ++j) v[j] = s[j] + s[j + 4];
  double r = (v[0] + v[1]) + (v[2] + v[3]);
  for (; i < n; ++i) r = r + a[i] * b[i];
  return r;
}

constexpr KernelTable kScalar{Level::scalar, &scaled_sq_dist_scalar, &dot_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace metais::simd::detail
