#pragma once

// Data-parallel inner loops shared by the kriging predictor and K-means.
//
// Every level produces bitwise-identical results: the scalar reference
// reproduces the exact lane order and reduction tree of the vector code.

#include <cstddef>
#include <span>
#include <string_view>

namespace metais::simd {

enum class Level { scalar, avx2, neon };

std::string_view to_string(Level level);
bool supported(Level level);
Level best_supported();

/// Level used by the dispatching entry points. Initialized from METAIS_SIMD
/// (scalar|avx2|neon|auto) or the best supported level.
Level active();
/// Throws std::invalid_argument if the level is not supported on this CPU.
void set_active(Level level);

/// out[i] = sum_k ((query[k] - cols[k * stride + i]) * inv_scale[k])^2 for i < out.size().
void scaled_sq_dist(std::span<const double> query, const double* cols, std::size_t stride,
                    std::span<const double> inv_scale, std::span<double> out);

/// Dot product with a fixed 8-lane striped reduction.
double dot(std::span<const double> a, std::span<const double> b);

/// Explicit-level variants used by the equivalence tests.
void scaled_sq_dist(Level level, std::span<const double> query, const double* cols, std::size_t stride,
                    std::span<const double> inv_scale, std::span<double> out);
double dot(Level level, std::span<const double> a, std::span<const double> b);

namespace detail {

struct KernelTable {
  Level level;
  void (*scaled_sq_dist)(const double* query, std::size_t dim, const double* cols, std::size_t stride,
                         const double* inv_scale, double* out, std::size_t count);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();
const KernelTable* avx2_kernels();  // nullptr when not compiled in
const KernelTable* neon_kernels();

}  // namespace detail
}  // namespace metais::simd
