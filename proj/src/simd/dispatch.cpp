#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "metais/simd.hpp"

namespace metais::simd {
namespace detail {
#ifndef METAIS_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#ifndef METAIS_HAVE_NEON
const KernelTable* neon_kernels() { return nullptr; }
#endif
}  // namespace detail

namespace {

const detail::KernelTable* table_for(Level level) {
  switch (level) {
    case Level::scalar:
      return &detail::scalar_kernels();
    case Level::avx2:
      return detail::avx2_kernels();
    case Level::neon:
      return detail::neon_kernels();
  }
  return nullptr;
}

bool cpu_has(Level level) {
  switch (level) {
    case Level::scalar:
      return true;
    case Level::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Level::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const detail::KernelTable* initial_table() {
  Level level = best_supported();
  if (const char* env = std::getenv("METAIS_SIMD")) {
    const std::string want(env);
    if (want == "scalar") level = Level::scalar;
    else if (want == "avx2" && supported(Level::avx2)) level = Level::avx2;
    else if (want == "neon" && supported(Level::neon)) level = Level::neon;
  }
  return table_for(level);
}

std::atomic<const detail::KernelTable*>& active_table() {
  static std::atomic<const detail::KernelTable*> table{initial_table()};
  return table;
}

const detail::KernelTable& checked(Level level) {
  if (!supported(level)) throw std::invalid_argument("simd level not supported: " + std::string(to_string(level)));
  return *table_for(level);
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::scalar:
      return "scalar";
    case Level::avx2:
      return "avx2";
    case Level::neon:
      return "neon";
  }
  return "unknown";
}

bool supported(Level level) { return table_for(level) != nullptr && cpu_has(level); }

Level best_supported() {
  if (supported(Level::avx2)) return Level::avx2;
  if (supported(Level::neon)) return Level::neon;
  return Level::scalar;
}

Level active() { return active_table().load(std::memory_order_relaxed)->level; }

void set_active(Level level) { active_table().store(&checked(level), std::memory_order_relaxed); }

void scaled_sq_dist(std::span<const double> query, const double* cols, std::size_t stride,
                    std::span<const double> inv_scale, std::span<double> out) {
  active_table().load(std::memory_order_relaxed)
      ->scaled_sq_dist(query.data(), query.size(), cols, stride, inv_scale.data(), out.data(), out.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active_table().load(std::memory_order_relaxed)->dot(a.data(), b.data(), a.size());
}

void scaled_sq_dist(Level level, std::span<const double> query, const double* cols, std::size_t stride,
                    std::span<const double> inv_scale, std::span<double> out) {
  checked(level).scaled_sq_dist(query.data(), query.size(), cols, stride, inv_scale.data(), out.data(),
                                out.size());
}

double dot(Level level, std::span<const double> a, std::span<const double> b) {
  return checked(level).dot(a.data(), b.data(), a.size());
}

}  // namespace metais::simd
