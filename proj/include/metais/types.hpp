#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace metais {

using Rng = std::mt19937_64;

/// Independent stream derived from a master seed; streams with distinct ids do not overlap in practice.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Row-major set of points sharing one dimension.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::size_t count) : dim_(dim), data_(dim * count, 0.0) {}
  PointSet(std::size_t dim, std::initializer_list<std::initializer_list<double>> rows) : dim_(dim) {
    for (const auto& r : rows) push_back(std::vector<double>(r));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> x) {
    if (x.size() != dim_) throw DimensionError("PointSet::push_back: dimension mismatch");
    data_.insert(data_.end(), x.begin(), x.end());
  }
  void append(const PointSet& other) {
    if (other.dim_ != dim_) throw DimensionError("PointSet::append: dimension mismatch");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  }
  void reserve(std::size_t count) { data_.reserve(count * dim_); }

  const std::vector<double>& flat() const noexcept { return data_; }
  std::vector<double>& flat() noexcept { return data_; }

  /// Column-major copy (coordinate k of all points contiguous), the layout the SIMD kernels consume.
  std::vector<double> columns() const {
    const std::size_t m = size();
    std::vector<double> out(m * dim_);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < dim_; ++k) out[k * m + i] = data_[i * dim_ + k];
    return out;
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Limit-state function evaluated on a batch of points, one value per point.
using BatchFunction = std::function<std::vector<double>(const PointSet&)>;

}  // namespace metais
