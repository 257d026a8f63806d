#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "metais/types.hpp"

namespace metais {

/// Unnormalized log-density; -inf outside the support.
using LogDensity = std::function<double(std::span<const double>)>;

struct SliceSamplerConfig {
  /// Initial bracket width per coordinate; empty means 1 everywhere.
  std::vector<double> widths;
  std::size_t max_stepout = 32;
  std::size_t burn_in = 100;
  std::size_t thinning = 10;
  std::size_t chains = 4;
};

/// Stepping out hit max_stepout while the bracket end was still inside the slice.
class SliceWidthError : public Error {
 public:
  using Error::Error;
};

struct ChainState {
  std::vector<double> current;
  double log_density = 0.0;  // target at `current`
  Rng rng;
};

ChainState make_chain_state(const LogDensity& target, std::span<const double> start, Rng rng);

/// One sweep of coordinate-wise slice sampling (stepping out, then shrinkage).
/// Each coordinate draws a fresh slice level log u = log p(x) + log U.
void slice_step(ChainState& state, const LogDensity& target, const SliceSamplerConfig& config);

/// Pool of independent slice-sampling chains with burn-in and thinning.
///
/// Chain c starts from the c-th valid seed (cycling). Successive draws
/// continue the same chains; points are pooled round-robin across chains, so
/// draw(a) followed by draw(b) equals draw(a + b). Output depends only on the
/// seeds, the configuration and `seed`, whether or not chains run in parallel.
class SliceSampler {
 public:
  SliceSampler(LogDensity target, const PointSet& seeds, SliceSamplerConfig config, std::uint64_t seed);

  PointSet draw(std::size_t count);
  std::size_t chains() const noexcept { return states_.size(); }
  std::size_t dim() const noexcept { return dim_; }

 private:
  LogDensity target_;
  SliceSamplerConfig config_;
  std::size_t dim_;
  std::vector<ChainState> states_;
  bool burned_in_ = false;
  std::size_t next_chain_ = 0;
};

PointSet run_chain(const LogDensity& target, const PointSet& seeds, const SliceSamplerConfig& config,
                   std::size_t count, std::uint64_t seed);

/// min(4, number of seeds)
inline std::size_t default_chain_count(std::size_t seeds) { return seeds < 4 ? (seeds == 0 ? 1 : seeds) : 4; }

}  // namespace metais
