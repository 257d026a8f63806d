#include "metais/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace metais {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double uniform_open(Rng& rng) {
  // (0, 1]
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

void run_parallel(std::size_t tasks, const std::function<void(std::size_t)>& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (hw <= 1 || tasks <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) fn(t);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < tasks; ++t) pool.emplace_back(fn, t);
}

}  // namespace

ChainState make_chain_state(const LogDensity& target, std::span<const double> start, Rng rng) {
  ChainState s{{start.begin(), start.end()}, target(start), std::move(rng)};
  if (!(s.log_density > kNegInf)) throw std::invalid_argument("make_chain_state: start point has zero density");
  return s;
}

void slice_step(ChainState& state, const LogDensity& target, const SliceSamplerConfig& config) {
  const std::size_t n = state.current.size();
  if (!(state.log_density > kNegInf)) throw std::invalid_argument("slice_step: current point has zero density");
  std::vector<double> x = state.current;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t k = 0; k < n; ++k) {
    const double w = config.widths.empty() ? 1.0 : config.widths[k];
    const double x0 = x[k];
    const double level = state.log_density + std::log(uniform_open(state.rng));
    auto eval_at = [&](double t) {
      x[k] = t;
      return target(x);
    };

    double left = x0 - w * unit(state.rng);
    double right = left + w;
    std::size_t steps = 0;
    while (eval_at(left) > level) {
      if (++steps > config.max_stepout)
        throw SliceWidthError("slice_step: stepping out exceeded max_stepout; bracket width too small");
      left -= w;
    }
    steps = 0;
    while (eval_at(right) > level) {
      if (++steps > config.max_stepout)
        throw SliceWidthError("slice_step: stepping out exceeded max_stepout; bracket width too small");
      right += w;
    }

    for (;;) {
      const double t = left + unit(state.rng) * (right - left);
      const double lp = eval_at(t);
      if (lp >= level && lp > kNegInf) {
        state.log_density = lp;
        break;
      }
      if (t < x0)
        left = t;
      else
        right = t;
      if (!(right - left > 1e-14 * std::max(1.0, std::abs(x0)))) {
        // interval collapsed onto the current point, which is always on the slice
        x[k] = x0;
        break;
      }
    }
  }
  state.current = std::move(x);
}

SliceSampler::SliceSampler(LogDensity target, const PointSet& seeds, SliceSamplerConfig config, std::uint64_t seed)
    : target_(std::move(target)), config_(std::move(config)), dim_(seeds.dim()) {
  if (config_.thinning < 1) throw std::invalid_argument("SliceSampler: thinning must be >= 1");
  if (config_.chains < 1) throw std::invalid_argument("SliceSampler: chains must be >= 1");
  if (!config_.widths.empty() && config_.widths.size() != dim_)
    throw DimensionError("SliceSampler: one width per dimension required");
  for (double w : config_.widths)
    if (!(w > 0.0)) throw std::invalid_argument("SliceSampler: widths must be > 0");

  std::vector<std::pair<std::size_t, double>> valid;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const double lp = target_(seeds[i]);
    if (lp > kNegInf) valid.emplace_back(i, lp);
  }
  if (valid.empty()) throw Error("SliceSampler: no seed point with nonzero target density");

  for (std::size_t c = 0; c < config_.chains; ++c) {
    const auto& [idx, lp] = valid[c % valid.size()];
    const auto start = seeds[idx];
    states_.push_back(ChainState{{start.begin(), start.end()}, lp, make_rng(seed, c)});
  }
}

PointSet SliceSampler::draw(std::size_t count) {
  if (count == 0) throw std::invalid_argument("SliceSampler::draw: count must be >= 1");
  const std::size_t chains = states_.size();
  if (!burned_in_) {
    run_parallel(chains, [&](std::size_t c) {
      for (std::size_t b = 0; b < config_.burn_in; ++b) slice_step(states_[c], target_, config_);
    });
    burned_in_ = true;
  }

  std::vector<std::size_t> per_chain(chains, 0);
  for (std::size_t j = 0; j < count; ++j) ++per_chain[(next_chain_ + j) % chains];

  std::vector<PointSet> produced(chains, PointSet(dim_));
  run_parallel(chains, [&](std::size_t c) {
    produced[c].reserve(per_chain[c]);
    for (std::size_t s = 0; s < per_chain[c]; ++s) {
      for (std::size_t t = 0; t < config_.thinning; ++t) slice_step(states_[c], target_, config_);
      produced[c].push_back(states_[c].current);
    }
  });

  PointSet out(dim_);
  out.reserve(count);
  std::vector<std::size_t> cursor(chains, 0);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t c = (next_chain_ + j) % chains;
    out.push_back(produced[c][cursor[c]++]);
  }
  next_chain_ = (next_chain_ + count) % chains;
  return out;
}

PointSet run_chain(const LogDensity& target, const PointSet& seeds, const SliceSamplerConfig& config,
                   std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("run_chain: count must be >= 1");
  SliceSampler sampler(target, seeds, config, seed);
  return sampler.draw(count);
}

}  // namespace metais
