#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "metais/estimate.hpp"
#include "metais/external.hpp"
#include "metais/probmodel.hpp"
#include "metais/types.hpp"

namespace metais {

/// b - x2 - kappa (x1 - e)^2
double parabola(std::span<const double> x, double b = 5.0, double kappa = 0.5, double e = 0.1);
/// (n + a sigma sqrt(n)) - sum x_i
double rackwitz(std::span<const double> x, double a = 3.0, double sigma = 0.2);
/// beta0 - x1
double linear(std::span<const double> x, double beta0);

enum class LimitStateKind { parabola, rackwitz, linear, external };

/// Limit state with a call counter and a cache keyed on the exact coordinate bits.
///
/// Copies share the counter and the cache. Each distinct point reaches the
/// underlying function once while caching is on; with caching off every
/// point is a call.
class LimitState {
 public:
  static LimitState parabola(double b = 5.0, double kappa = 0.5, double e = 0.1);
  static LimitState rackwitz(double a = 3.0, double sigma = 0.2);
  static LimitState linear(double beta0);
  static LimitState external(std::string command, std::chrono::milliseconds timeout = kDefaultExternalTimeout);

  LimitStateKind kind() const noexcept { return state_->kind; }
  const std::vector<double>& parameters() const noexcept { return state_->params; }
  const std::string& command() const noexcept { return state_->command; }

  double operator()(std::span<const double> x) const;
  std::vector<double> operator()(const PointSet& xs) const;

  std::size_t calls() const noexcept { return state_->calls.load(); }
  void reset_calls() noexcept { state_->calls = 0; }
  void set_caching(bool on);
  bool caching() const noexcept { return state_->caching.load(); }
  void clear_cache();

  /// Batch function sharing this state.
  BatchFunction as_function() const;

 private:
  struct State {
    LimitStateKind kind;
    std::vector<double> params;
    std::string command;
    std::chrono::milliseconds timeout{kDefaultExternalTimeout};
    std::atomic<std::size_t> calls{0};
    std::atomic<bool> caching{true};
    mutable std::mutex mutex;
    std::unordered_map<std::string, double> cache;
  };
  explicit LimitState(std::shared_ptr<State> s) : state_(std::move(s)) {}
  std::vector<double> evaluate_raw(const PointSet& xs) const;

  std::shared_ptr<State> state_;
};

/// Fixed-size crude Monte Carlo reference (n >= 1e4).
Estimate oracle_pf(const BatchFunction& g, const ProbabilisticModel& model, std::size_t n, Rng& rng);

}  // namespace metais
