#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metais/kriging.hpp"
#include "metais/mcmc.hpp"
#include "metais/probmodel.hpp"
#include "metais/types.hpp"

namespace metais {

enum class RefinementStrategy {
  hstar_sampling,  ///< cluster a population drawn from the quasi-optimal density
  u_criterion,     ///< K smallest |mu/sigma| over an f_X population
};

struct RefinementConfig {
  std::size_t k_per_iter = 2;
  std::size_t population_size = 10000;
  std::size_t m_min = 30;
  std::size_t m_max = 1000;
  std::size_t max_g_evals = 10000;
  /// Unset means max(K, p + 2).
  std::optional<std::size_t> initial_doe_size;
  double loo_low = 0.5;
  double loo_high = 2.0;
  TrendBasis basis = TrendBasis::constant();
  RefinementStrategy strategy = RefinementStrategy::hstar_sampling;
  /// Sampler for the enrichment population; its thinning applies between population points.
  SliceSamplerConfig mcmc{{}, 32, 100, 1, 4};
};

struct IterationRecord {
  std::size_t m = 0;
  std::vector<double> lengths;
  double process_variance = 0.0;
  double alpha_loo = 0.0;
  std::size_t seed_count = 0;
  double wall_seconds = 0.0;
};

struct RefinementTrace {
  std::vector<IterationRecord> records;
};

enum class StopReason { converged, max_doe, budget };
std::string to_string(StopReason r);

struct RefinementResult {
  KrigingModel model;
  RefinementTrace trace;
  StopReason stop_reason;
  /// Limit-state evaluations requested by the loop (initial DOE included).
  std::size_t g_evals = 0;
  std::size_t iterations = 0;  ///< enrichment rounds performed
};

class RefinementError : public Error {
 public:
  RefinementError(const std::string& what, RefinementTrace trace) : Error(what), trace_(std::move(trace)) {}
  const RefinementTrace& trace() const noexcept { return trace_; }

 private:
  RefinementTrace trace_;
};

/// Latin hypercube in probability space (jittered strata, clipped to
/// [1e-4, 1 - 1e-4]) mapped through the marginal quantiles.
PointSet initial_doe(const ProbabilisticModel& model, std::size_t m0, Rng& rng);

/// Starting points for sampling the quasi-optimal density: design points
/// predicted in the failure domain, else the most failure-prone of 1e4 f_X
/// samples by mu/sigma.
PointSet hstar_seeds(const KrigingModel& model, const ProbabilisticModel& inputs, Rng& rng, std::size_t max_seeds = 64);

RefinementResult refine_loop(const BatchFunction& g, const ProbabilisticModel& model, const RefinementConfig& config,
                             Rng& rng);

}  // namespace metais
