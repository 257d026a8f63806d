#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "metais/classify.hpp"
#include "metais/kriging.hpp"
#include "metais/mcmc.hpp"
#include "metais/probmodel.hpp"
#include "metais/types.hpp"

namespace metais {

struct Estimate {
  double value = 0.0;
  double std_dev = 0.0;
  /// std_dev / value, +inf when value is 0
  double cov = std::numeric_limits<double>::infinity();
  std::size_t n_samples = 0;
  std::size_t n_g_evals = 0;
  /// Crude Monte Carlo ended at its sample cap without observing a failure.
  bool zero_failures = false;
  /// Correction terms where a failure met a classification probability at the floor.
  std::size_t pathological_terms = 0;
};

struct MetaISResult {
  Estimate pf_eps;
  Estimate alpha_corr;
  Estimate pf;
  std::size_t doe_size = 0;
  std::size_t iterations = 0;
};

/// Fills cov from value and std_dev.
Estimate make_estimate(double value, double std_dev, std::size_t n_samples, std::size_t n_g_evals);

/// Sequential crude Monte Carlo: batches of `batch` samples until cov <= target_cov or n_max samples.
Estimate crude_mc(const BatchFunction& g, const ProbabilisticModel& model, double target_cov, std::size_t n_max,
                  std::size_t batch, Rng& rng);

struct InstrumentalSampler {
  std::function<PointSet(std::size_t, Rng&)> sample;
  std::function<double(std::span<const double>)> log_density;
};

/// Independent-marginal instrumental density.
InstrumentalSampler instrumental_from(const ProbabilisticModel& h);

class DominationError : public Error {
 public:
  using Error::Error;
};

/// Fixed-size importance sampling; throws DominationError where a sample has zero instrumental density.
Estimate importance_sampling(const BatchFunction& g, const ProbabilisticModel& model, const InstrumentalSampler& h,
                             std::size_t n, Rng& rng);

/// Mean classification probability under f_X. No limit-state calls.
Estimate augmented_pf(const ClassificationFunction& cf, const ProbabilisticModel& model, double target_cov,
                      std::size_t n_max, std::size_t batch, Rng& rng);

/// Mean of 1{g <= 0} / pi over slice-sampling draws from the quasi-optimal density.
Estimate correction_factor(const BatchFunction& g, const ClassificationFunction& cf, const InstrumentalDensity& hstar,
                           const SliceSamplerConfig& mcmc, const PointSet& seeds, double target_cov,
                           std::size_t n_max, std::size_t batch, std::uint64_t seed);

/// sqrt(d1^2 + d2^2 + d1^2 d2^2), the CoV of a product of independent estimators.
double product_cov(double cov1, double cov2) noexcept;
/// First-order approximation sqrt(d1^2 + d2^2).
double product_cov_approx(double cov1, double cov2) noexcept;

/// Product estimate with the exact CoV; sample and call counts are summed.
Estimate combine(const Estimate& pf_eps, const Estimate& alpha_corr);

/// Leave-one-out correction factor on the design points (all of them, or `subset`).
double loo_correction_factor(const KrigingModel& model, const std::optional<std::vector<std::size_t>>& subset = {});

}  // namespace metais
