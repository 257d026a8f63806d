#pragma once

#include <span>
#include <vector>

#include "metais/kriging.hpp"
#include "metais/probmodel.hpp"

namespace metais {

/// Lower bound on the classification probability (machine precision).
inline constexpr double kPiFloor = 1e-16;
/// Upper bound, symmetric to the floor, so that log(1 - pi) stays finite.
inline constexpr double kPiCeiling = 1.0 - 1e-16;

/// Probability that the Gaussian prediction is nonpositive, clipped to [kPiFloor, kPiCeiling].
/// A standard deviation at or below `sigma_tol` is an interpolated point: 1 if mean <= 0, else 0.
double classification_probability(const Prediction& p, double sigma_tol) noexcept;

/// |mean / std_dev|; +inf when the prediction is exact.
double u_criterion(const Prediction& p) noexcept;
double u_criterion(const Surrogate& model, std::span<const double> x);

/// Probability, under the surrogate's epistemic uncertainty, that g(x) <= 0.
class ClassificationFunction {
 public:
  explicit ClassificationFunction(const Surrogate& surrogate) : surrogate_(&surrogate) {}

  double operator()(std::span<const double> x) const;
  double from_prediction(const Prediction& p) const noexcept;
  std::vector<double> batch(const PointSet& xs) const;

  const Surrogate& surrogate() const noexcept { return *surrogate_; }

 private:
  const Surrogate* surrogate_;
};

/// Unnormalized quasi-optimal importance density pi(x) f_X(x), in log form.
class InstrumentalDensity {
 public:
  InstrumentalDensity(const ClassificationFunction& classification, const ProbabilisticModel& inputs)
      : classification_(&classification), inputs_(&inputs) {}

  /// log pi(x) + log f_X(x); -inf outside the support of f_X.
  double log_density(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return log_density(x); }

  const ClassificationFunction& classification() const noexcept { return *classification_; }
  const ProbabilisticModel& inputs() const noexcept { return *inputs_; }

 private:
  const ClassificationFunction* classification_;
  const ProbabilisticModel* inputs_;
};

}  // namespace metais
