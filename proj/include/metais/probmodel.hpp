#pragma once

#include <span>
#include <vector>

#include "metais/types.hpp"

namespace metais {

enum class MarginalKind { normal, lognormal, uniform };

/// One-dimensional input distribution.
///
/// Normal and lognormal marginals are parameterized by the mean and standard
/// deviation of the variate itself; uniform marginals by their bounds. The
/// lognormal's underlying Gaussian parameters are derived by moment matching.
class Marginal {
 public:
  static Marginal normal(double mean, double std_dev);
  static Marginal lognormal(double mean, double std_dev);
  static Marginal uniform(double lower, double upper);

  MarginalKind kind() const noexcept { return kind_; }
  /// Mean (normal, lognormal) or lower bound (uniform).
  double param_a() const noexcept { return a_; }
  /// Standard deviation (normal, lognormal) or upper bound (uniform).
  double param_b() const noexcept { return b_; }

  double mean() const noexcept;
  double std_dev() const noexcept;

  /// Underlying Gaussian location and scale of a lognormal marginal.
  double log_location() const noexcept { return lambda_; }
  double log_scale() const noexcept { return zeta_; }

  double log_pdf(double x) const noexcept;
  double pdf(double x) const noexcept;
  double cdf(double x) const noexcept;
  /// Inverse CDF; throws std::domain_error unless 0 < u < 1.
  double quantile(double u) const;
  double sample(Rng& rng) const;

  friend bool operator==(const Marginal& l, const Marginal& r) noexcept {
    return l.kind_ == r.kind_ && l.a_ == r.a_ && l.b_ == r.b_;
  }

 private:
  Marginal(MarginalKind kind, double a, double b);

  MarginalKind kind_;
  double a_;
  double b_;
  double lambda_ = 0.0;
  double zeta_ = 0.0;
};

/// Joint distribution of independent marginals.
class ProbabilisticModel {
 public:
  explicit ProbabilisticModel(std::vector<Marginal> marginals);

  std::size_t dim() const noexcept { return marginals_.size(); }
  const std::vector<Marginal>& marginals() const noexcept { return marginals_; }

  /// Sum of marginal log-densities; -inf outside the support.
  double log_pdf(std::span<const double> x) const;
  double pdf(std::span<const double> x) const;
  PointSet sample(std::size_t count, Rng& rng) const;
  std::vector<double> std_devs() const;

 private:
  std::vector<Marginal> marginals_;
};

/// Standard normal CDF and its inverse.
double normal_cdf(double z) noexcept;
double normal_quantile(double u);

}  // namespace metais
