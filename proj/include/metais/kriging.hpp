#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "metais/types.hpp"

namespace metais {

enum class TrendKind { constant, linear };

/// Regression basis of the kriging trend: [1] or [1, x_1, ..., x_n].
class TrendBasis {
 public:
  constexpr TrendBasis() = default;
  constexpr explicit TrendBasis(TrendKind kind) : kind_(kind) {}
  static constexpr TrendBasis constant() { return TrendBasis(TrendKind::constant); }
  static constexpr TrendBasis linear() { return TrendBasis(TrendKind::linear); }

  constexpr TrendKind kind() const noexcept { return kind_; }
  constexpr std::size_t size(std::size_t dim) const noexcept { return kind_ == TrendKind::constant ? 1 : dim + 1; }
  void eval(std::span<const double> x, std::span<double> out) const noexcept;

  friend constexpr bool operator==(TrendBasis, TrendBasis) = default;

 private:
  TrendKind kind_ = TrendKind::constant;
};

/// Points where the limit state was evaluated, with the observed values.
class DesignOfExperiments {
 public:
  explicit DesignOfExperiments(std::size_t dim) : points_(dim) {}

  /// Throws std::invalid_argument for a point that duplicates an existing one.
  void add(std::span<const double> x, double y);

  std::size_t size() const noexcept { return observations_.size(); }
  std::size_t dim() const noexcept { return points_.dim(); }
  const PointSet& points() const noexcept { return points_; }
  const std::vector<double>& observations() const noexcept { return observations_; }
  std::span<const double> point(std::size_t i) const { return points_[i]; }
  double observation(std::size_t i) const { return observations_[i]; }

  DesignOfExperiments without(std::size_t i) const;

 private:
  PointSet points_;
  std::vector<double> observations_;
};

struct Prediction {
  double mean = 0.0;
  double std_dev = 0.0;
};

/// Anything returning a Gaussian prediction of the limit state.
class Surrogate {
 public:
  virtual ~Surrogate() = default;
  virtual std::size_t dim() const = 0;
  virtual Prediction predict(std::span<const double> x) const = 0;
  virtual std::vector<Prediction> predict_batch(const PointSet& xs) const;
  /// Standard deviations at or below this value are treated as exact interpolation.
  virtual double sigma_tolerance() const { return 0.0; }
};

class SingularModelError : public Error {
 public:
  SingularModelError(const std::string& what, std::size_t first, std::size_t second)
      : Error(what), first_(first), second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

struct LengthBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// [1e-2, 1e2] times the per-dimension range of the design points.
LengthBounds default_length_bounds(const DesignOfExperiments& doe);

struct MleOptions {
  std::optional<LengthBounds> bounds;
  /// Extra start point, typically the previous optimum.
  std::vector<double> warm_start;
  /// Objective evaluation budget of the local searches; 0 picks a size-dependent default.
  std::size_t max_evaluations = 0;
};

enum class LooMethod {
  refit,        ///< rebuild the reduced system for every left-out point
  closed_form,  ///< bordered-system inverse identities on the full factorization
};

/// squared-exponential correlation exp(-sum((dx_k / l_k)^2))
double correlation(std::span<const double> dx, std::span<const double> lengths);

/// Gaussian-process surrogate with squared-exponential correlation.
///
/// The correlation matrix carries a relative nugget (1e-8, escalated by
/// factors of 10 up to 1e-4 when the Cholesky factorization fails). The
/// process variance is the profiled maximum-likelihood estimate. Immutable
/// once fitted.
class KrigingModel final : public Surrogate {
 public:
  static constexpr double kInitialNugget = 1e-8;
  static constexpr double kMaxNugget = 1e-4;

  static KrigingModel fit(const DesignOfExperiments& doe, TrendBasis basis, std::vector<double> lengths);
  /// Same with the process variance fixed instead of estimated.
  static KrigingModel fit(const DesignOfExperiments& doe, TrendBasis basis, std::vector<double> lengths,
                          double process_variance);
  /// Profiled maximum likelihood over the correlation lengths (multistart compass search in log space).
  static KrigingModel fit_mle(const DesignOfExperiments& doe, TrendBasis basis, const MleOptions& options = {});

  std::size_t dim() const override { return doe_.dim(); }
  Prediction predict(std::span<const double> x) const override;
  std::vector<Prediction> predict_batch(const PointSet& xs) const override;
  double sigma_tolerance() const override;

  /// Prediction at design point i from the other m-1 points, lengths and
  /// process variance held fixed, trend re-estimated.
  Prediction loo_predict(std::size_t i, LooMethod method = LooMethod::closed_form) const;
  std::vector<Prediction> loo_predict_all(LooMethod method = LooMethod::closed_form) const;
  /// Mean squared leave-one-out residual.
  double press(LooMethod method = LooMethod::closed_form) const;

  const DesignOfExperiments& doe() const noexcept { return doe_; }
  TrendBasis basis() const noexcept { return basis_; }
  const std::vector<double>& lengths() const noexcept { return lengths_; }
  double process_variance() const noexcept { return sigma2_; }
  const std::vector<double>& beta() const noexcept { return beta_; }
  double nugget() const noexcept { return nugget_; }
  /// True when the observations carry no variation (zero process variance).
  bool degenerate() const noexcept { return degenerate_; }
  /// m log(sigma^2) + log det R, the quantity minimized by fit_mle.
  double likelihood_objective() const noexcept { return objective_; }

  /// GLS normal-equation residual F' R^-1 (y - F beta).
  std::vector<double> gls_residual() const;
  Eigen::MatrixXd regression_matrix() const;
  /// R including the nugget.
  Eigen::MatrixXd correlation_matrix() const;

 private:
  KrigingModel(const DesignOfExperiments& doe, TrendBasis basis) : doe_(doe), basis_(basis) {}

  static KrigingModel build(const DesignOfExperiments& doe, TrendBasis basis, std::vector<double> lengths,
                            std::optional<double> nugget, std::optional<double> variance);
  Prediction predict_into(std::span<const double> x, std::vector<double>& r, std::vector<double>& v) const;

  DesignOfExperiments doe_;
  TrendBasis basis_;
  std::size_t p_ = 1;
  std::vector<double> lengths_;
  std::vector<double> inv_lengths_;
  std::vector<double> cols_;     // design points, dimension-major (stride m)
  std::vector<double> chol_;     // lower Cholesky factor of R, row-major m x m
  std::vector<double> linv_f_;   // L^-1 F, column-major m x p
  Eigen::MatrixXd gram_chol_;    // lower Cholesky factor of F' R^-1 F
  std::vector<double> beta_;
  std::vector<double> alpha_;    // R^-1 (y - F beta)
  double sigma2_ = 0.0;
  double nugget_ = kInitialNugget;
  double objective_ = 0.0;
  bool degenerate_ = false;
};

}  // namespace metais
