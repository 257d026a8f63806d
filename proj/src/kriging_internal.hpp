#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "metais/kriging.hpp"

namespace metais::detail {

struct GlsFactor {
  double nugget = 0.0;
  Eigen::MatrixXd chol;       // lower factor of R + nugget I
  Eigen::MatrixXd linv_f;     // L^-1 F
  Eigen::MatrixXd gram_chol;  // lower factor of F' R^-1 F
  Eigen::VectorXd beta;
  Eigen::VectorXd linv_resid;  // L^-1 (y - F beta)
  double sigma2 = 0.0;
  double log_det = 0.0;
};

/// Correlation matrix without nugget; `points` row-major, `cols` the same points dimension-major.
Eigen::MatrixXd correlation_matrix(const PointSet& points, const std::vector<double>& cols,
                                   std::span<const double> inv_lengths);

Eigen::MatrixXd regression_matrix(const PointSet& points, TrendBasis basis);

/// Cholesky + GLS. With `nugget` unset, escalates from the initial nugget; returns nullopt on failure.
std::optional<GlsFactor> factorize(const Eigen::MatrixXd& base_corr, const Eigen::VectorXd& y,
                                   const Eigen::MatrixXd& F, std::optional<double> nugget);

}  // namespace metais::detail
