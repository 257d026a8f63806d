#include "metais/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metais {

double classification_probability(const Prediction& p, double sigma_tol) noexcept {
  double pi;
  if (p.std_dev <= sigma_tol || p.std_dev <= 0.0)
    pi = p.mean <= 0.0 ? 1.0 : 0.0;
  else
    pi = normal_cdf(-p.mean / p.std_dev);
  return std::clamp(pi, kPiFloor, kPiCeiling);
}

double u_criterion(const Prediction& p) noexcept {
  if (!(p.std_dev > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(p.mean / p.std_dev);
}

double u_criterion(const Surrogate& model, std::span<const double> x) { return u_criterion(model.predict(x)); }

double ClassificationFunction::operator()(std::span<const double> x) const {
  return from_prediction(surrogate_->predict(x));
}

double ClassificationFunction::from_prediction(const Prediction& p) const noexcept {
  return classification_probability(p, surrogate_->sigma_tolerance());
}

std::vector<double> ClassificationFunction::batch(const PointSet& xs) const {
  const auto preds = surrogate_->predict_batch(xs);
  std::vector<double> out(preds.size());
  std::transform(preds.begin(), preds.end(), out.begin(), [&](const Prediction& p) { return from_prediction(p); });
  return out;
}

double InstrumentalDensity::log_density(std::span<const double> x) const {
  const double lf = inputs_->log_pdf(x);
  if (lf == -std::numeric_limits<double>::infinity()) return lf;
  return std::log((*classification_)(x)) + lf;
}

}  // namespace metais
