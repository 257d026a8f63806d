#include "metais/probmodel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace metais {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal_quantile: u must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

Marginal::Marginal(MarginalKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("Marginal: parameters must be finite");
  switch (kind) {
    case MarginalKind::normal:
      if (!(b > 0.0)) throw std::invalid_argument("Marginal: standard deviation must be > 0");
      break;
    case MarginalKind::lognormal:
      if (!(b > 0.0)) throw std::invalid_argument("Marginal: standard deviation must be > 0");
      if (!(a > 0.0)) throw std::invalid_argument("Marginal: lognormal mean must be > 0");
      zeta_ = std::sqrt(std::log1p((b / a) * (b / a)));
      lambda_ = std::log(a) - 0.5 * zeta_ * zeta_;
      break;
    case MarginalKind::uniform:
      if (!(a < b)) throw std::invalid_argument("Marginal: uniform lower bound must be below upper bound");
      break;
  }
}

Marginal Marginal::normal(double mean, double std_dev) { return {MarginalKind::normal, mean, std_dev}; }
Marginal Marginal::lognormal(double mean, double std_dev) { return {MarginalKind::lognormal, mean, std_dev}; }
Marginal Marginal::uniform(double lower, double upper) { return {MarginalKind::uniform, lower, upper}; }

double Marginal::mean() const noexcept {
  if (kind_ == MarginalKind::uniform) return 0.5 * (a_ + b_);
  if (kind_ == MarginalKind::lognormal) return std::exp(lambda_ + 0.5 * zeta_ * zeta_);
  return a_;
}

double Marginal::std_dev() const noexcept {
  if (kind_ == MarginalKind::uniform) return (b_ - a_) / std::sqrt(12.0);
  if (kind_ == MarginalKind::lognormal) return mean() * std::sqrt(std::expm1(zeta_ * zeta_));
  return b_;
}

double Marginal::log_pdf(double x) const noexcept {
  switch (kind_) {
    case MarginalKind::normal: {
      const double z = (x - a_) / b_;
      return -0.5 * z * z - std::log(b_) - kHalfLog2Pi;
    }
    case MarginalKind::lognormal: {
      if (!(x > 0.0)) return kNegInf;
      const double lx = std::log(x);
      const double z = (lx - lambda_) / zeta_;
      return -0.5 * z * z - lx - std::log(zeta_) - kHalfLog2Pi;
    }
    case MarginalKind::uniform:
      return (x >= a_ && x <= b_) ? -std::log(b_ - a_) : kNegInf;
  }
  return kNegInf;
}

double Marginal::pdf(double x) const noexcept { return std::exp(log_pdf(x)); }

double Marginal::cdf(double x) const noexcept {
  switch (kind_) {
    case MarginalKind::normal:
      return normal_cdf((x - a_) / b_);
    case MarginalKind::lognormal:
      return x > 0.0 ? normal_cdf((std::log(x) - lambda_) / zeta_) : 0.0;
    case MarginalKind::uniform:
      return x <= a_ ? 0.0 : (x >= b_ ? 1.0 : (x - a_) / (b_ - a_));
  }
  return 0.0;
}

double Marginal::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("Marginal::quantile: u must lie in (0, 1)");
  switch (kind_) {
    case MarginalKind::normal:
      return a_ + b_ * normal_quantile(u);
    case MarginalKind::lognormal:
      return std::exp(lambda_ + zeta_ * normal_quantile(u));
    case MarginalKind::uniform:
      return a_ + (b_ - a_) * u;
  }
  return 0.0;
}

double Marginal::sample(Rng& rng) const {
  switch (kind_) {
    case MarginalKind::normal:
      return std::normal_distribution<double>(a_, b_)(rng);
    case MarginalKind::lognormal:
      return std::exp(std::normal_distribution<double>(lambda_, zeta_)(rng));
    case MarginalKind::uniform:
      return std::uniform_real_distribution<double>(a_, b_)(rng);
  }
  return 0.0;
}

ProbabilisticModel::ProbabilisticModel(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw std::invalid_argument("ProbabilisticModel: at least one marginal required");
}

double ProbabilisticModel::log_pdf(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionError("ProbabilisticModel::log_pdf: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += marginals_[i].log_pdf(x[i]);
    if (s == kNegInf) return s;
  }
  return s;
}

double ProbabilisticModel::pdf(std::span<const double> x) const { return std::exp(log_pdf(x)); }

PointSet ProbabilisticModel::sample(std::size_t count, Rng& rng) const {
  PointSet out(dim(), count);
  for (std::size_t i = 0; i < count; ++i) {
    auto row = out[i];
    for (std::size_t k = 0; k < dim(); ++k) row[k] = marginals_[k].sample(rng);
  }
  return out;
}

std::vector<double> ProbabilisticModel::std_devs() const {
  std::vector<double> out;
  out.reserve(dim());
  for (const auto& m : marginals_) out.push_back(m.std_dev());
  return out;
}

}  // namespace metais
