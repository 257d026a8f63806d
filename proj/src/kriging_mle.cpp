// Profiled maximum-likelihood estimation of the correlation lengths.
//
// For fixed lengths the trend and process variance have closed forms, so the
// search runs over log-lengths only, minimizing m log(sigma^2) + log det R.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kriging_internal.hpp"
#include "metais/kriging.hpp"

namespace metais {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class ProfiledObjective {
 public:
  ProfiledObjective(const DesignOfExperiments& doe, TrendBasis basis)
      : doe_(doe),
        cols_(doe.points().columns()),
        F_(detail::regression_matrix(doe.points(), basis)),
        y_(Eigen::Map<const Eigen::VectorXd>(doe.observations().data(), static_cast<Eigen::Index>(doe.size()))) {}

  double operator()(const std::vector<double>& log_lengths) {
    ++evaluations_;
    std::vector<double> inv(log_lengths.size());
    for (std::size_t k = 0; k < inv.size(); ++k) inv[k] = std::exp(-log_lengths[k]);
    const auto factor = detail::factorize(detail::correlation_matrix(doe_.points(), cols_, inv), y_, F_, std::nullopt);
    if (!factor) return kInf;
    if (!(factor->sigma2 > 0.0)) return -kInf;
    return static_cast<double>(doe_.size()) * std::log(factor->sigma2) + factor->log_det;
  }

  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  const DesignOfExperiments& doe_;
  std::vector<double> cols_;
  Eigen::MatrixXd F_;
  Eigen::VectorXd y_;
  std::size_t evaluations_ = 0;
};

struct Candidate {
  std::vector<double> x;
  double f = kInf;
};

// Box-constrained compass search; opportunistic polling, step halved on a failed sweep.
template <class Objective>
Candidate compass_search(Objective& obj, Candidate start, const std::vector<double>& lo,
                         const std::vector<double>& hi, double step, double min_step, std::size_t budget) {
  std::size_t used = 0;
  Candidate best = std::move(start);
  while (step >= min_step && used < budget) {
    bool improved = false;
    for (std::size_t k = 0; k < best.x.size() && used < budget; ++k) {
      for (double dir : {1.0, -1.0}) {
        Candidate trial = best;
        trial.x[k] = std::clamp(best.x[k] + dir * step, lo[k], hi[k]);
        if (trial.x[k] == best.x[k]) continue;
        trial.f = obj(trial.x);
        ++used;
        if (trial.f < best.f) {
          best = std::move(trial);
          improved = true;
          break;
        }
        if (used >= budget) break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

std::vector<double> isotropic_point(const std::vector<double>& lo, const std::vector<double>& hi, double t) {
  std::vector<double> x(lo.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = lo[k] + t * (hi[k] - lo[k]);
  return x;
}

}  // namespace

KrigingModel KrigingModel::fit_mle(const DesignOfExperiments& doe, TrendBasis basis, const MleOptions& options) {
  const std::size_t n = doe.dim();
  const std::size_t p = basis.size(n);
  if (doe.size() < p + 1) throw std::invalid_argument("KrigingModel::fit_mle: need at least p + 1 design points");
  const LengthBounds bounds = options.bounds.value_or(default_length_bounds(doe));
  if (bounds.lower.size() != n || bounds.upper.size() != n)
    throw DimensionError("KrigingModel::fit_mle: bounds dimension mismatch");

  std::vector<double> lo(n), hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(bounds.lower[k] > 0.0) || !(bounds.lower[k] <= bounds.upper[k]))
      throw std::invalid_argument("KrigingModel::fit_mle: invalid length bounds");
    lo[k] = std::log(bounds.lower[k]);
    hi[k] = std::log(bounds.upper[k]);
  }
  auto to_lengths = [](const std::vector<double>& x) {
    std::vector<double> l(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) l[k] = std::exp(x[k]);
    return l;
  };

  const auto& y = doe.observations();
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); }))
    return fit(doe, basis, to_lengths(isotropic_point(lo, hi, 0.5)));

  ProfiledObjective objective(doe, basis);
  const std::size_t budget = options.max_evaluations > 0 ? options.max_evaluations : 30 * (n + 1);
  constexpr double kStep = 1.0;
  constexpr double kMinStep = 1e-2;

  std::vector<Candidate> starts;
  if (!options.warm_start.empty()) {
    if (options.warm_start.size() != n) throw DimensionError("KrigingModel::fit_mle: warm start dimension mismatch");
    Candidate c;
    for (std::size_t k = 0; k < n; ++k)
      c.x.push_back(std::clamp(std::log(options.warm_start[k]), lo[k], hi[k]));
    c.f = objective(c.x);
    starts.push_back(std::move(c));
  }

  Candidate best;
  if (n >= 20) {
    // One shared length first (1-D search over the isotropic fraction), then per-dimension refinement.
    Candidate iso{{0.0}, kInf};
    for (int i = 1; i <= 9; ++i) {
      const double t = 0.1 * i;
      const double f = objective(isotropic_point(lo, hi, t));
      if (f < iso.f) iso = {{t}, f};
    }
    auto iso_objective = [&](const std::vector<double>& t) { return objective(isotropic_point(lo, hi, t[0])); };
    iso = compass_search(iso_objective, iso, {0.0}, {1.0}, 0.05, 1e-3, 40);
    Candidate start{isotropic_point(lo, hi, iso.x[0]), iso.f};
    for (auto& s : starts)
      if (s.f < start.f) start = s;
    best = compass_search(objective, start, lo, hi, 0.5, 0.05, budget);
  } else {
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      Candidate c{isotropic_point(lo, hi, t), kInf};
      c.f = objective(c.x);
      starts.push_back(std::move(c));
    }
    std::stable_sort(starts.begin(), starts.end(), [](const Candidate& a, const Candidate& b) { return a.f < b.f; });
    const std::size_t runs = std::min<std::size_t>(2, starts.size());
    for (std::size_t i = 0; i < runs; ++i) {
      if (!std::isfinite(starts[i].f) && starts[i].f > 0) continue;
      Candidate c = compass_search(objective, starts[i], lo, hi, kStep, kMinStep, budget);
      if (c.f < best.f) best = std::move(c);
    }
  }
  if (!(best.f < kInf)) {
    throw SingularModelError("KrigingModel::fit_mle: every candidate correlation length gives a singular system", 0, 0);
  }
  return fit(doe, basis, to_lengths(best.x));
}

}  // namespace metais
