#include "metais/estimate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "metais/log.hpp"

namespace metais {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  // standard error of the mean
  double std_error() const {
    if (n < 2) return 0.0;
    const double var = std::max(0.0, m2) / static_cast<double>(n - 1);
    return std::sqrt(var / static_cast<double>(n));
  }
};

void check_target(double target_cov, const char* who) {
  if (!(target_cov > 0.0 && target_cov < 1.0)) throw std::invalid_argument(std::string(who) + ": target_cov must be in (0, 1)");
}

void progress(const char* phase, const Estimate& e) {
  log::event({{"event", "batch"}, {"phase", phase}, {"n", e.n_samples}, {"value", e.value}, {"cov", e.cov}});
}

}  // namespace

Estimate make_estimate(double value, double std_dev, std::size_t n_samples, std::size_t n_g_evals) {
  Estimate e;
  e.value = value;
  e.std_dev = std_dev;
  e.cov = value > 0.0 ? std_dev / value : kInf;
  e.n_samples = n_samples;
  e.n_g_evals = n_g_evals;
  return e;
}

Estimate crude_mc(const BatchFunction& g, const ProbabilisticModel& model, double target_cov, std::size_t n_max,
                  std::size_t batch, Rng& rng) {
  check_target(target_cov, "crude_mc");
  if (n_max == 0 || batch == 0) throw std::invalid_argument("crude_mc: n_max and batch must be positive");
  std::size_t n = 0, failures = 0;
  Estimate e;
  while (true) {
    const std::size_t take = std::min(batch, n_max - n);
    const PointSet xs = model.sample(take, rng);
    const std::vector<double> y = g(xs);
    for (double v : y) failures += v <= 0.0;
    n += take;
    const double p = static_cast<double>(failures) / static_cast<double>(n);
    e = make_estimate(p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, n);
    progress("crude_mc", e);
    if (e.cov <= target_cov || n >= n_max) break;
  }
  e.zero_failures = failures == 0;
  return e;
}

InstrumentalSampler instrumental_from(const ProbabilisticModel& h) {
  return {[h](std::size_t count, Rng& rng) { return h.sample(count, rng); },
          [h](std::span<const double> x) { return h.log_pdf(x); }};
}

Estimate importance_sampling(const BatchFunction& g, const ProbabilisticModel& model, const InstrumentalSampler& h,
                             std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("importance_sampling: n must be positive");
  const PointSet xs = h.sample(n, rng);
  if (xs.size() != n || xs.dim() != model.dim()) throw DimensionError("importance_sampling: sampler output mismatch");
  const std::vector<double> y = g(xs);
  Welford w;
  for (std::size_t k = 0; k < n; ++k) {
    const double log_h = h.log_density(xs[k]);
    if (!(log_h > -kInf)) throw DominationError("importance_sampling: instrumental density is zero at sample " + std::to_string(k));
    double term = 0.0;
    if (y[k] <= 0.0) {
      const double log_f = model.log_pdf(xs[k]);
      term = log_f == log_h ? 1.0 : std::exp(log_f - log_h);
    }
    w.add(term);
  }
  Estimate e = make_estimate(w.mean, w.std_error(), n, n);
  e.zero_failures = w.mean == 0.0;
  return e;
}

Estimate augmented_pf(const ClassificationFunction& cf, const ProbabilisticModel& model, double target_cov,
                      std::size_t n_max, std::size_t batch, Rng& rng) {
  check_target(target_cov, "augmented_pf");
  if (n_max == 0 || batch == 0) throw std::invalid_argument("augmented_pf: n_max and batch must be positive");
  Welford w;
  Estimate e;
  while (true) {
    const std::size_t take = std::min(batch, n_max - w.n);
    for (double pi : cf.batch(model.sample(take, rng))) w.add(pi);
    e = make_estimate(w.mean, w.std_error(), w.n, 0);
    progress("augmented_pf", e);
    if (e.cov <= target_cov || w.n >= n_max) break;
  }
  return e;
}

Estimate correction_factor(const BatchFunction& g, const ClassificationFunction& cf, const InstrumentalDensity& hstar,
                           const SliceSamplerConfig& mcmc, const PointSet& seeds, double target_cov,
                           std::size_t n_max, std::size_t batch, std::uint64_t seed) {
  check_target(target_cov, "correction_factor");
  if (n_max == 0 || batch == 0) throw std::invalid_argument("correction_factor: n_max and batch must be positive");
  SliceSampler sampler([&hstar](std::span<const double> x) { return hstar.log_density(x); }, seeds, mcmc, seed);
  Welford w;
  std::size_t pathological = 0;
  Estimate e;
  while (true) {
    const std::size_t take = std::min(batch, n_max - w.n);
    const PointSet xs = sampler.draw(take);
    const std::vector<double> y = g(xs);
    const std::vector<double> pi = cf.batch(xs);
    for (std::size_t j = 0; j < take; ++j) {
      const bool fail = y[j] <= 0.0;
      if (fail && pi[j] <= kPiFloor) ++pathological;
      w.add(fail ? 1.0 / std::max(pi[j], kPiFloor) : 0.0);
    }
    e = make_estimate(w.mean, w.std_error(), w.n, w.n);
    progress("correction_factor", e);
    if (e.cov <= target_cov || w.n >= n_max) break;
  }
  e.pathological_terms = pathological;
  return e;
}

double product_cov(double cov1, double cov2) noexcept {
  const double a = cov1 * cov1, b = cov2 * cov2;
  return std::sqrt(a + b + a * b);
}

double product_cov_approx(double cov1, double cov2) noexcept { return std::sqrt(cov1 * cov1 + cov2 * cov2); }

Estimate combine(const Estimate& pf_eps, const Estimate& alpha_corr) {
  Estimate e;
  e.value = pf_eps.value * alpha_corr.value;
  if (pf_eps.value > 0.0 && alpha_corr.value > 0.0) {
    e.cov = product_cov(pf_eps.cov, alpha_corr.cov);
    e.std_dev = e.cov * e.value;
  } else {
    // variance of a product of independent estimators
    const double m1 = pf_eps.value, m2 = alpha_corr.value, s1 = pf_eps.std_dev, s2 = alpha_corr.std_dev;
    e.std_dev = std::sqrt(m1 * m1 * s2 * s2 + m2 * m2 * s1 * s1 + s1 * s1 * s2 * s2);
    e.cov = kInf;
  }
  e.n_samples = pf_eps.n_samples + alpha_corr.n_samples;
  e.n_g_evals = pf_eps.n_g_evals + alpha_corr.n_g_evals;
  e.zero_failures = pf_eps.zero_failures || alpha_corr.zero_failures;
  e.pathological_terms = pf_eps.pathological_terms + alpha_corr.pathological_terms;
  return e;
}

double loo_correction_factor(const KrigingModel& model, const std::optional<std::vector<std::size_t>>& subset) {
  const DesignOfExperiments& doe = model.doe();
  const double tol = model.sigma_tolerance();
  auto term = [&](std::size_t i, const Prediction& p) {
    if (doe.observation(i) > 0.0) return 0.0;
    return 1.0 / std::max(classification_probability(p, tol), kPiFloor);
  };
  double sum = 0.0;
  if (!subset) {
    // one factorization pass for all m predictions
    const std::vector<Prediction> loo = model.loo_predict_all(LooMethod::closed_form);
    for (std::size_t i = 0; i < loo.size(); ++i) sum += term(i, loo[i]);
    return sum / static_cast<double>(loo.size());
  }
  if (subset->empty()) throw std::invalid_argument("loo_correction_factor: empty index set");
  for (std::size_t i : *subset) {
    if (i >= doe.size()) throw std::out_of_range("loo_correction_factor: index out of range");
    sum += doe.observation(i) > 0.0 ? 0.0 : term(i, model.loo_predict(i, LooMethod::closed_form));
  }
  return sum / static_cast<double>(subset->size());
}

}  // namespace metais
