#include "metais/refine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "metais/classify.hpp"
#include "metais/cluster.hpp"
#include "metais/estimate.hpp"
#include "metais/log.hpp"

namespace metais {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDuplicateDistance = 1e-9;

double scaled_sq(std::span<const double> a, std::span<const double> b, const std::vector<double>& scale) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) / scale[k];
    s += d * d;
  }
  return s;
}

double min_sq_to(std::span<const double> x, const PointSet& set, const std::vector<double>& scale) {
  double best = kInf;
  for (std::size_t i = 0; i < set.size(); ++i) best = std::min(best, scaled_sq(x, set[i], scale));
  return best;
}

// Greedy farthest-point ordering, starting from the first entry.
PointSet spread_order(const PointSet& pts, const std::vector<double>& scale, std::size_t keep) {
  PointSet out(pts.dim());
  if (pts.empty()) return out;
  std::vector<double> dist(pts.size(), kInf);
  std::vector<char> used(pts.size(), 0);
  std::size_t cur = 0;
  while (out.size() < std::min(keep, pts.size())) {
    used[cur] = 1;
    out.push_back(pts[cur]);
    std::size_t next = pts.size();
    double far = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (used[i]) continue;
      dist[i] = std::min(dist[i], scaled_sq(pts[i], pts[cur], scale));
      if (dist[i] > far) {
        far = dist[i];
        next = i;
      }
    }
    if (next == pts.size()) break;
    cur = next;
  }
  return out;
}

KrigingModel fit_model(const DesignOfExperiments& doe, const RefinementConfig& config,
                       const std::vector<double>& previous, const RefinementTrace& trace) {
  MleOptions opts;
  opts.warm_start = previous;
  try {
    return KrigingModel::fit_mle(doe, config.basis, opts);
  } catch (const std::exception& mle_error) {
    log::event({{"event", "mle_failure"}, {"m", doe.size()}, {"what", mle_error.what()}});
    if (previous.empty()) throw RefinementError(std::string("refine_loop: MLE failed: ") + mle_error.what(), trace);
    try {
      return KrigingModel::fit(doe, config.basis, previous);
    } catch (const std::exception& e) {
      throw RefinementError(std::string("refine_loop: fit with previous lengths failed: ") + e.what(), trace);
    }
  }
}

}  // namespace

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_doe: return "max_doe";
    case StopReason::budget: return "budget";
  }
  return "unknown";
}

PointSet initial_doe(const ProbabilisticModel& model, std::size_t m0, Rng& rng) {
  if (m0 < 1) throw std::invalid_argument("initial_doe: m0 must be >= 1");
  const std::size_t n = model.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointSet out(n, m0);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::size_t> perm(m0);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < m0; ++i) {
      double u = (static_cast<double>(perm[i]) + unit(rng)) / static_cast<double>(m0);
      u = std::clamp(u, 1e-4, 1.0 - 1e-4);
      out[i][k] = model.marginals()[k].quantile(u);
    }
  }
  return out;
}

PointSet hstar_seeds(const KrigingModel& model, const ProbabilisticModel& inputs, Rng& rng, std::size_t max_seeds) {
  const std::vector<double> scale = inputs.std_devs();
  const DesignOfExperiments& doe = model.doe();
  const ClassificationFunction cf(model);
  const InstrumentalDensity hstar(cf, inputs);

  std::vector<std::pair<double, std::size_t>> failing;
  for (std::size_t i = 0; i < doe.size(); ++i) {
    const double mu = model.predict(doe.point(i)).mean;
    if (mu <= 0.0 && std::isfinite(hstar.log_density(doe.point(i)))) failing.emplace_back(mu, i);
  }
  PointSet candidates(inputs.dim());
  if (!failing.empty()) {
    std::sort(failing.begin(), failing.end());
    for (const auto& f : failing) candidates.push_back(doe.point(f.second));
  } else {
    const PointSet xs = inputs.sample(10000, rng);
    const auto preds = model.predict_batch(xs);
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double s = preds[i].std_dev > 0.0 ? preds[i].mean / preds[i].std_dev
                                               : (preds[i].mean <= 0.0 ? -kInf : kInf);
      if (std::isfinite(hstar.log_density(xs[i])) || preds[i].mean <= 0.0) ranked.emplace_back(s, i);
    }
    std::sort(ranked.begin(), ranked.end());
    if (!ranked.empty()) candidates.push_back(xs[ranked.front().second]);
  }
  return spread_order(candidates, scale, max_seeds);
}

RefinementResult refine_loop(const BatchFunction& g, const ProbabilisticModel& model, const RefinementConfig& config,
                             Rng& rng) {
  const std::size_t n = model.dim();
  const std::size_t p = config.basis.size(n);
  const std::size_t K = config.k_per_iter;
  const std::size_t m0 = config.initial_doe_size.value_or(std::max(K, p + 2));
  if (K < 1) throw std::invalid_argument("refine_loop: k_per_iter must be >= 1");
  if (m0 < std::max(K, p + 2)) throw std::invalid_argument("refine_loop: initial DOE size must be >= max(K, p + 2)");
  if (config.m_min < p + 2) throw std::invalid_argument("refine_loop: m_min must be >= p + 2");
  if (config.m_max < config.m_min) throw std::invalid_argument("refine_loop: m_max must be >= m_min");
  if (config.max_g_evals < m0) throw std::invalid_argument("refine_loop: budget smaller than the initial DOE");
  if (!(config.loo_low <= config.loo_high)) throw std::invalid_argument("refine_loop: invalid LOO band");
  if (config.population_size < K) throw std::invalid_argument("refine_loop: population smaller than K");

  const std::vector<double> scale = model.std_devs();
  SliceSamplerConfig mcmc = config.mcmc;
  if (mcmc.widths.empty()) mcmc.widths = scale;

  DesignOfExperiments doe(n);
  const PointSet x0 = initial_doe(model, m0, rng);
  const std::vector<double> y0 = g(x0);
  for (std::size_t i = 0; i < x0.size(); ++i) doe.add(x0[i], y0[i]);
  std::size_t g_evals = x0.size();

  RefinementTrace trace;
  std::vector<double> lengths;
  std::size_t rounds = 0;

  while (true) {
    const auto t0 = std::chrono::steady_clock::now();
    KrigingModel km = fit_model(doe, config, lengths, trace);
    lengths = km.lengths();

    const std::size_t m = doe.size();
    const double alpha_loo = loo_correction_factor(km);

    StopReason reason = StopReason::converged;
    bool stop = false;
    if (m >= config.m_min && alpha_loo >= config.loo_low && alpha_loo <= config.loo_high) {
      stop = true;
    } else if (m >= config.m_max) {
      stop = true;
      reason = StopReason::max_doe;
    } else if (g_evals >= config.max_g_evals) {
      stop = true;
      reason = StopReason::budget;
    }

    IterationRecord rec;
    rec.m = m;
    rec.lengths = lengths;
    rec.process_variance = km.process_variance();
    rec.alpha_loo = alpha_loo;

    if (stop) {
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      trace.records.push_back(rec);
      log::event({{"event", "iteration"}, {"m", m}, {"alpha_loo", alpha_loo}, {"sigma2", km.process_variance()},
                  {"lengths", lengths}, {"stop", to_string(reason)}});
      return RefinementResult{std::move(km), std::move(trace), reason, g_evals, rounds};
    }

    const std::size_t k = std::min({K, config.max_g_evals - g_evals, config.m_max - m});
    PointSet population(n);
    if (config.strategy == RefinementStrategy::hstar_sampling) {
      const PointSet seeds = hstar_seeds(km, model, rng);
      rec.seed_count = seeds.size();
      const ClassificationFunction cf(km);
      const InstrumentalDensity hstar(cf, model);
      SliceSamplerConfig pc = mcmc;
      pc.chains = default_chain_count(seeds.size());
      population = run_chain([&hstar](std::span<const double> x) { return hstar.log_density(x); }, seeds, pc,
                             config.population_size, rng());
    } else {
      population = model.sample(config.population_size, rng);
    }

    PointSet centers(n);
    if (config.strategy == RefinementStrategy::hstar_sampling) {
      KMeansOptions ko;
      ko.scale = scale;
      centers = kmeans(population, k, rng, ko).centers;
    } else {
      const auto preds = km.predict_batch(population);
      std::vector<std::pair<double, std::size_t>> ranked(population.size());
      for (std::size_t i = 0; i < population.size(); ++i) ranked[i] = {u_criterion(preds[i]), i};
      std::stable_sort(ranked.begin(), ranked.end());
      for (std::size_t j = 0; j < population.size() && centers.size() < k; ++j) {
        auto x = population[ranked[j].second];
        if (min_sq_to(x, centers, scale) > 0.0) centers.push_back(x);
      }
    }

    // duplicate repair against the DOE and the accepted centers
    PointSet accepted(n);
    PointSet taken = doe.points();
    std::vector<char> used(population.size(), 0);
    const double dup2 = kDuplicateDistance * kDuplicateDistance;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      auto x = centers[c];
      if (min_sq_to(x, taken, scale) >= dup2 && std::isfinite(model.log_pdf(x))) {
        accepted.push_back(x);
        taken.push_back(x);
        continue;
      }
      std::size_t best = population.size();
      double far = -1.0;
      for (std::size_t i = 0; i < population.size(); ++i) {
        if (used[i] || !std::isfinite(model.log_pdf(population[i]))) continue;
        const double d = min_sq_to(population[i], taken, scale);
        if (d >= dup2 && d > far) {
          far = d;
          best = i;
        }
      }
      if (best == population.size()) continue;
      used[best] = 1;
      accepted.push_back(population[best]);
      taken.push_back(population[best]);
    }
    if (accepted.empty()) throw RefinementError("refine_loop: no admissible enrichment point", trace);

    const std::vector<double> y = g(accepted);
    for (std::size_t i = 0; i < accepted.size(); ++i) doe.add(accepted[i], y[i]);
    g_evals += accepted.size();
    ++rounds;

    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.records.push_back(rec);
    log::event({{"event", "iteration"}, {"m", m}, {"alpha_loo", alpha_loo}, {"sigma2", km.process_variance()},
                {"lengths", lengths}, {"seeds", rec.seed_count}, {"added", accepted.size()},
                {"seconds", rec.wall_seconds}});
  }
}

}  // namespace metais
