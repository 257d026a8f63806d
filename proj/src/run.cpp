#include "metais/run.hpp"

#include <chrono>
#include <cmath>
#include <future>

#include "metais/classify.hpp"
#include "metais/log.hpp"
#include "metais/refine.hpp"

namespace metais {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// rng streams per phase, fixed regardless of scheduling
enum Stream : std::uint64_t { kRefine = 1, kPfEps = 2, kCorrection = 3, kEstimator = 4, kSeeds = 5 };

json trace_json(const RefinementTrace& trace) {
  json rows = json::array();
  for (const auto& r : trace.records)
    rows.push_back({{"m", r.m},
                    {"lengths", r.lengths},
                    {"process_variance", r.process_variance},
                    {"alpha_loo", r.alpha_loo},
                    {"seed_count", r.seed_count}});
  return rows;
}

json trace_timing(const RefinementTrace& trace) {
  json t = json::array();
  for (const auto& r : trace.records) t.push_back(r.wall_seconds);
  return t;
}

}  // namespace

json RunReport::to_json() const {
  json j = body;
  j["timing"] = timing;
  return j;
}

LimitState make_limit_state(const ProblemConfig& p) {
  if (p.kind == "parabola") return LimitState::parabola(p.b, p.kappa, p.e);
  if (p.kind == "rackwitz") return LimitState::rackwitz(p.a, p.sigma);
  if (p.kind == "linear") return LimitState::linear(p.beta0);
  if (p.kind == "external")
    return LimitState::external(p.command, std::chrono::milliseconds(static_cast<long long>(p.timeout_seconds * 1000.0)));
  throw ConfigError("config: problem.kind: unknown problem kind '" + p.kind + "'", 0, "problem.kind");
}

ProbabilisticModel make_model(const std::vector<Marginal>& marginals) { return ProbabilisticModel(marginals); }

RefinementConfig make_refinement_config(const RunConfig& c) {
  RefinementConfig r;
  r.k_per_iter = c.k_per_iter;
  r.population_size = c.refinement.population_size;
  r.m_min = c.refinement.m_min;
  r.m_max = c.refinement.m_max;
  r.max_g_evals = c.n_max;
  r.initial_doe_size = c.refinement.initial_doe_size;
  r.loo_low = c.refinement.loo_low;
  r.loo_high = c.refinement.loo_high;
  r.basis = c.refinement.trend == "linear" ? TrendBasis::linear() : TrendBasis::constant();
  r.strategy = c.refinement.strategy == "u" ? RefinementStrategy::u_criterion : RefinementStrategy::hstar_sampling;
  r.mcmc.burn_in = c.mcmc.burn_in;
  r.mcmc.thinning = c.refinement.population_thinning;
  r.mcmc.chains = c.mcmc.chains;
  r.mcmc.max_stepout = c.mcmc.max_stepout;
  r.mcmc.widths = ProbabilisticModel(c.marginals).std_devs();
  for (double& w : r.mcmc.widths) w *= c.mcmc.width_scale;
  return r;
}

json estimate_to_json(const Estimate& e) {
  return {{"value", e.value},
          {"std_dev", e.std_dev},
          {"cov", e.cov},
          {"n_samples", e.n_samples},
          {"n_g_evals", e.n_g_evals},
          {"zero_failures", e.zero_failures},
          {"pathological_terms", e.pathological_terms}};
}

RunReport run(const RunConfig& config) { return run(config, make_limit_state(config.problem)); }

RunReport run(const RunConfig& config, LimitState g) {
  validate(config);
  const ProbabilisticModel model(config.marginals);
  const BatchFunction gf = g.as_function();
  const std::size_t calls_before = g.calls();
  RunReport report;
  json& body = report.body;
  body["config"] = config_to_json(config);
  body["method"] = to_string(config.method);
  json warnings = json::array();
  const auto t_all = Clock::now();

  if (config.method == Method::mc) {
    // a crude run can be large and never revisits a point
    const bool cached = g.caching();
    g.set_caching(false);
    Rng rng = make_rng(config.seed, kEstimator);
    const auto t0 = Clock::now();
    Estimate e;
    try {
      e = crude_mc(gf, model, config.target_cov, config.n_max, config.estimation.batch_mc, rng);
    } catch (...) {
      g.set_caching(cached);
      throw;
    }
    g.set_caching(cached);
    report.timing["estimation"] = seconds_since(t0);
    body["result"] = {{"pf", estimate_to_json(e)}};
    body["g_calls"] = {{"estimation", g.calls() - calls_before}, {"total", g.calls() - calls_before}};
    if (e.zero_failures) warnings.push_back("zero failures observed at the sample cap");
    if (e.cov > config.target_cov) warnings.push_back("target CoV not reached within n_max");
  } else if (config.method == Method::is) {
    const ProbabilisticModel h(config.instrumental);
    Rng rng = make_rng(config.seed, kEstimator);
    const auto t0 = Clock::now();
    const Estimate e = importance_sampling(gf, model, instrumental_from(h), config.n_max, rng);
    report.timing["estimation"] = seconds_since(t0);
    body["result"] = {{"pf", estimate_to_json(e)}};
    body["g_calls"] = {{"estimation", g.calls() - calls_before}, {"total", g.calls() - calls_before}};
    if (e.zero_failures) warnings.push_back("no failure among the importance samples");
  } else {
    const RefinementConfig rc = make_refinement_config(config);
    Rng refine_rng = make_rng(config.seed, kRefine);
    const auto t0 = Clock::now();
    RefinementResult rr = refine_loop(gf, model, rc, refine_rng);
    report.timing["refinement"] = seconds_since(t0);
    report.timing["iterations"] = trace_timing(rr.trace);
    const std::size_t calls_doe = g.calls() - calls_before;
    if (rr.stop_reason != StopReason::converged)
      warnings.push_back("refinement stopped before the LOO criterion was met (" + to_string(rr.stop_reason) + ")");

    const KrigingModel& km = rr.model;
    const ClassificationFunction cf(km);
    const InstrumentalDensity hstar(cf, model);
    Rng seed_rng = make_rng(config.seed, kSeeds);
    const PointSet seeds = hstar_seeds(km, model, seed_rng);

    SliceSamplerConfig mc;
    mc.burn_in = config.mcmc.burn_in;
    mc.thinning = config.mcmc.thinning;
    mc.max_stepout = config.mcmc.max_stepout;
    mc.chains = std::min(config.mcmc.chains, std::max<std::size_t>(1, seeds.size()));
    mc.widths = rc.mcmc.widths;

    const double phase_cov = config.target_cov / std::sqrt(2.0);
    const std::size_t corr_budget = config.n_max > rr.g_evals ? config.n_max - rr.g_evals : 0;
    if (corr_budget == 0) throw Error("run: no limit-state budget left for the correction factor");
    const std::uint64_t corr_seed = make_rng(config.seed, kCorrection)();

    auto pf_eps_phase = [&] {
      Rng rng = make_rng(config.seed, kPfEps);
      const auto t = Clock::now();
      Estimate e = augmented_pf(cf, model, phase_cov, config.estimation.n_max_pf_eps, config.estimation.batch_pf_eps, rng);
      return std::make_pair(e, seconds_since(t));
    };
    auto corr_phase = [&] {
      const auto t = Clock::now();
      Estimate e = correction_factor(gf, cf, hstar, mc, seeds, phase_cov, corr_budget, config.estimation.batch_corr,
                                     corr_seed);
      return std::make_pair(e, seconds_since(t));
    };

    std::pair<Estimate, double> eps, corr;
    if (config.parallel_phases) {
      auto fut = std::async(std::launch::async, pf_eps_phase);
      corr = corr_phase();
      eps = fut.get();
    } else {
      eps = pf_eps_phase();
      corr = corr_phase();
    }
    report.timing["pf_eps"] = eps.second;
    report.timing["alpha_corr"] = corr.second;
    const std::size_t calls_corr = g.calls() - calls_before - calls_doe;

    MetaISResult res;
    res.pf_eps = eps.first;
    res.alpha_corr = corr.first;
    res.pf = combine(res.pf_eps, res.alpha_corr);
    res.pf.n_g_evals = calls_doe + calls_corr;
    res.doe_size = km.doe().size();
    res.iterations = rr.iterations;

    body["result"] = {{"pf_eps", estimate_to_json(res.pf_eps)},
                      {"alpha_corr", estimate_to_json(res.alpha_corr)},
                      {"pf", estimate_to_json(res.pf)},
                      {"doe_size", res.doe_size},
                      {"iterations", res.iterations}};
    json doe_points = json::array();
    for (std::size_t i = 0; i < km.doe().size(); ++i) {
      const auto x = km.doe().point(i);
      doe_points.push_back(std::vector<double>(x.begin(), x.end()));
    }
    body["refinement"] = {{"stop_reason", to_string(rr.stop_reason)},
                          {"trace", trace_json(rr.trace)},
                          {"doe", {{"points", doe_points}, {"values", km.doe().observations()}}}};
    body["g_calls"] = {{"refinement", calls_doe},
                       {"pf_eps", 0},
                       {"alpha_corr", calls_corr},
                       {"total", calls_doe + calls_corr}};
    if (res.alpha_corr.pathological_terms > 0)
      warnings.push_back(std::to_string(res.alpha_corr.pathological_terms) +
                         " correction terms hit the classification floor");
    if (res.pf_eps.cov > phase_cov) warnings.push_back("augmented failure probability missed its CoV target");
    if (res.alpha_corr.cov > phase_cov) warnings.push_back("correction factor missed its CoV target within the budget");
  }

  body["warnings"] = warnings;
  report.timing["total"] = seconds_since(t_all);
  log::event({{"event", "done"}, {"method", to_string(config.method)}, {"seconds", report.timing["total"]}});
  return report;
}

}  // namespace metais
