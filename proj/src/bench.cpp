#include "metais/bench.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace metais {
namespace {

std::string bit_key(std::span<const double> x) {
  std::string key(x.size() * sizeof(double), '\0');
  std::memcpy(key.data(), x.data(), key.size());
  return key;
}

}  // namespace

double parabola(std::span<const double> x, double b, double kappa, double e) {
  if (x.size() != 2) throw DimensionError("parabola: expects a 2-dimensional point");
  const double d = x[0] - e;
  return b - x[1] - kappa * d * d;
}

double rackwitz(std::span<const double> x, double a, double sigma) {
  if (x.empty()) throw DimensionError("rackwitz: empty point");
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += v;
  return (n + a * sigma * std::sqrt(n)) - s;
}

double linear(std::span<const double> x, double beta0) {
  if (x.empty()) throw DimensionError("linear: empty point");
  return beta0 - x[0];
}

LimitState LimitState::parabola(double b, double kappa, double e) {
  auto s = std::make_shared<State>();
  s->kind = LimitStateKind::parabola;
  s->params = {b, kappa, e};
  return LimitState(std::move(s));
}

LimitState LimitState::rackwitz(double a, double sigma) {
  auto s = std::make_shared<State>();
  s->kind = LimitStateKind::rackwitz;
  s->params = {a, sigma};
  return LimitState(std::move(s));
}

LimitState LimitState::linear(double beta0) {
  auto s = std::make_shared<State>();
  s->kind = LimitStateKind::linear;
  s->params = {beta0};
  return LimitState(std::move(s));
}

LimitState LimitState::external(std::string command, std::chrono::milliseconds timeout) {
  if (command.empty()) throw std::invalid_argument("LimitState::external: empty command");
  auto s = std::make_shared<State>();
  s->kind = LimitStateKind::external;
  s->command = std::move(command);
  s->timeout = timeout;
  return LimitState(std::move(s));
}

void LimitState::set_caching(bool on) { state_->caching = on; }

void LimitState::clear_cache() {
  std::lock_guard lock(state_->mutex);
  state_->cache.clear();
}

std::vector<double> LimitState::evaluate_raw(const PointSet& xs) const {
  const State& s = *state_;
  if (s.kind == LimitStateKind::external) return external_g(s.command, xs, s.timeout);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    switch (s.kind) {
      case LimitStateKind::parabola: out[i] = metais::parabola(xs[i], s.params[0], s.params[1], s.params[2]); break;
      case LimitStateKind::rackwitz: out[i] = metais::rackwitz(xs[i], s.params[0], s.params[1]); break;
      case LimitStateKind::linear: out[i] = metais::linear(xs[i], s.params[0]); break;
      case LimitStateKind::external: break;
    }
  }
  return out;
}

double LimitState::operator()(std::span<const double> x) const {
  PointSet one(x.size());
  one.push_back(x);
  return (*this)(one)[0];
}

std::vector<double> LimitState::operator()(const PointSet& xs) const {
  State& s = *state_;
  if (!s.caching) {
    std::vector<double> out = evaluate_raw(xs);
    s.calls += xs.size();
    return out;
  }

  std::vector<double> out(xs.size());
  std::vector<std::string> keys(xs.size());
  std::unordered_map<std::string, std::size_t> pending;  // key -> row in `misses`
  std::vector<std::size_t> miss_row(xs.size(), SIZE_MAX);
  PointSet misses(xs.dim());
  {
    std::lock_guard lock(s.mutex);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      keys[i] = bit_key(xs[i]);
      if (auto it = s.cache.find(keys[i]); it != s.cache.end()) {
        out[i] = it->second;
        continue;
      }
      auto [it, inserted] = pending.emplace(keys[i], misses.size());
      if (inserted) misses.push_back(xs[i]);
      miss_row[i] = it->second;
    }
  }
  if (misses.empty()) return out;

  const std::vector<double> values = evaluate_raw(misses);
  s.calls += misses.size();
  std::lock_guard lock(s.mutex);
  for (const auto& [key, row] : pending) s.cache.emplace(key, values[row]);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (miss_row[i] != SIZE_MAX) out[i] = values[miss_row[i]];
  return out;
}

BatchFunction LimitState::as_function() const {
  return [self = *this](const PointSet& xs) { return self(xs); };
}

Estimate oracle_pf(const BatchFunction& g, const ProbabilisticModel& model, std::size_t n, Rng& rng) {
  if (n < 10000) throw std::invalid_argument("oracle_pf: n must be >= 1e4");
  constexpr std::size_t kChunk = 100000;
  std::size_t done = 0, failures = 0;
  while (done < n) {
    const std::size_t take = std::min(kChunk, n - done);
    for (double v : g(model.sample(take, rng))) failures += v <= 0.0;
    done += take;
  }
  const double p = static_cast<double>(failures) / static_cast<double>(n);
  Estimate e = make_estimate(p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, n);
  e.zero_failures = failures == 0;
  return e;
}

}  // namespace metais
