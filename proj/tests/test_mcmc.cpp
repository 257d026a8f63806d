#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "metais/mcmc.hpp"
#include "metais/probmodel.hpp"

using namespace metais;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double std_normal(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += -0.5 * v * v;
  return s;
}

// sup |F_n - Phi|
double ks_normal(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = normal_cdf(xs[i]);
    d = std::max({d, std::abs((static_cast<double>(i) + 1) / n - F), std::abs(F - static_cast<double>(i) / n)});
  }
  return d;
}

// asymptotic 1% critical value
double ks_critical(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

std::vector<double> column(const PointSet& ps, std::size_t k) {
  std::vector<double> c(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) c[i] = ps[i][k];
  return c;
}

}  // namespace

TEST_CASE("uniform target stays in its support") {
  auto target = [](std::span<const double> x) { return x[0] > 0.0 && x[0] < 1.0 ? 0.0 : kNegInf; };
  ChainState s = make_chain_state(target, std::vector<double>{0.3}, make_rng(1));
  SliceSamplerConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    slice_step(s, target, cfg);
    CHECK(s.current[0] > 0.0);
    CHECK(s.current[0] < 1.0);
  }
}

TEST_CASE("cached density stays coherent") {
  ChainState s = make_chain_state(std_normal, std::vector<double>{0.0, 0.0}, make_rng(2));
  SliceSamplerConfig cfg;
  for (int i = 0; i < 200; ++i) {
    slice_step(s, std_normal, cfg);
    CHECK(s.log_density == std_normal(s.current));
  }
  CHECK_THROWS(make_chain_state(std_normal, std::vector<double>{std::nan("")}, make_rng(2)));
}

TEST_CASE("1-D standard normal moments, KS and autocorrelation") {
  SliceSamplerConfig cfg;
  cfg.chains = 1;
  const PointSet xs = run_chain(std_normal, PointSet(1, {{0.0}}), cfg, 10000, 42);
  const auto v = column(xs, 0);
  double m = 0, s2 = 0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s2 += (x - m) * (x - m);
  s2 /= v.size();
  CHECK(std::abs(m) <= 0.03);
  CHECK(s2 >= 0.94);
  CHECK(s2 <= 1.06);
  CHECK(ks_normal(v) < ks_critical(v.size()));

  double c0 = 0, c1 = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    c0 += (v[i] - m) * (v[i] - m);
    if (i + 1 < v.size()) c1 += (v[i] - m) * (v[i + 1] - m);
  }
  CHECK(std::abs(c1 / c0) < 0.2);
}

TEST_CASE("2-D standard normal marginals pass KS") {
  SliceSamplerConfig cfg;
  const PointSet seeds(2, {{0.0, 0.0}, {1.0, -1.0}});
  const PointSet xs = run_chain(std_normal, seeds, cfg, 10000, 7);
  CHECK(xs.size() == 10000);
  for (std::size_t k = 0; k < 2; ++k) CHECK(ks_normal(column(xs, k)) < ks_critical(xs.size()));
}

TEST_CASE("one-step stationarity") {
  Rng rng = make_rng(9);
  std::normal_distribution<double> z;
  SliceSamplerConfig cfg;
  std::vector<double> after;
  for (int c = 0; c < 1000; ++c) {
    ChainState s = make_chain_state(std_normal, std::vector<double>{z(rng)}, make_rng(100, static_cast<std::uint64_t>(c)));
    slice_step(s, std_normal, cfg);
    after.push_back(s.current[0]);
  }
  CHECK(ks_normal(after) < ks_critical(after.size()));
}

TEST_CASE("determinism, resumption and seeds") {
  SliceSamplerConfig cfg;
  cfg.burn_in = 10;
  cfg.thinning = 2;
  const PointSet seeds(1, {{0.0}, {0.5}});
  CHECK(run_chain(std_normal, seeds, cfg, 100, 5) == run_chain(std_normal, seeds, cfg, 100, 5));
  CHECK(!(run_chain(std_normal, seeds, cfg, 100, 5) == run_chain(std_normal, seeds, cfg, 100, 6)));

  SliceSampler a(std_normal, seeds, cfg, 5);
  PointSet joined = a.draw(37);
  joined.append(a.draw(63));
  CHECK(joined == run_chain(std_normal, seeds, cfg, 100, 5));

  SliceSampler b(std_normal, seeds, cfg, 5);
  CHECK_THROWS(b.draw(0));

  auto half = [](std::span<const double> x) { return x[0] > 0.0 ? -0.5 * x[0] * x[0] : kNegInf; };
  CHECK_THROWS_AS(SliceSampler(half, PointSet(1, {{-1.0}}), cfg, 1), Error);
  SliceSampler c(half, PointSet(1, {{-1.0}, {1.0}}), cfg, 1);
  for (std::size_t i = 0; i < 50; ++i) CHECK(half(c.draw(1)[0]) > kNegInf);
}

TEST_CASE("stepping out limit") {
  auto flat = [](std::span<const double>) { return 0.0; };
  SliceSamplerConfig cfg;
  cfg.max_stepout = 4;
  ChainState s = make_chain_state(flat, std::vector<double>{0.0}, make_rng(3));
  CHECK_THROWS_AS(slice_step(s, flat, cfg), SliceWidthError);
}

TEST_CASE("default chain count") {
  CHECK(default_chain_count(1) == 1);
  CHECK(default_chain_count(3) == 3);
  CHECK(default_chain_count(10) == 4);
}
