#include <doctest.h>

#include <cmath>
#include <limits>

#include "metais/probmodel.hpp"

using namespace metais;

namespace {
// scipy.stats reference values
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kInv2Pi = 0.15915494309189535;
constexpr double kLogInvSqrt2Pi = -0.9189385332046727;
constexpr double kLogLambda = -0.019610356576640665;
constexpr double kLogZeta = 0.1980422004353651;
constexpr double kLogMedian = 0.9805806756909201;
}  // namespace

TEST_CASE("pdf examples") {
  ProbabilisticModel n1({Marginal::normal(0, 1)});
  CHECK(n1.pdf(std::vector<double>{0.0}) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  ProbabilisticModel ln({Marginal::lognormal(1, 0.2)});
  CHECK(ln.pdf(std::vector<double>{-1.0}) == 0.0);
  CHECK(ln.pdf(std::vector<double>{0.0}) == 0.0);
  ProbabilisticModel n2({Marginal::normal(0, 1), Marginal::normal(0, 1)});
  CHECK(n2.pdf(std::vector<double>{0.0, 0.0}) == doctest::Approx(kInv2Pi).epsilon(1e-14));
  CHECK_THROWS_AS(n2.pdf(std::vector<double>{0.0}), DimensionError);
}

TEST_CASE("log_pdf examples") {
  ProbabilisticModel n1({Marginal::normal(0, 1)});
  CHECK(n1.log_pdf(std::vector<double>{0.0}) == doctest::Approx(kLogInvSqrt2Pi).epsilon(1e-14));
  ProbabilisticModel ln({Marginal::lognormal(1, 0.2)});
  CHECK(ln.log_pdf(std::vector<double>{-1.0}) == -std::numeric_limits<double>::infinity());
  ProbabilisticModel n100(std::vector<Marginal>(100, Marginal::normal(0, 1)));
  CHECK(n100.log_pdf(std::vector<double>(100, 0.0)) == doctest::Approx(100 * kLogInvSqrt2Pi).epsilon(1e-13));
  CHECK_THROWS_AS(n100.log_pdf(std::vector<double>(3, 0.0)), DimensionError);
}

TEST_CASE("exp(log_pdf) agrees with pdf") {
  ProbabilisticModel m({Marginal::normal(1, 2), Marginal::lognormal(1, 0.2), Marginal::uniform(-1, 3)});
  for (double t : {0.1, 0.5, 0.9, 1.3}) {
    std::vector<double> x{t, t, t};
    CHECK(std::exp(m.log_pdf(x)) == doctest::Approx(m.pdf(x)).epsilon(1e-12));
  }
}

TEST_CASE("lognormal moment matching") {
  const Marginal m = Marginal::lognormal(1, 0.2);
  CHECK(m.log_location() == doctest::Approx(kLogLambda).epsilon(1e-13));
  CHECK(m.log_scale() == doctest::Approx(kLogZeta).epsilon(1e-13));
  const double mean = std::exp(m.log_location() + 0.5 * m.log_scale() * m.log_scale());
  const double sd = mean * std::sqrt(std::expm1(m.log_scale() * m.log_scale()));
  CHECK(std::abs(mean - 1.0) <= 1e-12);
  CHECK(std::abs(sd - 0.2) / 0.2 <= 1e-12);
  CHECK(m.mean() == doctest::Approx(1.0));
  CHECK(m.std_dev() == doctest::Approx(0.2));
}

TEST_CASE("quantile examples") {
  CHECK(Marginal::normal(0, 1).quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(Marginal::uniform(2, 4).quantile(0.25) == doctest::Approx(2.5));
  CHECK(Marginal::lognormal(1, 0.2).quantile(0.5) == doctest::Approx(kLogMedian).epsilon(1e-13));
  for (double u : {0.0, 1.0, -0.1, 1.5, std::nan("")}) CHECK_THROWS_AS(Marginal::normal(0, 1).quantile(u), std::domain_error);
}

TEST_CASE("cdf of quantile is the identity") {
  for (const Marginal& m : {Marginal::normal(3, 2), Marginal::lognormal(1, 0.2), Marginal::uniform(-2, 5),
                            Marginal::lognormal(10, 8)}) {
    for (double u = 0.001; u < 0.9995; u += 0.01) CHECK(std::abs(m.cdf(m.quantile(u)) - u) <= 1e-10);
    CHECK(std::abs(m.cdf(m.quantile(0.999)) - 0.999) <= 1e-10);
  }
}

TEST_CASE("marginal pdf integrates to the central mass") {
  for (const Marginal& m : {Marginal::normal(0, 1), Marginal::lognormal(1, 0.2), Marginal::uniform(2, 4)}) {
    const double lo = m.quantile(1e-4), hi = m.quantile(1 - 1e-4);
    const int steps = 200000;
    const double h = (hi - lo) / steps;
    double s = 0.5 * (m.pdf(lo) + m.pdf(hi));
    for (int i = 1; i < steps; ++i) s += m.pdf(lo + i * h);
    CHECK(std::abs(s * h - 0.9998) <= 1e-3);
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(Marginal::normal(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(Marginal::lognormal(1, -1), std::invalid_argument);
  CHECK_THROWS_AS(Marginal::lognormal(-1, 1), std::invalid_argument);
  CHECK_THROWS_AS(Marginal::uniform(1, 1), std::invalid_argument);
  CHECK_THROWS(ProbabilisticModel(std::vector<Marginal>{}));
}

TEST_CASE("sampling moments and determinism") {
  Rng rng = make_rng(1);
  ProbabilisticModel u({Marginal::uniform(0, 1)});
  const PointSet us = u.sample(100000, rng);
  double s = 0;
  for (std::size_t i = 0; i < us.size(); ++i) s += us[i][0];
  CHECK(std::abs(s / 1e5 - 0.5) <= 0.005);

  ProbabilisticModel ln({Marginal::lognormal(1, 0.2)});
  const PointSet ls = ln.sample(100000, rng);
  s = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) s += ls[i][0];
  CHECK(std::abs(s / 1e5 - 1.0) <= 0.0019 * 3);

  Rng a = make_rng(5), b = make_rng(5);
  CHECK(ln.sample(1, a) == ln.sample(1, b));
}

TEST_CASE("empirical moments of 1e6 samples within 5 standard errors") {
  Rng rng = make_rng(2);
  for (const Marginal& m : {Marginal::normal(2, 3), Marginal::lognormal(1, 0.2), Marginal::uniform(-1, 4)}) {
    const std::size_t n = 1000000;
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = m.sample(rng);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::abs(mean - m.mean()) <= 5 * m.std_dev() / std::sqrt(double(n)));
    // the variance estimate has relative standard error about sqrt(2/n) for light tails
    CHECK(std::abs(std::sqrt(var) - m.std_dev()) / m.std_dev() <= 5 * std::sqrt(2.0 / n) * 2);
  }
}

TEST_CASE("normal cdf and quantile") {
  CHECK(normal_cdf(-2.0) == doctest::Approx(0.022750131948179216).epsilon(1e-14));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(normal_quantile(0.022750131948179216) == doctest::Approx(-2.0).epsilon(1e-12));
}
