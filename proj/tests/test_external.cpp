#include <doctest.h>

#include <chrono>
#include <clocale>

#include "metais/bench.hpp"
#include "metais/external.hpp"

using namespace metais;
using namespace std::chrono_literals;

TEST_CASE("echo child returns the first coordinates") {
  const PointSet xs(3, {{1.5, 2.0, 3.0}, {-0.25, 1e-300, 7.0}, {123456.789, 0.0, -1.0}});
  const auto y = external_g("cut -d, -f1", xs);
  REQUIRE(y.size() == 3);
  CHECK(y[0] == 1.5);
  CHECK(y[1] == -0.25);
  CHECK(y[2] == 123456.789);
}

TEST_CASE("coordinates round-trip exactly") {
  Rng rng = make_rng(1);
  std::normal_distribution<double> z(0.0, 1e3);
  PointSet xs(2);
  for (int i = 0; i < 2000; ++i) xs.push_back(std::vector<double>{z(rng), z(rng)});
  const auto y = external_g("cut -d, -f2", xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(y[i] == xs[i][1]);
}

TEST_CASE("empty batch launches nothing") {
  CHECK(external_g("exit 3", PointSet(2)).empty());
}

TEST_CASE("protocol errors name the line") {
  const PointSet xs(1, {{1.0}, {2.0}, {3.0}});
  try {
    (void)external_g("printf '1\\n2\\nabc\\n'", xs);
    FAIL("expected an error");
  } catch (const ExternalError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("abc") != std::string::npos);
  }
  CHECK_THROWS_AS(external_g("printf '1\\n'", xs), ExternalError);
  CHECK_THROWS_AS(external_g("cat >/dev/null; exit 4", xs), ExternalError);
  CHECK_THROWS_AS(external_g("printf '1,2\\n2\\n3\\n'", xs), ExternalError);
}

TEST_CASE("timeout") {
  const auto t0 = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(external_g("sleep 5", PointSet(1, {{1.0}}), 300ms), ExternalError);
  CHECK(std::chrono::steady_clock::now() - t0 < 3s);
}

TEST_CASE("locale does not leak into the protocol") {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  std::string saved = old ? old : "C";
  std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  const auto y = external_g("cut -d, -f1", PointSet(2, {{0.5, 1.0}}));
  std::setlocale(LC_NUMERIC, saved.c_str());
  CHECK(y[0] == 0.5);
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("external limit state counts one call per line") {
  LimitState g = LimitState::external("awk -F, '{print 2 - $1}'");
  const auto y = g(PointSet(2, {{1.0, 0.0}, {3.0, 1.0}, {1.0, 0.0}}));
  CHECK(y[0] == 1.0);
  CHECK(y[1] == -1.0);
  CHECK(y[2] == 1.0);
  CHECK(g.calls() == 2);
}
