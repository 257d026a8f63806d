#include <doctest.h>

#include <cmath>
#include <numeric>

#include "metais/cluster.hpp"
#include "metais/simd.hpp"

using namespace metais;

namespace {

PointSet blobs(Rng& rng, std::size_t per, std::vector<std::vector<double>> means, double spread) {
  std::normal_distribution<double> z(0.0, spread);
  PointSet out(means[0].size());
  for (std::size_t i = 0; i < per; ++i)
    for (const auto& m : means) {
      std::vector<double> x = m;
      for (double& v : x) v += z(rng);
      out.push_back(x);
    }
  return out;
}

}  // namespace

TEST_CASE("k equal to N reproduces the points") {
  const PointSet pts(2, {{0.0, 0.0}, {1.0, 2.0}, {-3.0, 1.0}, {5.0, 5.0}});
  Rng rng = make_rng(1);
  const KMeansResult r = kmeans(pts, 4, rng);
  CHECK(r.inertia == 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = r.centers[r.assignments[i]];
    CHECK(c[0] == pts[i][0]);
    CHECK(c[1] == pts[i][1]);
  }
}

TEST_CASE("single cluster is the mean") {
  Rng rng = make_rng(2);
  const PointSet pts = blobs(rng, 300, {{1.0, -2.0, 0.5}}, 1.0);
  const KMeansResult r = kmeans(pts, 1, rng);
  for (std::size_t k = 0; k < 3; ++k) {
    double m = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) m += pts[i][k];
    CHECK(r.centers[0][k] == doctest::Approx(m / pts.size()).epsilon(1e-12));
  }
}

TEST_CASE("two separated blobs") {
  Rng rng = make_rng(3);
  const PointSet pts = blobs(rng, 200, {{-10.0, 0.0}, {10.0, 5.0}}, 0.5);
  const KMeansResult r = kmeans(pts, 2, rng);
  std::vector<double> xs{r.centers[0][0], r.centers[1][0]};
  const std::size_t left = xs[0] < xs[1] ? 0 : 1;
  CHECK(std::abs(r.centers[left][0] + 10.0) < 0.5);
  CHECK(std::abs(r.centers[left][1]) < 0.5);
  CHECK(std::abs(r.centers[1 - left][0] - 10.0) < 0.5);
  CHECK(std::abs(r.centers[1 - left][1] - 5.0) < 0.5);
}

TEST_CASE("centers are cluster means and inertia is consistent") {
  Rng rng = make_rng(4);
  const PointSet pts = blobs(rng, 100, {{0.0, 0.0}, {3.0, 0.0}, {0.0, 3.0}}, 1.0);
  const KMeansResult r = kmeans(pts, 3, rng);
  double inertia = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> m(2, 0.0);
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (r.assignments[i] == c) {
        ++cnt;
        m[0] += pts[i][0];
        m[1] += pts[i][1];
        inertia += std::pow(pts[i][0] - r.centers[c][0], 2) + std::pow(pts[i][1] - r.centers[c][1], 2);
      }
    REQUIRE(cnt > 0);
    CHECK(std::abs(m[0] / cnt - r.centers[c][0]) <= 1e-10);
    CHECK(std::abs(m[1] / cnt - r.centers[c][1]) <= 1e-10);
  }
  CHECK(r.inertia == doctest::Approx(inertia).epsilon(1e-10));
}

TEST_CASE("inertia decreases with k") {
  Rng data_rng = make_rng(5);
  const PointSet pts = blobs(data_rng, 80, {{0.0, 0.0}, {2.0, 1.0}, {-1.0, 3.0}}, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 8; ++k) {
    Rng rng = make_rng(6);
    const double inertia = kmeans(pts, k, rng).inertia;
    CHECK(inertia <= prev);
    prev = inertia;
  }
}

TEST_CASE("determinism and errors") {
  Rng data_rng = make_rng(7);
  const PointSet pts = blobs(data_rng, 50, {{0.0, 0.0}, {4.0, 4.0}}, 1.0);
  Rng a = make_rng(8), b = make_rng(8);
  const KMeansResult ra = kmeans(pts, 3, a), rb = kmeans(pts, 3, b);
  CHECK(ra.centers == rb.centers);
  CHECK(ra.assignments == rb.assignments);
  Rng c = make_rng(9);
  CHECK_THROWS_AS(kmeans(PointSet(2, {{0.0, 0.0}}), 2, c), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(pts, 0, c), std::invalid_argument);
}

TEST_CASE("scaling and dimension permutation") {
  Rng data_rng = make_rng(10);
  PointSet pts = blobs(data_rng, 60, {{0.0, 0.0}, {0.1, 100.0}, {0.2, -100.0}}, 1.0);
  PointSet swapped(2);
  for (std::size_t i = 0; i < pts.size(); ++i) swapped.push_back(std::vector<double>{pts[i][1], pts[i][0]});
  KMeansOptions o1, o2;
  o1.scale = {0.1, 100.0};
  o2.scale = {100.0, 0.1};
  Rng a = make_rng(11), b = make_rng(11);
  const KMeansResult r1 = kmeans(pts, 3, a, o1);
  const KMeansResult r2 = kmeans(swapped, 3, b, o2);
  CHECK(r1.assignments == r2.assignments);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(r1.centers[c][0] == doctest::Approx(r2.centers[c][1]).epsilon(1e-12));
    CHECK(r1.centers[c][1] == doctest::Approx(r2.centers[c][0]).epsilon(1e-12));
  }
}

TEST_CASE("identical across SIMD levels") {
  Rng data_rng = make_rng(12);
  const PointSet pts = blobs(data_rng, 200, {{0.0, 0.0, 1.0}, {2.0, 1.0, 0.0}, {1.0, 3.0, 2.0}}, 1.0);
  const simd::Level before = simd::active();
  simd::set_active(simd::Level::scalar);
  Rng a = make_rng(13);
  const KMeansResult ref = kmeans(pts, 4, a);
  simd::set_active(simd::best_supported());
  Rng b = make_rng(13);
  const KMeansResult got = kmeans(pts, 4, b);
  simd::set_active(before);
  CHECK(ref.centers == got.centers);
  CHECK(ref.assignments == got.assignments);
  CHECK(ref.inertia == got.inertia);
}
