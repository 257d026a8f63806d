#include "metais/cluster.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "metais/simd.hpp"

namespace metais {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Points in scaled coordinates, kept dimension-major for the distance kernel.
struct ScaledData {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> cols;
  std::vector<double> ones;

  std::vector<double> point(std::size_t i) const {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) x[k] = cols[k * n + i];
    return x;
  }
  // dist[i] = |x_i - c|^2
  void distances(const std::vector<double>& c, std::vector<double>& dist) const {
    simd::scaled_sq_dist(c, cols.data(), n, ones, dist);
  }
};

struct Run {
  std::vector<std::vector<double>> centers;
  std::vector<std::size_t> assignments;
  double inertia = kInf;
  std::size_t iterations = 0;
};

std::vector<std::vector<double>> seed_plus_plus(const ScaledData& data, std::size_t k, Rng& rng) {
  std::vector<std::vector<double>> centers;
  std::vector<double> best(data.n, kInf), dist(data.n);
  std::uniform_int_distribution<std::size_t> pick(0, data.n - 1);
  std::vector<char> chosen(data.n, 0);
  std::size_t first = pick(rng);
  chosen[first] = 1;
  centers.push_back(data.point(first));
  while (centers.size() < k) {
    data.distances(centers.back(), dist);
    double total = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      best[i] = std::min(best[i], dist[i]);
      if (!chosen[i]) total += best[i];
    }
    std::size_t next = data.n;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (std::size_t i = 0; i < data.n; ++i) {
        if (chosen[i]) continue;
        next = i;
        u -= best[i];
        if (u < 0.0) break;
      }
    } else {
      // every remaining point coincides with a center
      for (std::size_t i = 0; i < data.n && next == data.n; ++i)
        if (!chosen[i]) next = i;
    }
    chosen[next] = 1;
    centers.push_back(data.point(next));
  }
  return centers;
}

Run lloyd(const ScaledData& data, std::vector<std::vector<double>> centers, std::size_t max_iter) {
  const std::size_t k = centers.size();
  Run run;
  run.assignments.assign(data.n, k);
  std::vector<double> best(data.n), dist(data.n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::fill(best.begin(), best.end(), kInf);
    std::vector<std::size_t> assign(data.n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      data.distances(centers[c], dist);
      for (std::size_t i = 0; i < data.n; ++i)
        if (dist[i] < best[i]) {
          best[i] = dist[i];
          assign[i] = c;
        }
    }

    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assign) ++counts[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      // reseed at the farthest point from its current center
      const std::size_t far = static_cast<std::size_t>(std::max_element(best.begin(), best.end()) - best.begin());
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      best[far] = 0.0;
    }

    double inertia = 0.0;
    for (double b : best) inertia += b;
    const bool stable = assign == run.assignments;
    run.assignments = std::move(assign);
    run.inertia = inertia;
    run.iterations = iter + 1;
    if (stable) break;

    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t k2 = 0; k2 < data.dim; ++k2) {
      const double* col = data.cols.data() + k2 * data.n;
      for (std::size_t i = 0; i < data.n; ++i) centers[run.assignments[i]][k2] += col[i];
    }
    for (std::size_t c = 0; c < k; ++c)
      for (double& v : centers[c]) v /= static_cast<double>(counts[c]);
  }
  // inertia against the final centers
  run.inertia = 0.0;
  std::vector<double> acc(data.n, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    data.distances(centers[c], dist);
    for (std::size_t i = 0; i < data.n; ++i)
      if (run.assignments[i] == c) acc[i] = dist[i];
  }
  for (double a : acc) run.inertia += a;
  run.centers = std::move(centers);
  return run;
}

}  // namespace

KMeansResult kmeans(const PointSet& points, std::size_t k, Rng& rng, const KMeansOptions& options) {
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (n < k) throw std::invalid_argument("kmeans: fewer points than clusters");
  if (!options.scale.empty() && options.scale.size() != dim) throw DimensionError("kmeans: scale dimension mismatch");
  for (double s : options.scale)
    if (!(s > 0.0)) throw std::invalid_argument("kmeans: scale must be > 0");

  ScaledData data;
  data.n = n;
  data.dim = dim;
  data.cols = points.columns();
  data.ones.assign(dim, 1.0);
  if (!options.scale.empty())
    for (std::size_t d = 0; d < dim; ++d)
      for (std::size_t i = 0; i < n; ++i) data.cols[d * n + i] /= options.scale[d];

  Run best;
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    Run run = lloyd(data, seed_plus_plus(data, k, rng), std::max<std::size_t>(1, options.max_iter));
    if (run.inertia < best.inertia) best = std::move(run);
  }

  KMeansResult out;
  out.centers = PointSet(dim);
  for (auto& c : best.centers) {
    if (!options.scale.empty())
      for (std::size_t d = 0; d < dim; ++d) c[d] *= options.scale[d];
    out.centers.push_back(c);
  }
  out.assignments = std::move(best.assignments);
  out.inertia = best.inertia;
  out.iterations = best.iterations;
  return out;
}

KMeansResult kmeans(const PointSet& points, std::size_t k, Rng& rng, std::size_t max_iter) {
  KMeansOptions options;
  options.max_iter = max_iter;
  return kmeans(points, k, rng, options);
}

}  // namespace metais
