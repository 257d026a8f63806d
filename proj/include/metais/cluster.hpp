#pragma once

#include <vector>

#include "metais/types.hpp"

namespace metais {

struct KMeansResult {
  PointSet centers;                      ///< in input coordinates
  std::vector<std::size_t> assignments;  ///< center index per input point
  double inertia = 0.0;                  ///< sum of squared (scaled) distances to assigned centers
  std::size_t iterations = 0;
};

struct KMeansOptions {
  std::size_t max_iter = 100;
  std::size_t restarts = 5;
  /// Per-coordinate scale; distances are measured on x_k / scale_k. Empty means unscaled.
  std::vector<double> scale;
};

/// Lloyd iterations from k-means++ seeding, best of `restarts` by inertia
/// (ties keep the earlier restart). Empty clusters are reseeded at the point
/// farthest from its center.
KMeansResult kmeans(const PointSet& points, std::size_t k, Rng& rng, const KMeansOptions& options);
KMeansResult kmeans(const PointSet& points, std::size_t k, Rng& rng, std::size_t max_iter = 100);

}  // namespace metais
