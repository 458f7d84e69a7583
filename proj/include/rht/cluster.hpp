#pragma once

// Single-pass clustering of detected ("virtual") ellipses. Each ellipse joins
// the nearest cluster whose centroid lies within the distance threshold, or
// starts a new one. The number of clusters is not known in advance.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "rht/geometry.hpp"
#include "rht/types.hpp"

namespace rht {

/// (x0, y0, a, b, alpha) in px, px, px, px, rad.
using FeatureVector = std::array<double, 5>;

inline FeatureVector feature_vector(const Ellipse& e) { return {e.x0, e.y0, e.a, e.b, e.alpha}; }

/// How the orientation component enters the distance. `Raw` subtracts the
/// angles as plain numbers; `Wrapped` uses the difference modulo pi.
enum class AngleMetric { Raw, Wrapped };

/// Euclidean distance in the unscaled 5-D feature space.
inline double distance(const FeatureVector& v, const FeatureVector& w,
                       AngleMetric angle = AngleMetric::Raw) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) sum += (v[i] - w[i]) * (v[i] - w[i]);
  const double da = angle == AngleMetric::Raw ? v[4] - w[4] : orientation_difference(v[4], w[4]);
  return std::sqrt(sum + da * da);
}

inline double distance(const Ellipse& v, const Ellipse& w, AngleMetric angle = AngleMetric::Raw) {
  return distance(feature_vector(v), feature_vector(w), angle);
}

struct Cluster {
  std::vector<Ellipse> members;
  FeatureVector centroid{};
  // Distance from each member to the centroid at the moment it joined
  // (0 for the founding member). Never exceeds the threshold.
  std::vector<double> admission_distances;
};

inline FeatureVector mean_feature(std::span<const Ellipse> members) {
  FeatureVector sum{};
  for (const Ellipse& e : members) {
    const auto f = feature_vector(e);
    for (std::size_t i = 0; i < 5; ++i) sum[i] += f[i];
  }
  for (double& s : sum) s /= double(members.size());
  return sum;
}

inline std::vector<Cluster> cluster_ellipses(std::span<const Ellipse> detections, double d_threshold,
                                             AngleMetric angle = AngleMetric::Raw) {
  if (!(d_threshold > 0.0)) throw std::invalid_argument("d_threshold must be positive");
  std::vector<Cluster> clusters;
  std::vector<FeatureVector> sums;
  for (const Ellipse& e : detections) {
    const FeatureVector f = feature_vector(e);
    std::size_t best = clusters.size();
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      const double dist = distance(f, clusters[k].centroid, angle);
      if (dist <= d_threshold && dist < best_distance) {
        best = k;
        best_distance = dist;
      }
    }
    if (best == clusters.size()) {
      clusters.push_back({{e}, f, {0.0}});
      sums.push_back(f);
      continue;
    }
    Cluster& c = clusters[best];
    c.members.push_back(e);
    c.admission_distances.push_back(best_distance);
    const double count = double(c.members.size());
    for (std::size_t i = 0; i < 5; ++i) {
      sums[best][i] += f[i];
      c.centroid[i] = sums[best][i] / count;
    }
  }
  return clusters;
}

/// The member nearest each centroid (earliest member on ties), in cluster order.
inline std::vector<Ellipse> representatives(std::span<const Cluster> clusters,
                                            AngleMetric angle = AngleMetric::Raw) {
  std::vector<Ellipse> out;
  out.reserve(clusters.size());
  for (const Cluster& c : clusters) {
    if (c.members.empty()) throw std::invalid_argument("cluster without members");
    const Ellipse* best = &c.members.front();
    double best_distance = distance(feature_vector(*best), c.centroid, angle);
    for (const Ellipse& m : c.members) {
      const double dist = distance(feature_vector(m), c.centroid, angle);
      if (dist < best_distance) {
        best = &m;
        best_distance = dist;
      }
    }
    out.push_back(*best);
  }
  return out;
}

} // namespace rht
