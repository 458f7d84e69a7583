#pragma once

// Randomized Hough Transform ellipse detector.
//
// A pair of edge points is taken as the two vertices of the major axis, which
// fixes the center, the half major axis and the orientation. Every other edge
// point then votes for the half minor axis through the triangle it forms with
// the center and a vertex; the votes land in a 1-D quantized accumulator.
// Pairs are drawn at random, C * n of them for n edge points, and edge points
// are never removed once an ellipse has been found.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "rht/errors.hpp"
#include "rht/geometry.hpp"
#include "rht/random.hpp"
#include "rht/raster.hpp"
#include "rht/types.hpp"

namespace rht {

struct DetectionConfig {
  int c_factor = 2;                  // pairs drawn per edge point
  double a_min = 10.0;               // half major axis bounds, px
  double a_max = 100.0;
  double b_min = 5.0;                // smallest half minor axis, px
  std::size_t quality_threshold = 200; // minimum accumulator peak
  double side_balance_min = 0.35;    // min/max of contour counts across the major axis
  double contour_tolerance = 1.5;    // px, contour census band
  double accumulator_bin_width = 2.0; // px
  std::uint64_t rng_seed = 1;
};

inline void validate(const DetectionConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (c.c_factor < 1) fail(fmt::format("c_factor must be >= 1, got {}", c.c_factor));
  if (!(c.a_min > 0.0)) fail("a_min must be positive");
  if (!(c.a_min <= c.a_max)) fail(fmt::format("a_min {} exceeds a_max {}", c.a_min, c.a_max));
  if (!(c.b_min > 0.0)) fail("b_min must be positive");
  if (c.quality_threshold < 1) fail("quality_threshold must be >= 1");
  if (!(c.side_balance_min > 0.0 && c.side_balance_min <= 1.0)) {
    fail(fmt::format("side_balance_min must lie in (0, 1], got {}", c.side_balance_min));
  }
  if (!(c.contour_tolerance > 0.0)) fail("contour_tolerance must be positive");
  if (!(c.accumulator_bin_width > 0.0)) fail("accumulator_bin_width must be positive");
}

struct VertexPair {
  Point p1;
  Point p2;
  friend bool operator==(const VertexPair&, const VertexPair&) = default;
};

/// Center, half major axis and orientation fixed by a vertex pair.
struct VertexGeometry {
  double x0 = 0.0;
  double y0 = 0.0;
  double a = 0.0;
  double alpha = 0.0;
};

inline VertexGeometry params_from_vertices(const VertexPair& pair) {
  const double dx = double(pair.p2.x) - pair.p1.x;
  const double dy = double(pair.p2.y) - pair.p1.y;
  VertexGeometry g;
  g.x0 = (double(pair.p1.x) + pair.p2.x) / 2.0;
  g.y0 = (double(pair.p1.y) + pair.p2.y) / 2.0;
  g.a = std::hypot(dx, dy) / 2.0;
  g.alpha = dx == 0.0 ? kPi / 2.0 : normalize_orientation(std::atan2(dy, dx));
  return g;
}

/// Half minor axis implied by a third contour point.
///
/// With d = |third - center| and f = |third - vertex|, the angle tau at the
/// center satisfies cos(tau) = (a^2 + d^2 - f^2) / (2 a d), and
/// b^2 = a^2 d^2 sin^2(tau) / (a^2 - d^2 cos^2(tau)). Both factors are
/// evaluated in factored triangle form so that points close to a vertex keep
/// their precision. Empty when the point cannot lie on an ellipse with this
/// center, axis and orientation.
inline std::optional<double> vote_minor_axis(double cx, double cy, double a, double tx, double ty,
                                             double vx, double vy) {
  const double dx = tx - cx;
  const double dy = ty - cy;
  const double d2 = dx * dx + dy * dy;
  const double d = std::sqrt(d2);
  if (d == 0.0 || d > a) return std::nullopt;
  const double fx = tx - vx;
  const double fy = ty - vy;
  const double f2 = fx * fx + fy * fy;
  const double f = std::sqrt(f2);

  const double two_ad = 2.0 * a * d;
  const double cos_tau = (a * a + d2 - f2) / two_ad;
  if (!(std::abs(cos_tau) <= 1.0)) return std::nullopt;

  // 1 - cos(tau) and 1 + cos(tau)
  const double one_minus = (f - a + d) * (f + a - d) / two_ad;
  const double one_plus = (a + d - f) * (a + d + f) / two_ad;
  const double sin2 = std::max(0.0, one_minus * one_plus);

  // a^2 - (d cos tau)^2 = (a - d cos tau)(a + d cos tau)
  const double a_minus = (f2 + (a - d) * (a + d)) / (2.0 * a);
  const double a_plus = (3.0 * a * a + d2 - f2) / (2.0 * a);
  const double denom = a_minus * a_plus;
  if (!(denom > 0.0)) return std::nullopt;

  const double b2 = a * a * d2 * sin2 / denom;
  if (!std::isfinite(b2)) return std::nullopt;
  return std::sqrt(b2);
}

inline std::optional<double> vote_minor_axis(const VertexGeometry& g, Point third, Point vertex) {
  return vote_minor_axis(g.x0, g.y0, g.a, third.x, third.y, vertex.x, vertex.y);
}

/// Quantized vote histogram over the half minor axis. Bin i covers
/// [i * width, (i + 1) * width); only votes in [b_low, b_high] are counted.
class MinorAxisAccumulator {
public:
  struct Peak {
    std::size_t index = 0;
    std::size_t votes = 0;
    double value = 0.0; // bin center
  };

  MinorAxisAccumulator(double bin_width, double b_low, double b_high)
      : bin_width_(bin_width), b_low_(b_low), b_high_(b_high),
        bins_(static_cast<std::size_t>(std::floor(std::max(b_high, 0.0) / bin_width)) + 1, 0) {}

  std::size_t bin_index(double b) const { return static_cast<std::size_t>(std::floor(b / bin_width_)); }
  double bin_center(std::size_t index) const { return (double(index) + 0.5) * bin_width_; }
  double bin_width() const noexcept { return bin_width_; }

  bool vote(double b) {
    if (!(b >= b_low_ && b <= b_high_)) return false;
    ++bins_[bin_index(b)];
    ++total_;
    return true;
  }

  /// Highest bin; ties go to the smaller b.
  Peak peak() const {
    Peak p;
    for (std::size_t i = 0; i < bins_.size(); ++i) {
      if (bins_[i] > p.votes) {
        p.votes = bins_[i];
        p.index = i;
      }
    }
    p.value = bin_center(p.index);
    return p;
  }

  std::size_t total_votes() const noexcept { return total_; }
  std::span<const std::size_t> bins() const noexcept { return bins_; }

  // Re-targets the accumulator for another hypothesis without reallocating.
  void reset(double b_low, double b_high) {
    b_low_ = b_low;
    b_high_ = b_high;
    const auto needed = static_cast<std::size_t>(std::floor(std::max(b_high, 0.0) / bin_width_)) + 1;
    bins_.assign(std::max(needed, bins_.size()), 0);
    total_ = 0;
  }

private:
  double bin_width_;
  double b_low_;
  double b_high_;
  std::vector<std::size_t> bins_;
  std::size_t total_ = 0;
};

/// Draws m = C * n vertex-pair candidates, two independent uniform indices per
/// draw. Draws whose endpoints coincide or whose separation falls outside
/// [2 a_min, 2 a_max] are discarded but still use up the budget.
inline std::vector<VertexPair> sample_pairs(const EdgeMap& edges, const DetectionConfig& config,
                                            Rng& rng) {
  if (edges.empty()) throw NoEdgesError("edge map has no foreground pixels");
  const auto points = edges.points();
  const std::size_t n = points.size();
  const std::size_t m = static_cast<std::size_t>(config.c_factor) * n;
  const double lo2 = 4.0 * config.a_min * config.a_min;
  const double hi2 = 4.0 * config.a_max * config.a_max;

  std::vector<VertexPair> pairs;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = draw_index(rng, n);
    const std::size_t j = draw_index(rng, n);
    if (i == j) continue;
    const double dx = double(points[j].x) - points[i].x;
    const double dy = double(points[j].y) - points[i].y;
    const double dist2 = dx * dx + dy * dy;
    if (dist2 < lo2 || dist2 > hi2) continue;
    pairs.push_back({points[i], points[j]});
  }
  return pairs;
}

namespace detail {

inline std::optional<Ellipse> detect_candidate(const VertexPair& pair, const EdgeMap& edges,
                                               const DetectionConfig& config,
                                               MinorAxisAccumulator& acc) {
  const VertexGeometry g = params_from_vertices(pair);
  acc.reset(config.b_min, g.a);
  const double a2 = g.a * g.a;
  for (const Point& p : edges.points()) {
    if (p == pair.p1 || p == pair.p2) continue;
    const double dx = p.x - g.x0;
    const double dy = p.y - g.y0;
    if (dx * dx + dy * dy > a2) continue;
    // Either vertex gives the same b on an exact ellipse; the nearer one is
    // better conditioned.
    const double d1 = std::hypot(double(p.x) - pair.p1.x, double(p.y) - pair.p1.y);
    const double d2 = std::hypot(double(p.x) - pair.p2.x, double(p.y) - pair.p2.y);
    const Point vertex = d1 <= d2 ? pair.p1 : pair.p2;
    if (const auto b = vote_minor_axis(g, p, vertex)) acc.vote(*b);
  }
  const auto peak = acc.peak();
  if (peak.votes < config.quality_threshold || peak.value < config.b_min || peak.value > g.a) {
    return std::nullopt;
  }
  return Ellipse{g.x0, g.y0, g.a, peak.value, g.alpha, peak.votes};
}

} // namespace detail

/// Accumulates minor-axis votes from every other edge point for one vertex
/// pair. Yields an ellipse at the accumulator peak if the peak holds at least
/// `quality_threshold` votes. The edge map is only read.
inline std::optional<Ellipse> detect_candidate(const VertexPair& pair, const EdgeMap& edges,
                                               const DetectionConfig& config) {
  MinorAxisAccumulator acc(config.accumulator_bin_width, config.b_min, 0.0);
  return detail::detect_candidate(pair, edges, config, acc);
}

/// Edge points near a candidate contour, split by side of the major axis
/// (`positive` / `negative`) and, independently, by side of the minor axis
/// (`leading` / `trailing`, i.e. the two vertex ends).
struct ContourCensus {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t on_axis = 0;
  std::size_t leading = 0;
  std::size_t trailing = 0;

  std::size_t total() const noexcept { return positive + negative + on_axis; }

  double balance() const noexcept { return ratio(positive, negative); }
  double end_balance() const noexcept { return ratio(leading, trailing); }

private:
  static double ratio(std::size_t l, std::size_t r) noexcept {
    const auto hi = std::max(l, r);
    return hi == 0 ? 0.0 : double(std::min(l, r)) / double(hi);
  }
};

inline ContourCensus contour_census(const Ellipse& e, const EdgeMap& edges, double tolerance) {
  ContourCensus census;
  for (const Point& p : edges.points()) {
    if (!near_contour(e, p.x, p.y, tolerance)) continue;
    const auto [u, v] = to_ellipse_frame(e, p.x, p.y);
    if (v > 0.0) {
      ++census.positive;
    } else if (v < 0.0) {
      ++census.negative;
    } else {
      ++census.on_axis;
    }
    if (u > 0.0) ++census.leading;
    if (u < 0.0) ++census.trailing;
  }
  return census;
}

/// False-ellipse filter. The contour must carry edge points on both sides of
/// the major axis in roughly proportional numbers, the two vertex ends must be
/// similarly balanced, and at least `quality_threshold` edge points must lie
/// on the contour in total.
inline bool filter_candidate(const Ellipse& candidate, const EdgeMap& edges,
                             const DetectionConfig& config) {
  const ContourCensus c = contour_census(candidate, edges, config.contour_tolerance);
  return c.positive > 0 && c.negative > 0 && c.balance() >= config.side_balance_min &&
         c.end_balance() >= config.side_balance_min && c.total() >= config.quality_threshold;
}

struct DetectionResult {
  std::vector<Ellipse> ellipses; // accepted candidates in draw order ("virtual" ellipses)
  RunStats stats;
};

/// Full randomized pass: sample pairs, vote, filter. Deterministic in
/// (edges, config); stats.real_ellipses is left at 0 for the clustering stage.
inline DetectionResult detect_all(const EdgeMap& edges, const DetectionConfig& config) {
  validate(config);
  Rng rng(config.rng_seed);
  const std::vector<VertexPair> pairs = sample_pairs(edges, config, rng);

  DetectionResult result;
  MinorAxisAccumulator acc(config.accumulator_bin_width, config.b_min, config.a_max);
  for (const VertexPair& pair : pairs) {
    auto candidate = detail::detect_candidate(pair, edges, config, acc);
    if (candidate && filter_candidate(*candidate, edges, config)) {
      result.ellipses.push_back(*candidate);
    }
  }
  result.stats.virtual_ellipses = result.ellipses.size();
  result.stats.real_ellipses = 0;
  result.stats.ellipse_quality = config.quality_threshold;
  result.stats.search_point_pairs = static_cast<std::size_t>(config.c_factor) * edges.size();
  result.stats.total_edge_points = edges.size();
  return result;
}

} // namespace rht
