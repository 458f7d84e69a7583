#pragma once

// Ground-truth scenes for testing: a rasterizer for ellipse contours plus
// clutter, a seeded scene generator and a parameter-space grader.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rht/errors.hpp"
#include "rht/geometry.hpp"
#include "rht/random.hpp"
#include "rht/raster.hpp"
#include "rht/types.hpp"

namespace rht {

struct SceneSpec {
  int width = 320;
  int height = 240;
  std::vector<Ellipse> ellipses; // quality is ignored
  std::size_t clutter_points = 0;
  double contour_thickness = 2.0; // full width of the drawn band, px
  std::uint64_t rng_seed = 1;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

namespace detail {

struct PixelBox {
  int x_lo, x_hi, y_lo, y_hi;
};

inline PixelBox bounding_box(const Ellipse& e, double pad, int width, int height) {
  const double c = std::cos(e.alpha);
  const double s = std::sin(e.alpha);
  const double ex = std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s) + pad;
  const double ey = std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c) + pad;
  return {std::max(0, int(std::floor(e.x0 - ex))), std::min(width - 1, int(std::ceil(e.x0 + ex))),
          std::max(0, int(std::floor(e.y0 - ey))), std::min(height - 1, int(std::ceil(e.y0 + ey)))};
}

inline double half_extent_x(const Ellipse& e) {
  const double c = std::cos(e.alpha), s = std::sin(e.alpha);
  return std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s);
}

inline double half_extent_y(const Ellipse& e) {
  const double c = std::cos(e.alpha), s = std::sin(e.alpha);
  return std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c);
}

} // namespace detail

/// Pixels of a contour band `thickness` px wide, i.e. those within
/// thickness / 2 of the contour under the detector's band predicate.
/// Row-major order, clipped to the frame.
inline std::vector<Point> contour_pixels(const Ellipse& e, double thickness, int width, int height) {
  const double half = thickness / 2.0;
  const auto box = detail::bounding_box(e, half + 1.0, width, height);
  std::vector<Point> out;
  for (int y = box.y_lo; y <= box.y_hi; ++y) {
    for (int x = box.x_lo; x <= box.x_hi; ++x) {
      if (near_contour(e, x, y, half)) out.push_back({x, y});
    }
  }
  return out;
}

/// Throws ConfigError unless every ellipse sits inside the frame with a
/// margin of at least the contour thickness and no two contour bands touch.
inline void validate(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1) throw ConfigError("scene frame must be non-empty");
  if (!(spec.contour_thickness > 0.0)) throw ConfigError("contour_thickness must be positive");
  const double t = spec.contour_thickness;
  for (const Ellipse& e : spec.ellipses) {
    if (!(e.a > 0.0 && e.b > 0.0)) throw ConfigError("scene ellipse needs a, b > 0");
    const double ex = detail::half_extent_x(e), ey = detail::half_extent_y(e);
    if (e.x0 - ex < t || e.y0 - ey < t || e.x0 + ex > spec.width - 1 - t ||
        e.y0 + ey > spec.height - 1 - t) {
      throw ConfigError(fmt::format("ellipse at ({}, {}) does not fit the frame with margin {}",
                                    e.x0, e.y0, t));
    }
  }
  constexpr int kSamples = 720;
  for (std::size_t i = 0; i < spec.ellipses.size(); ++i) {
    for (std::size_t j = 0; j < spec.ellipses.size(); ++j) {
      if (i == j) continue;
      const Ellipse& e = spec.ellipses[i];
      const Ellipse& other = spec.ellipses[j];
      for (int k = 0; k < kSamples; ++k) {
        const double t_param = 2.0 * kPi * k / kSamples;
        const double u = e.a * std::cos(t_param), v = e.b * std::sin(t_param);
        const double x = e.x0 + u * std::cos(e.alpha) - v * std::sin(e.alpha);
        const double y = e.y0 + u * std::sin(e.alpha) + v * std::cos(e.alpha);
        if (contour_distance(other, x, y) <= t) {
          throw ConfigError(fmt::format("contours of scene ellipses {} and {} touch", i, j));
        }
      }
    }
  }
}

/// Draws every ellipse contour band, then adds `clutter_points` distinct
/// random foreground pixels (draws landing on foreground are repeated).
inline EdgeMap rasterize(const SceneSpec& spec) {
  validate(spec);
  EdgeMap edges(spec.width, spec.height);
  for (const Ellipse& e : spec.ellipses) {
    for (const Point& p : contour_pixels(e, spec.contour_thickness, spec.width, spec.height)) {
      edges.insert(p);
    }
  }
  const std::size_t area = std::size_t(spec.width) * std::size_t(spec.height);
  if (edges.size() + spec.clutter_points > area) throw ConfigError("clutter does not fit the frame");
  Rng rng(spec.rng_seed);
  for (std::size_t placed = 0; placed < spec.clutter_points;) {
    const Point p{int(draw_index(rng, std::size_t(spec.width))),
                  int(draw_index(rng, std::size_t(spec.height)))};
    if (edges.insert(p)) ++placed;
  }
  return edges;
}

// ---------------------------------------------------------------------------
// Grading
// ---------------------------------------------------------------------------

struct GradeTolerance {
  double center = 2.0; // px, per coordinate
  double axes = 3.0;   // px, per half axis
  double alpha = 0.1;  // rad, modulo pi
};

struct ParameterError {
  double center_x = 0.0;
  double center_y = 0.0;
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;
};

struct GradeResult {
  std::size_t matched = 0;
  std::size_t false_positives = 0;
  std::vector<std::pair<std::size_t, std::size_t>> matches; // (detected, truth)
  std::vector<ParameterError> errors;                       // parallel to matches
};

inline ParameterError parameter_error(const Ellipse& detected, const Ellipse& truth) {
  return {std::abs(detected.x0 - truth.x0), std::abs(detected.y0 - truth.y0),
          std::abs(detected.a - truth.a), std::abs(detected.b - truth.b),
          orientation_difference(detected.alpha, truth.alpha)};
}

inline bool within(const ParameterError& err, const GradeTolerance& tol) {
  return err.center_x <= tol.center && err.center_y <= tol.center && err.a <= tol.axes &&
         err.b <= tol.axes && err.alpha <= tol.alpha;
}

/// Greedy one-to-one matching, closest feature distance first, among
/// detection/truth pairs that agree within tolerance. Unmatched detections
/// are false positives.
inline GradeResult grade(std::span<const Ellipse> detected, std::span<const Ellipse> truth,
                         const GradeTolerance& tol = {}) {
  struct Candidate {
    double distance;
    std::size_t det;
    std::size_t tru;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < detected.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const ParameterError err = parameter_error(detected[i], truth[j]);
      if (!within(err, tol)) continue;
      const double dist = std::sqrt(err.center_x * err.center_x + err.center_y * err.center_y +
                                    err.a * err.a + err.b * err.b + err.alpha * err.alpha);
      candidates.push_back({dist, i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& l, const Candidate& r) { return l.distance < r.distance; });

  GradeResult result;
  std::vector<bool> det_used(detected.size(), false), truth_used(truth.size(), false);
  for (const Candidate& c : candidates) {
    if (det_used[c.det] || truth_used[c.tru]) continue;
    det_used[c.det] = truth_used[c.tru] = true;
    result.matches.emplace_back(c.det, c.tru);
    result.errors.push_back(parameter_error(detected[c.det], truth[c.tru]));
  }
  result.matched = result.matches.size();
  result.false_positives = detected.size() - result.matched;
  return result;
}

// ---------------------------------------------------------------------------
// Scene generation
// ---------------------------------------------------------------------------

/// Number of band pixels the true vertex pair would put into its fullest
/// minor-axis bin. Uses the closed form b = a |v| / sqrt(a^2 - u^2) in the
/// ellipse frame rather than the detector's triangle formulas.
inline std::size_t vertex_pair_support(const Ellipse& e, double thickness, double bin_width,
                                       double b_floor, int width, int height) {
  std::vector<std::size_t> bins(std::size_t(std::floor(e.a / bin_width)) + 1, 0);
  for (const Point& p : contour_pixels(e, thickness, width, height)) {
    const auto [u, v] = to_ellipse_frame(e, p.x, p.y);
    if (std::abs(u) >= e.a) continue;
    const double b = e.a * std::abs(v) / std::sqrt(e.a * e.a - u * u);
    if (b < b_floor || b > e.a) continue;
    ++bins[std::size_t(std::floor(b / bin_width))];
  }
  return *std::max_element(bins.begin(), bins.end());
}

struct SceneDistribution {
  int width = 320;
  int height = 240;
  int min_ellipses = 1;
  int max_ellipses = 3;
  double a_low = 15.0;
  double a_high = 70.0;
  double b_low = 8.0; // b is drawn from [max(b_low, b_ratio_low * a), b_ratio_high * a)
  double b_ratio_low = 0.0;
  double b_ratio_high = 1.0;
  double contour_thickness = 2.0;
  std::size_t clutter_points = 150;
  // Detectability: each ellipse must give its true vertex pair at least
  // `min_support` votes in one accumulator bin.
  std::size_t min_support = 200;
  double bin_width = 2.0;
  double b_floor = 5.0;
};

/// Seeded random scene. Ellipses that would be undetectable at the given
/// support level, or that crowd another ellipse, are redrawn.
inline SceneSpec generate_scene(const SceneDistribution& dist, std::uint64_t seed) {
  Rng rng(seed);
  const double t = dist.contour_thickness;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SceneSpec spec;
    spec.width = dist.width;
    spec.height = dist.height;
    spec.clutter_points = dist.clutter_points;
    spec.contour_thickness = t;
    spec.rng_seed = rng();
    const int count =
        dist.min_ellipses + int(draw_index(rng, std::size_t(dist.max_ellipses - dist.min_ellipses + 1)));
    for (int tries = 0; tries < 500 && int(spec.ellipses.size()) < count; ++tries) {
      Ellipse e;
      e.a = draw_uniform(rng, dist.a_low, dist.a_high);
      const double b_lo = std::max(dist.b_low, dist.b_ratio_low * e.a);
      const double b_hi = dist.b_ratio_high * e.a;
      if (b_hi <= b_lo) continue;
      e.b = draw_uniform(rng, b_lo, b_hi);
      e.alpha = draw_uniform(rng, 0.0, kPi);
      const double ex = detail::half_extent_x(e) + t + 1.0;
      const double ey = detail::half_extent_y(e) + t + 1.0;
      if (2.0 * ex >= dist.width - 1 || 2.0 * ey >= dist.height - 1) continue;
      e.x0 = draw_uniform(rng, ex, dist.width - 1 - ex);
      e.y0 = draw_uniform(rng, ey, dist.height - 1 - ey);
      const bool crowded = std::any_of(spec.ellipses.begin(), spec.ellipses.end(), [&](const Ellipse& o) {
        return std::hypot(o.x0 - e.x0, o.y0 - e.y0) <= o.a + e.a + 2.0 * t;
      });
      if (crowded) continue;
      if (vertex_pair_support(e, t, dist.bin_width, dist.b_floor, dist.width, dist.height) <
          dist.min_support) {
        continue;
      }
      spec.ellipses.push_back(e);
    }
    if (int(spec.ellipses.size()) == count) return spec;
  }
  throw ConfigError("scene distribution admits no scene");
}

// ---------------------------------------------------------------------------
// Scene files
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json scene_to_json(const SceneSpec& spec) {
  nlohmann::ordered_json ellipses = nlohmann::ordered_json::array();
  for (const Ellipse& e : spec.ellipses) {
    ellipses.push_back({{"x0", e.x0}, {"y0", e.y0}, {"a", e.a}, {"b", e.b}, {"alpha", e.alpha}});
  }
  return {{"width", spec.width},
          {"height", spec.height},
          {"contour_thickness", spec.contour_thickness},
          {"clutter_points", spec.clutter_points},
          {"rng_seed", spec.rng_seed},
          {"ellipses", std::move(ellipses)}};
}

inline SceneSpec scene_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SceneSpec spec;
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.contour_thickness = j.value("contour_thickness", spec.contour_thickness);
    spec.clutter_points = j.value("clutter_points", spec.clutter_points);
    spec.rng_seed = j.value("rng_seed", spec.rng_seed);
    for (const auto& item : j.at("ellipses")) {
      Ellipse e;
      e.x0 = item.at("x0").get<double>();
      e.y0 = item.at("y0").get<double>();
      e.a = item.at("a").get<double>();
      e.b = item.at("b").get<double>();
      e.alpha = item.value("alpha", 0.0);
      spec.ellipses.push_back(e);
    }
    return spec;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(fmt::format("invalid scene file: {}", ex.what()));
  }
}

} // namespace rht
