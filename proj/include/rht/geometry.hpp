#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "rht/types.hpp"

namespace rht {

inline constexpr double kPi = std::numbers::pi;

/// Folds an angle into [0, pi); ellipse orientation has period pi.
inline double normalize_orientation(double angle) {
  double r = std::fmod(angle, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

/// Smallest difference between two orientations, modulo pi. Result in [0, pi/2].
inline double orientation_difference(double lhs, double rhs) {
  const double d = normalize_orientation(lhs - rhs);
  return std::min(d, kPi - d);
}

// Coordinates in the ellipse's own frame: u along the major axis, v along the minor.
struct FramePoint {
  double u = 0.0;
  double v = 0.0;
};

inline FramePoint to_ellipse_frame(const Ellipse& e, double x, double y) {
  const double dx = x - e.x0;
  const double dy = y - e.y0;
  const double c = std::cos(e.alpha);
  const double s = std::sin(e.alpha);
  return {c * dx + s * dy, -s * dx + c * dy};
}

/// Normalized implicit form (u/a)^2 + (v/b)^2 - 1: negative inside, zero on the
/// contour, positive outside.
inline double implicit_residual(const Ellipse& e, double x, double y) {
  const auto [u, v] = to_ellipse_frame(e, x, y);
  return (u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) - 1.0;
}

/// First-order (Sampson) distance to the contour: |Q| / |grad Q|. Accurate to
/// first order near the contour. Infinite at the center.
inline double approx_contour_distance(const Ellipse& e, double x, double y) {
  const auto [u, v] = to_ellipse_frame(e, x, y);
  const double a2 = e.a * e.a;
  const double b2 = e.b * e.b;
  const double q = u * u / a2 + v * v / b2 - 1.0;
  const double gu = u / a2;
  const double gv = v / b2;
  const double grad = 2.0 * std::sqrt(gu * gu + gv * gv);
  if (grad == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(q) / grad;
}

/// Band predicate shared by the contour census and the scene rasterizer.
inline bool near_contour(const Ellipse& e, double x, double y, double tolerance) {
  return approx_contour_distance(e, x, y) <= tolerance;
}

/// Which side of the major-axis line a point lies on: -1, 0 or +1.
inline int major_axis_side(const Ellipse& e, double x, double y) {
  const double v = to_ellipse_frame(e, x, y).v;
  return (v > 0.0) - (v < 0.0);
}

namespace detail {

// Root of the distance equation for a first-quadrant point, by bisection
// (D. Eberly, "Distance from a Point to an Ellipse").
inline double distance_root(double r0, double z0, double z1, double g) {
  const double n0 = r0 * z0;
  double s0 = z1 - 1.0;
  double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
  double s = 0.0;
  for (int i = 0; i < 1100; ++i) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double ratio0 = n0 / (s + r0);
    const double ratio1 = z1 / (s + 1.0);
    g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
    if (g > 0.0) {
      s0 = s;
    } else if (g < 0.0) {
      s1 = s;
    } else {
      break;
    }
  }
  return s;
}

// e0 >= e1 > 0, y0 >= 0, y1 >= 0.
inline double first_quadrant_distance(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double sbar = distance_root(r0, z0, z1, g);
      const double x0 = r0 * y0 / (sbar + r0);
      const double x1 = y1 / (sbar + 1.0);
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::abs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    const double x0 = e0 * xde0;
    const double x1 = e1 * std::sqrt(1.0 - xde0 * xde0);
    return std::hypot(x0 - y0, x1);
  }
  return std::abs(y0 - e0);
}

} // namespace detail

/// Exact Euclidean distance from (x, y) to the ellipse contour. Accepts either
/// axis being the longer one.
inline double contour_distance(const Ellipse& e, double x, double y) {
  auto [u, v] = to_ellipse_frame(e, x, y);
  double e0 = e.a;
  double e1 = e.b;
  if (e1 > e0) {
    std::swap(e0, e1);
    std::swap(u, v);
  }
  return detail::first_quadrant_distance(e0, e1, std::abs(u), std::abs(v));
}

} // namespace rht
