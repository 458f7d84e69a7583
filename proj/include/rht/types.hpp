#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>

namespace rht {

// Integer pixel coordinate. Ordering is row-major (y first, then x).
struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
  friend std::strong_ordering operator<=>(const Point& l, const Point& r) {
    if (auto c = l.y <=> r.y; c != 0) return c;
    return l.x <=> r.x;
  }
};

/// Five-parameter ellipse: center (x0, y0), half major axis a, half minor
/// axis b, orientation alpha of the major axis in [0, pi). `quality` is the
/// number of contour points that supported the detection.
struct Ellipse {
  double x0 = 0.0;
  double y0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;
  std::size_t quality = 0;

  friend bool operator==(const Ellipse&, const Ellipse&) = default;
};

/// Per-run counters, in the column order of the statistics table.
struct RunStats {
  std::size_t virtual_ellipses = 0;   // accepted before clustering
  std::size_t real_ellipses = 0;      // cluster representatives
  std::size_t ellipse_quality = 0;    // configured quality threshold
  std::size_t search_point_pairs = 0; // m = C * n
  std::size_t total_edge_points = 0;  // n

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

} // namespace rht
