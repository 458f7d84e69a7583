#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rht/types.hpp"

namespace rht {

namespace detail {

inline std::size_t checked_area(int width, int height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("raster dimensions must be positive, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

inline int clamp_index(int i, int size) { return std::clamp(i, 0, size - 1); }

} // namespace detail

/// Row-major grid of samples. Used for luminance (uint8_t) and gradient
/// magnitude (int32_t) images.
template <typename T>
class Raster {
public:
  using value_type = T;

  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), samples_(detail::checked_area(width, height), fill) {}

  Raster(int width, int height, std::vector<T> samples)
      : width_(width), height_(height), samples_(std::move(samples)) {
    if (samples_.size() != detail::checked_area(width, height)) {
      throw std::invalid_argument("sample count does not match raster dimensions");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }

  T& operator()(int x, int y) { return samples_[index(x, y)]; }
  const T& operator()(int x, int y) const { return samples_[index(x, y)]; }

  // Border policy: coordinates are clamped into the frame.
  const T& clamped(int x, int y) const {
    return (*this)(detail::clamp_index(x, width_), detail::clamp_index(y, height_));
  }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const T> samples() const noexcept { return samples_; }
  std::span<T> samples() noexcept { return samples_; }

  friend bool operator==(const Raster&, const Raster&) = default;

private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<T> samples_;
};

using GrayRaster = Raster<std::uint8_t>;
using GradientRaster = Raster<std::int32_t>;

/// Binary edge image. Foreground pixels are kept both as a sorted, duplicate-free
/// point list (the detector's sampling domain) and as a membership mask.
class EdgeMap {
public:
  EdgeMap(int width, int height) : mask_(width, height, 0) {}

  EdgeMap(int width, int height, std::vector<Point> points) : mask_(width, height, 0) {
    for (const Point& p : points) {
      if (!mask_.contains(p.x, p.y)) {
        throw std::out_of_range("edge point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                ") outside " + std::to_string(width) + "x" +
                                std::to_string(height) + " frame");
      }
      mask_(p.x, p.y) = 1;
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    points_ = std::move(points);
  }

  int width() const noexcept { return mask_.width(); }
  int height() const noexcept { return mask_.height(); }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  std::span<const Point> points() const noexcept { return points_; }

  bool contains(Point p) const noexcept {
    return mask_.contains(p.x, p.y) && mask_(p.x, p.y) != 0;
  }

  /// Adds a foreground pixel; returns false if it was already set.
  bool insert(Point p) {
    if (!mask_.contains(p.x, p.y)) throw std::out_of_range("edge point outside frame");
    if (mask_(p.x, p.y) != 0) return false;
    mask_(p.x, p.y) = 1;
    points_.insert(std::lower_bound(points_.begin(), points_.end(), p), p);
    return true;
  }

  friend bool operator==(const EdgeMap&, const EdgeMap&) = default;

private:
  Raster<std::uint8_t> mask_;
  std::vector<Point> points_;
};

/// Foreground = samples strictly above `level`.
inline EdgeMap edge_map_from_raster(const GrayRaster& raster, std::uint8_t level = 0) {
  std::vector<Point> points;
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      if (raster(x, y) > level) points.push_back({x, y});
    }
  }
  return EdgeMap(raster.width(), raster.height(), std::move(points));
}

/// White-on-black rendering of an edge map.
inline GrayRaster edge_map_to_raster(const EdgeMap& edges) {
  GrayRaster out(edges.width(), edges.height(), 0);
  for (const Point& p : edges.points()) out(p.x, p.y) = 255;
  return out;
}

} // namespace rht
