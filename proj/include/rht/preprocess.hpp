#pragma once

// Front end of the detector: smoothing, Sobel gradient and a global
// maximum-variance (Otsu) binarization of the gradient image.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "rht/errors.hpp"
#include "rht/raster.hpp"

namespace rht {

using Histogram = std::array<std::uint64_t, 256>;

struct Threshold {
  std::uint8_t value = 0;
  friend bool operator==(const Threshold&, const Threshold&) = default;
};

/// 3x3 binomial smoothing ([1 2 1; 2 4 2; 1 2 1] / 16), rounded to nearest,
/// borders clamped.
inline GrayRaster denoise(const GrayRaster& in) {
  static constexpr int kKernel[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};
  GrayRaster out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      int acc = 0;
      for (int ky = -1; ky <= 1; ++ky) {
        for (int kx = -1; kx <= 1; ++kx) acc += kKernel[ky + 1][kx + 1] * in.clamped(x + kx, y + ky);
      }
      out(x, y) = static_cast<std::uint8_t>((acc + 8) / 16);
    }
  }
  return out;
}

/// Sobel magnitude |Gx| + |Gy| per pixel, borders clamped.
inline GradientRaster gradient(const GrayRaster& in) {
  if (in.width() < 3 || in.height() < 3) {
    throw TooSmallError("gradient needs a raster of at least 3x3");
  }
  GradientRaster out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      auto p = [&](int dx, int dy) -> int { return in.clamped(x + dx, y + dy); };
      const int gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
      const int gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
      out(x, y) = std::abs(gx) + std::abs(gy);
    }
  }
  return out;
}

/// Linear map of magnitudes onto [0, 255] (0 stays 0, the maximum becomes 255).
/// Rounds up so that no nonzero magnitude collapses to 0.
inline GrayRaster rescale_gradient(const GradientRaster& g) {
  std::int64_t peak = 0;
  for (std::int32_t m : g.samples()) peak = std::max<std::int64_t>(peak, m);
  GrayRaster out(g.width(), g.height(), 0);
  if (peak == 0) return out;
  auto dst = out.samples();
  auto src = g.samples();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>((std::int64_t{src[i]} * 255 + peak - 1) / peak);
  }
  return out;
}

inline Histogram histogram(const GrayRaster& raster) {
  Histogram h{};
  for (std::uint8_t v : raster.samples()) ++h[v];
  return h;
}

/// Otsu's criterion: the level t maximizing w0 * w1 * (mu0 - mu1)^2 for the split
/// {<= t} / {> t}. Ties go to the smallest t, so a histogram with no
/// between-class variance anywhere yields 0.
inline Threshold max_variance_threshold(const Histogram& hist) {
  long double total = 0.0L;
  long double total_sum = 0.0L;
  for (int i = 0; i < 256; ++i) {
    total += static_cast<long double>(hist[i]);
    total_sum += static_cast<long double>(i) * static_cast<long double>(hist[i]);
  }
  if (total == 0.0L) throw EmptyHistogramError("histogram has no samples");

  long double w0 = 0.0L;
  long double sum0 = 0.0L;
  long double best = -1.0L;
  int best_t = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += static_cast<long double>(hist[t]);
    sum0 += static_cast<long double>(t) * static_cast<long double>(hist[t]);
    const long double w1 = total - w0;
    long double between = 0.0L;
    if (w0 > 0.0L && w1 > 0.0L) {
      const long double diff = sum0 / w0 - (total_sum - sum0) / w1;
      between = w0 * w1 * diff * diff;
    }
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return {static_cast<std::uint8_t>(best_t)};
}

/// Foreground = pixels whose rescaled gradient exceeds the threshold.
inline EdgeMap binarize(const GradientRaster& g, Threshold threshold) {
  return edge_map_from_raster(rescale_gradient(g), threshold.value);
}

/// gray -> denoise -> gradient -> maximum-variance threshold -> binarize.
inline EdgeMap extract_edges(const GrayRaster& image) {
  const GradientRaster g = gradient(denoise(image));
  return binarize(g, max_variance_threshold(histogram(rescale_gradient(g))));
}

} // namespace rht
