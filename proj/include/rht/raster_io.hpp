#pragma once

// Portable graymap / pixmap I/O, result overlays and result tables.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rht/errors.hpp"
#include "rht/geometry.hpp"
#include "rht/raster.hpp"
#include "rht/types.hpp"

namespace rht {

using Bytes = std::vector<std::uint8_t>;

enum class PnmEncoding { Ascii, Binary };

namespace detail {

class PnmCursor {
public:
  explicit PnmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool at_end() const noexcept { return pos_ >= bytes_.size(); }
  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  std::span<const std::uint8_t> rest() const noexcept { return bytes_.subspan(pos_); }

  std::string_view magic() {
    if (bytes_.size() < 2) throw FormatError("input too short for a PNM magic number");
    pos_ = 2;
    return {reinterpret_cast<const char*>(bytes_.data()), 2};
  }

  // Skips whitespace and '#' comments. Returns false at end of input.
  bool skip_separators() {
    while (!at_end()) {
      const auto c = static_cast<unsigned char>(bytes_[pos_]);
      if (c == '#') {
        while (!at_end() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        return true;
      }
    }
    return false;
  }

  // Reads an unsigned decimal token. Returns false if input ended first.
  bool next_unsigned(unsigned& value, std::string_view what) {
    if (!skip_separators()) return false;
    const char* first = reinterpret_cast<const char*>(bytes_.data()) + pos_;
    const char* last = reinterpret_cast<const char*>(bytes_.data()) + bytes_.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || (ptr != last && !std::isspace(static_cast<unsigned char>(*ptr)) &&
                              *ptr != '#')) {
      throw FormatError(fmt::format("invalid {} at byte offset {}", what, pos_));
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return true;
  }

  // Binary payloads start after exactly one whitespace byte.
  void consume_single_whitespace() {
    if (at_end() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("missing whitespace between header and binary payload");
    }
    ++pos_;
  }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline unsigned header_field(PnmCursor& cur, std::string_view what) {
  unsigned value = 0;
  if (!cur.next_unsigned(value, what)) throw FormatError(fmt::format("header ends before {}", what));
  return value;
}

} // namespace detail

/// Decodes a P2, P5 or P6 image with maxval 255. Colour pixels become the
/// rounded mean of their three channels.
inline GrayRaster read_gray_image(std::span<const std::uint8_t> bytes) {
  detail::PnmCursor cur(bytes);
  const std::string_view magic = cur.magic();
  if (magic != "P2" && magic != "P5" && magic != "P6") {
    throw FormatError(fmt::format("unsupported magic number '{}'", magic));
  }
  const unsigned width = detail::header_field(cur, "width");
  const unsigned height = detail::header_field(cur, "height");
  const unsigned maxval = detail::header_field(cur, "maxval");
  if (width == 0 || height == 0) throw FormatError("image dimensions must be positive");
  if (width > 1u << 15 || height > 1u << 15) throw FormatError("image dimensions too large");
  if (maxval == 0 || maxval > 65535) throw FormatError(fmt::format("invalid maxval {}", maxval));
  if (maxval != 255) throw UnsupportedError(fmt::format("maxval {} is not supported (need 255)", maxval));

  const std::size_t count = std::size_t{width} * height;
  std::vector<std::uint8_t> samples(count);

  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      unsigned v = 0;
      if (!cur.next_unsigned(v, "sample")) {
        throw TruncatedError(fmt::format("payload ends after {} of {} samples", i, count));
      }
      if (v > maxval) throw FormatError(fmt::format("sample {} exceeds maxval", v));
      samples[i] = static_cast<std::uint8_t>(v);
    }
  } else {
    cur.consume_single_whitespace();
    const std::size_t channels = magic == "P6" ? 3 : 1;
    const auto payload = cur.rest();
    if (payload.size() < count * channels) {
      throw TruncatedError(fmt::format("payload has {} bytes, expected {}", payload.size(),
                                       count * channels));
    }
    if (channels == 1) {
      std::copy_n(payload.begin(), count, samples.begin());
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        const unsigned sum = unsigned{payload[3 * i]} + payload[3 * i + 1] + payload[3 * i + 2];
        samples[i] = static_cast<std::uint8_t>((sum + 1) / 3);
      }
    }
  }
  return GrayRaster(static_cast<int>(width), static_cast<int>(height), std::move(samples));
}

inline GrayRaster read_gray_image(std::string_view bytes) {
  return read_gray_image(
      std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

inline Bytes read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline GrayRaster read_gray_file(const std::filesystem::path& path) {
  return read_gray_image(read_file_bytes(path));
}

inline Bytes encode_pgm(const GrayRaster& raster, PnmEncoding encoding = PnmEncoding::Binary) {
  const bool ascii = encoding == PnmEncoding::Ascii;
  std::string header = fmt::format("{}\n{} {}\n255\n", ascii ? "P2" : "P5", raster.width(),
                                   raster.height());
  Bytes out(header.begin(), header.end());
  if (!ascii) {
    out.insert(out.end(), raster.samples().begin(), raster.samples().end());
    return out;
  }
  // Plain PGM lines stay within 70 characters.
  std::string line;
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      const std::string token = std::to_string(raster(x, y));
      if (!line.empty() && line.size() + 1 + token.size() > 70) {
        line += '\n';
        out.insert(out.end(), line.begin(), line.end());
        line.clear();
      }
      if (!line.empty()) line += ' ';
      line += token;
    }
    line += '\n';
    out.insert(out.end(), line.begin(), line.end());
    line.clear();
  }
  return out;
}

/// Copy of `base` with every pixel within half a pixel of an ellipse contour
/// set to `stroke`. Contours leaving the frame are clipped.
inline GrayRaster render_overlay(const GrayRaster& base, std::span<const Ellipse> ellipses,
                                 std::uint8_t stroke) {
  GrayRaster out = base;
  for (const Ellipse& e : ellipses) {
    if (!(e.a > 0.0) || !(e.b > 0.0)) throw std::invalid_argument("overlay ellipse needs a, b > 0");
    const double c = std::cos(e.alpha);
    const double s = std::sin(e.alpha);
    const double ex = std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s) + 1.0;
    const double ey = std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c) + 1.0;
    const int x_lo = std::max(0, static_cast<int>(std::floor(e.x0 - ex)));
    const int x_hi = std::min(base.width() - 1, static_cast<int>(std::ceil(e.x0 + ex)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(e.y0 - ey)));
    const int y_hi = std::min(base.height() - 1, static_cast<int>(std::ceil(e.y0 + ey)));
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        if (contour_distance(e, x, y) <= 0.5) out(x, y) = stroke;
      }
    }
  }
  return out;
}

inline Bytes write_overlay(const GrayRaster& base, std::span<const Ellipse> ellipses,
                           std::uint8_t stroke) {
  return encode_pgm(render_overlay(base, ellipses, stroke));
}

// ---------------------------------------------------------------------------
// Result tables
// ---------------------------------------------------------------------------

enum class ResultFormat { Csv, Json };

inline constexpr std::string_view kEllipseColumns =
    "center_x,center_y,major_axis,minor_axis,alpha";
inline constexpr std::string_view kStatsColumns =
    "virtual_ellipses,real_ellipses,ellipse_quality,search_point_pairs,total_edge_points";

namespace detail {

inline double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(value * scale) / scale;
  return r == 0.0 ? 0.0 : r; // no "-0.0"
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    parts.push_back(text.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

inline std::vector<std::string_view> data_lines(std::string_view csv, std::string_view header) {
  std::vector<std::string_view> lines;
  for (std::string_view line : split(csv, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty() || lines.front() != header) {
    throw FormatError(fmt::format("expected header '{}'", header));
  }
  lines.erase(lines.begin());
  return lines;
}

template <typename T>
T parse_field(std::string_view field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw FormatError(fmt::format("bad numeric field '{}'", field));
  }
  return value;
}

} // namespace detail

/// One table row: centers to 0.1 px, axes to whole pixels, alpha to 3 decimals.
inline std::string format_ellipse_record(const Ellipse& e) {
  return fmt::format("{:.1f},{:.1f},{:.0f},{:.0f},{:.3f}", detail::round_to(e.x0, 1),
                     detail::round_to(e.y0, 1), detail::round_to(e.a, 0),
                     detail::round_to(e.b, 0), detail::round_to(e.alpha, 3));
}

inline std::string format_stats_record(const RunStats& s) {
  return fmt::format("{},{},{},{},{}", s.virtual_ellipses, s.real_ellipses, s.ellipse_quality,
                     s.search_point_pairs, s.total_edge_points);
}

inline std::string ellipse_table_csv(std::span<const Ellipse> ellipses) {
  std::string out(kEllipseColumns);
  out += '\n';
  for (const Ellipse& e : ellipses) {
    out += format_ellipse_record(e);
    out += '\n';
  }
  return out;
}

inline std::string stats_table_csv(const RunStats& stats) {
  return fmt::format("{}\n{}\n", kStatsColumns, format_stats_record(stats));
}

inline nlohmann::ordered_json results_json(std::span<const Ellipse> ellipses,
                                           const RunStats& stats) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const Ellipse& e : ellipses) {
    rows.push_back({{"center_x", detail::round_to(e.x0, 1)},
                    {"center_y", detail::round_to(e.y0, 1)},
                    {"major_axis", detail::round_to(e.a, 0)},
                    {"minor_axis", detail::round_to(e.b, 0)},
                    {"alpha", detail::round_to(e.alpha, 3)}});
  }
  return {{"ellipses", std::move(rows)},
          {"stats",
           {{"virtual_ellipses", stats.virtual_ellipses},
            {"real_ellipses", stats.real_ellipses},
            {"ellipse_quality", stats.ellipse_quality},
            {"search_point_pairs", stats.search_point_pairs},
            {"total_edge_points", stats.total_edge_points}}}};
}

/// Both tables in one document. CSV puts the ellipse table first, then a blank
/// line, then the statistics table.
inline std::string write_results(std::span<const Ellipse> ellipses, const RunStats& stats,
                                 ResultFormat format = ResultFormat::Csv) {
  if (format == ResultFormat::Json) return results_json(ellipses, stats).dump(2) + "\n";
  return ellipse_table_csv(ellipses) + "\n" + stats_table_csv(stats);
}

/// Inverse of ellipse_table_csv (values at emitted precision; quality is not stored).
inline std::vector<Ellipse> parse_ellipse_table(std::string_view csv) {
  std::vector<Ellipse> out;
  for (std::string_view line : detail::data_lines(csv, kEllipseColumns)) {
    const auto f = detail::split(line, ',');
    if (f.size() != 5) throw FormatError(fmt::format("expected 5 fields in '{}'", line));
    out.push_back({detail::parse_field<double>(f[0]), detail::parse_field<double>(f[1]),
                   detail::parse_field<double>(f[2]), detail::parse_field<double>(f[3]),
                   detail::parse_field<double>(f[4]), 0});
  }
  return out;
}

inline RunStats parse_stats_table(std::string_view csv) {
  const auto lines = detail::data_lines(csv, kStatsColumns);
  if (lines.size() != 1) throw FormatError("statistics table must have exactly one record");
  const auto f = detail::split(lines.front(), ',');
  if (f.size() != 5) throw FormatError("expected 5 statistics fields");
  return {detail::parse_field<std::size_t>(f[0]), detail::parse_field<std::size_t>(f[1]),
          detail::parse_field<std::size_t>(f[2]), detail::parse_field<std::size_t>(f[3]),
          detail::parse_field<std::size_t>(f[4])};
}

} // namespace rht
