#pragma once

// End-to-end driver: read -> denoise -> gradient -> threshold -> binarize ->
// detect -> cluster -> representatives -> result files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rht/cluster.hpp"
#include "rht/detector.hpp"
#include "rht/errors.hpp"
#include "rht/preprocess.hpp"
#include "rht/raster_io.hpp"

namespace rht {

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path out_prefix;
  DetectionConfig detection;
  double d_threshold = 20.0;
  AngleMetric angle_metric = AngleMetric::Raw;
  bool emit_overlay = false;
  bool emit_stats = false;
  bool skip_preprocess = false; // input is already an edge map (nonzero = edge)
};

enum class ExitCode : int { Ok = 0, FormatError = 2, NoEdges = 3, ConfigError = 4 };

struct Detection {
  std::vector<Ellipse> virtual_ellipses;
  std::vector<Ellipse> ellipses; // one representative per cluster
  RunStats stats;
};

/// Detector plus clustering on an edge map; stats.real_ellipses is filled in.
inline Detection detect_ellipses(const EdgeMap& edges, const DetectionConfig& config,
                                 double d_threshold, AngleMetric angle = AngleMetric::Raw) {
  DetectionResult raw = detect_all(edges, config);
  const auto clusters = cluster_ellipses(raw.ellipses, d_threshold, angle);
  Detection out;
  out.ellipses = representatives(clusters, angle);
  out.virtual_ellipses = std::move(raw.ellipses);
  out.stats = raw.stats;
  out.stats.real_ellipses = out.ellipses.size();
  return out;
}

struct PipelineOutcome {
  ExitCode code = ExitCode::Ok;
  std::string stage;   // stage that failed, empty on success
  std::string kind;    // error class name
  std::string message;
  Detection detection;
  std::vector<std::filesystem::path> written;

  /// Single-line machine-readable error record.
  std::string error_json() const {
    return nlohmann::json{{"error", {{"stage", stage}, {"kind", kind}, {"message", message},
                                     {"exit_code", static_cast<int>(code)}}}}
        .dump();
  }
};

inline std::filesystem::path output_path(const std::filesystem::path& prefix, std::string_view suffix) {
  return std::filesystem::path(prefix.string() + std::string(suffix));
}

namespace detail {

inline void write_staged(const std::vector<std::pair<std::filesystem::path, std::string>>& files) {
  std::vector<std::filesystem::path> staged;
  try {
    for (const auto& [path, content] : files) {
      auto tmp = path;
      tmp += ".tmp";
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
      staged.push_back(tmp);
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!out) throw Error(fmt::format("short write to '{}'", tmp.string()));
    }
  } catch (...) {
    std::error_code ignored;
    for (const auto& tmp : staged) std::filesystem::remove(tmp, ignored);
    throw;
  }
  for (std::size_t i = 0; i < files.size(); ++i) std::filesystem::rename(staged[i], files[i].first);
}

} // namespace detail

inline PipelineOutcome run_pipeline(const PipelineConfig& config) {
  PipelineOutcome outcome;
  auto fail = [&](ExitCode code, std::string stage, std::string kind, std::string message) {
    outcome.code = code;
    outcome.stage = std::move(stage);
    outcome.kind = std::move(kind);
    outcome.message = std::move(message);
    return outcome;
  };

  try {
    validate(config.detection);
    if (!(config.d_threshold > 0.0)) throw ConfigError("d_threshold must be positive");
    if (config.out_prefix.empty()) throw ConfigError("output prefix is empty");
  } catch (const ConfigError& e) {
    return fail(ExitCode::ConfigError, "config", "ConfigError", e.what());
  }

  GrayRaster image(1, 1);
  try {
    image = read_gray_file(config.input);
  } catch (const FormatError& e) {
    return fail(ExitCode::FormatError, "read", "FormatError", e.what());
  } catch (const TruncatedError& e) {
    return fail(ExitCode::FormatError, "read", "TruncatedError", e.what());
  } catch (const UnsupportedError& e) {
    return fail(ExitCode::FormatError, "read", "UnsupportedError", e.what());
  } catch (const Error& e) {
    return fail(ExitCode::FormatError, "read", "IoError", e.what());
  }

  EdgeMap edges(1, 1);
  try {
    edges = config.skip_preprocess ? edge_map_from_raster(image) : extract_edges(image);
  } catch (const TooSmallError& e) {
    return fail(ExitCode::FormatError, "preprocess", "TooSmallError", e.what());
  }

  try {
    outcome.detection = detect_ellipses(edges, config.detection, config.d_threshold, config.angle_metric);
  } catch (const NoEdgesError& e) {
    return fail(ExitCode::NoEdges, "detect", "NoEdgesError", e.what());
  }

  const Detection& d = outcome.detection;
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  files.emplace_back(output_path(config.out_prefix, ".ellipses.csv"), ellipse_table_csv(d.ellipses));
  if (config.emit_stats) {
    files.emplace_back(output_path(config.out_prefix, ".stats.csv"), stats_table_csv(d.stats));
  }
  if (config.emit_overlay) {
    const Bytes overlay = write_overlay(image, d.ellipses, 255);
    files.emplace_back(output_path(config.out_prefix, ".overlay.pgm"),
                       std::string(overlay.begin(), overlay.end()));
  }
  files.emplace_back(output_path(config.out_prefix, ".report.json"),
                     write_results(d.ellipses, d.stats, ResultFormat::Json));
  try {
    detail::write_staged(files);
  } catch (const std::exception& e) {
    return fail(ExitCode::FormatError, "write", "IoError", e.what());
  }
  for (const auto& f : files) outcome.written.push_back(f.first);
  return outcome;
}

} // namespace rht
