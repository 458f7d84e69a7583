// rht_detect: ellipse detection on a PGM/PPM image.
//
//   rht_detect --input scene.pgm --out-prefix out/scene --stats --overlay
//
// Writes <prefix>.ellipses.csv and <prefix>.report.json, plus
// <prefix>.stats.csv and <prefix>.overlay.pgm on request. Exit codes:
// 0 ok, 2 file/format error, 3 empty edge map, 4 configuration error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rht/pipeline.hpp"

int main(int argc, char** argv) {
  rht::PipelineConfig config;
  rht::DetectionConfig& det = config.detection;
  std::string input;
  std::string out_prefix;
  bool wrap_alpha = false;

  CLI::App app{"Randomized Hough Transform ellipse detector with result clustering"};
  app.get_formatter()->column_width(34);
  app.add_option("--input", input, "Input image (P2/P5 graymap or P6 pixmap, maxval 255)")
      ->required();
  app.add_option("--out-prefix", out_prefix, "Prefix for output files")->required();
  app.add_option("--seed", det.rng_seed, "Random seed for pair sampling (mt19937_64)")
      ->capture_default_str();
  app.add_option("--c-factor", det.c_factor, "Pairs drawn per edge point, C")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--quality", det.quality_threshold, "Minimum contour points (accumulator peak)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--dt", config.d_threshold, "Cluster distance threshold D_T")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--a-min", det.a_min, "Smallest half major axis, px")->capture_default_str();
  app.add_option("--a-max", det.a_max, "Largest half major axis, px")->capture_default_str();
  app.add_option("--b-min", det.b_min, "Smallest half minor axis, px")->capture_default_str();
  app.add_option("--bin-width", det.accumulator_bin_width, "Minor-axis accumulator bin width, px")
      ->capture_default_str();
  app.add_option("--side-balance", det.side_balance_min,
                 "Minimum min/max ratio of contour points across the axes")
      ->capture_default_str();
  app.add_option("--tolerance", det.contour_tolerance, "Contour census band half-width, px")
      ->capture_default_str();
  app.add_flag("--overlay", config.emit_overlay, "Write <prefix>.overlay.pgm");
  app.add_flag("--stats", config.emit_stats, "Write <prefix>.stats.csv");
  app.add_flag("--edges-only", config.skip_preprocess,
               "Input is already an edge map (nonzero pixels are edges)");
  app.add_flag("--wrap-alpha", wrap_alpha,
               "Compare orientations modulo pi when clustering (default: raw difference)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    rht::PipelineOutcome bad;
    bad.code = rht::ExitCode::ConfigError;
    bad.stage = "config";
    bad.kind = "ConfigError";
    bad.message = e.what();
    std::cerr << bad.error_json() << '\n';
    return static_cast<int>(bad.code);
  }

  config.input = input;
  config.out_prefix = out_prefix;
  config.angle_metric = wrap_alpha ? rht::AngleMetric::Wrapped : rht::AngleMetric::Raw;

  const rht::PipelineOutcome outcome = rht::run_pipeline(config);
  if (outcome.code != rht::ExitCode::Ok) {
    std::cerr << outcome.error_json() << '\n';
    return static_cast<int>(outcome.code);
  }
  std::cout << rht::write_results(outcome.detection.ellipses, outcome.detection.stats);
  return 0;
}
