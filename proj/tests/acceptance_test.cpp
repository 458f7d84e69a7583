// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "rht/rht.hpp"
#include "test_support.hpp"

namespace {

using namespace rht;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kTestPi = 3.14159265358979323846;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const fs::path& p, const Bytes& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

// 1. search_point_pairs == C * n, and the sampler really makes C * n draws.
Verdict pair_budget() {
  std::size_t runs = 0, bad = 0;
  for (int c : {1, 2, 3, 5}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const SceneSpec spec = generate_scene(SceneDistribution{}, seed);
      const EdgeMap edges = rasterize(spec);
      DetectionConfig cfg;
      cfg.c_factor = c;
      cfg.rng_seed = seed;
      const DetectionResult r = detect_all(edges, cfg);

      Rng used(seed);
      sample_pairs(edges, cfg, used);
      Rng replay(seed);
      for (std::size_t k = 0; k < std::size_t(c) * edges.size(); ++k) {
        draw_index(replay, edges.size());
        draw_index(replay, edges.size());
      }
      ++runs;
      if (r.stats.search_point_pairs != std::size_t(c) * r.stats.total_edge_points ||
          r.stats.total_edge_points != edges.size() || used() != replay()) {
        ++bad;
      }
    }
  }
  return {bad == 0, fmt::format("{} runs, {} violations", runs, bad)};
}

// 2. Minor axis recovered from exact parametric points.
Verdict minor_axis_round_trip() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = 10.0 + 90.0 * unit(gen);
    double b = 5.0 + (a - 5.0) * unit(gen);
    if (b >= a) b = std::nextafter(a, 0.0);
    const double alpha = kTestPi * unit(gen);
    const Ellipse e{320 * unit(gen), 240 * unit(gen), a, b, alpha, 0};
    double t = 2.0 * kTestPi * unit(gen);
    while (std::abs(std::sin(t)) < 1e-6) t = 2.0 * kTestPi * unit(gen);
    const auto [tx, ty] = testing::contour_point(e, t);
    // The vertex on the same end as the third point.
    const double sign = std::cos(t) >= 0.0 ? 1.0 : -1.0;
    const double vx = e.x0 + sign * a * std::cos(alpha), vy = e.y0 + sign * a * std::sin(alpha);
    const auto got = vote_minor_axis(e.x0, e.y0, a, tx, ty, vx, vy);
    if (!got) {
      ++failures;
      continue;
    }
    const double rel = std::abs(*got - b) / b;
    worst = std::max(worst, rel);
    if (rel > 1e-9) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 1.0,
          fmt::format("worst relative error {:.2e}, {} over 1e-9, {:.3f} s", worst, failures, secs)};
}

// Exhaustive between-class variance argmax in exact integer arithmetic.
int otsu_oracle(const Histogram& h) {
  using BigInt = boost::multiprecision::int512_t;
  BigInt n = 0, s = 0;
  for (int i = 0; i < 256; ++i) {
    n += BigInt(h[i]);
    s += BigInt(i) * BigInt(h[i]);
  }
  BigInt n0 = 0, s0 = 0, best_num = -1, best_den = 1;
  int best = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += BigInt(h[t]);
    s0 += BigInt(t) * BigInt(h[t]);
    const BigInt n1 = n - n0;
    BigInt num = 0, den = 1;
    if (n0 > 0 && n1 > 0) {
      const BigInt diff = n * s0 - n0 * s;
      num = diff * diff;
      den = n0 * n1;
    }
    if (best_num < 0 || num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best = t;
    }
  }
  return best;
}

// 3. Otsu threshold against the exhaustive sweep.
Verdict otsu_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(3);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    Histogram h{};
    for (auto& c : h) c = gen() % 5000;
    if (i % 3 == 0) {
      for (auto& c : h) c = gen() % 4 == 0 ? c : 0;
    }
    h[gen() % 256] += 1;
    if (max_variance_threshold(h).value != otsu_oracle(h)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 1.0, fmt::format("{} mismatches in 100, {:.3f} s", mismatches, secs)};
}

// 4. Recall on seeded synthetic scenes with default settings.
Verdict synthetic_recall(const testing::TempDir& dir) {
  std::size_t truth_total = 0, matched = 0, worst_fp = 0;
  double slowest = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SceneSpec spec = generate_scene(SceneDistribution{}, seed);
    const fs::path input = dir / fmt::format("recall_{}.pgm", seed);
    write_bytes(input, encode_pgm(edge_map_to_raster(rasterize(spec))));
    PipelineConfig cfg;
    cfg.input = input;
    cfg.out_prefix = dir / fmt::format("recall_{}", seed);
    cfg.skip_preprocess = true;
    const auto t0 = Clock::now();
    const PipelineOutcome out = run_pipeline(cfg);
    slowest = std::max(slowest, seconds_since(t0));
    truth_total += spec.ellipses.size();
    if (out.code != ExitCode::Ok) continue;
    const GradeResult g = grade(out.detection.ellipses, spec.ellipses);
    matched += g.matched;
    worst_fp = std::max(worst_fp, g.false_positives);
  }
  const double recall = double(matched) / double(truth_total);
  return {recall >= 0.9 && worst_fp <= 1 && slowest < 2.0,
          fmt::format("recall {}/{} = {:.1f}%, max false positives per scene {}, slowest scene {:.2f} s",
                      matched, truth_total, 100.0 * recall, worst_fp, slowest)};
}

// 5. Twin-ellipse scenes compress to exactly two clusters.
Verdict clustering_compression() {
  SceneDistribution twins;
  twins.min_ellipses = twins.max_ellipses = 2;
  twins.a_low = 44.0;
  twins.a_high = 64.0;
  twins.b_ratio_low = 0.45;
  twins.b_ratio_high = 0.75;
  twins.contour_thickness = 6.0;
  twins.clutter_points = 150;
  twins.min_support = 230;
  DetectionConfig cfg;
  cfg.quality_threshold = 230;

  int passed = 0;
  std::string counts;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SceneSpec spec = generate_scene(twins, seed);
    cfg.rng_seed = seed;
    const Detection d = detect_ellipses(rasterize(spec), cfg, 20.0);
    const bool ok = d.stats.real_ellipses == 2 && d.stats.virtual_ellipses >= 2 * d.stats.real_ellipses;
    passed += ok;
    counts += fmt::format("{}{}->{}", counts.empty() ? "" : " ", d.stats.virtual_ellipses, d.stats.real_ellipses);
  }
  return {passed == 10, fmt::format("{}/10 scenes; virtual->real: {}", passed, counts)};
}

// 6. Edge map untouched by detection; equal seeds give byte-identical files.
Verdict non_deletion_and_determinism(const testing::TempDir& dir) {
  const SceneSpec spec = generate_scene(SceneDistribution{}, 6);
  const EdgeMap edges = rasterize(spec);
  const EdgeMap before = edges;
  const auto points_before = std::vector<Point>(edges.points().begin(), edges.points().end());
  detect_all(edges, DetectionConfig{});
  const bool untouched = edges == before &&
                         std::equal(points_before.begin(), points_before.end(), edges.points().begin(),
                                    edges.points().end());

  const fs::path input = dir / "determinism.pgm";
  write_bytes(input, encode_pgm(edge_map_to_raster(edges)));
  bool identical = true;
  std::vector<std::string> first;
  for (int run = 0; run < 2; ++run) {
    PipelineConfig cfg;
    cfg.input = input;
    cfg.out_prefix = dir / fmt::format("determinism_{}", run);
    cfg.skip_preprocess = true;
    cfg.emit_stats = cfg.emit_overlay = true;
    cfg.detection.c_factor = 6;
    if (run_pipeline(cfg).code != ExitCode::Ok) identical = false;
    std::size_t i = 0;
    for (const char* s : {".ellipses.csv", ".stats.csv", ".overlay.pgm", ".report.json"}) {
      const std::string text = slurp(output_path(cfg.out_prefix, s));
      if (run == 0) first.push_back(text);
      else if (text != first[i]) identical = false;
      ++i;
    }
  }
  return {untouched && identical,
          fmt::format("edge set unchanged: {}, result files identical: {}", untouched, identical)};
}

// 7. Half arcs rejected; lightly occluded full contours accepted.
Verdict filter_behavior() {
  const DetectionConfig cfg;
  int half_rejected = 0, occluded_accepted = 0;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Ellipse e;
    e.a = 40.0 + 30.0 * unit(gen);
    e.b = 8.0 + (e.a - 8.0) * unit(gen);
    e.alpha = kTestPi * unit(gen);
    e.x0 = 160.0 + 20.0 * (unit(gen) - 0.5);
    e.y0 = 120.0 + 20.0 * (unit(gen) - 0.5);
    SceneSpec spec;
    spec.ellipses = {e};
    spec.contour_thickness = 2.0;
    const EdgeMap full = rasterize(spec);

    EdgeMap half(full.width(), full.height());
    for (const Point& p : full.points()) {
      if (to_ellipse_frame(e, p.x, p.y).v > 0.0) half.insert(p);
    }
    half_rejected += !filter_candidate(e, half, cfg);

    // Remove one contiguous arc holding up to 20% of the contour pixels.
    std::vector<std::pair<double, Point>> by_angle;
    for (const Point& p : full.points()) {
      const auto [u, v] = to_ellipse_frame(e, p.x, p.y);
      by_angle.emplace_back(std::atan2(v / e.b, u / e.a), p);
    }
    std::sort(by_angle.begin(), by_angle.end());
    const std::size_t n = by_angle.size();
    const std::size_t removed = std::size_t(std::floor(0.2 * unit(gen) * double(n)));
    const std::size_t start = std::size_t(unit(gen) * double(n)) % n;
    EdgeMap occluded(full.width(), full.height());
    for (std::size_t k = 0; k < n; ++k) {
      if ((k + n - start) % n >= removed) occluded.insert(by_angle[k].second);
    }
    occluded_accepted += filter_candidate(e, occluded, cfg);
  }
  return {half_rejected == 50 && occluded_accepted >= 48,
          fmt::format("half arcs rejected {}/50, occluded contours accepted {}/50", half_rejected,
                      occluded_accepted)};
}

// 8. Feature distance is a metric.
Verdict metric_properties() {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> pos(0, 640), ax(1, 200), ang(0, kTestPi);
  auto draw = [&] { return FeatureVector{pos(gen), pos(gen), ax(gen), ax(gen), ang(gen)}; };
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto u = draw(), v = draw(), w = draw();
    for (AngleMetric m : {AngleMetric::Raw, AngleMetric::Wrapped}) {
      const double uv = distance(u, v, m), vu = distance(v, u, m);
      const double uw = distance(u, w, m), vw = distance(v, w, m);
      if (std::abs(uv - vu) > 1e-12 * std::max(uv, 1.0)) ++violations;
      if (distance(u, u, m) != 0.0 || !(uv > 0.0)) ++violations;
      if (uw > (uv + vw) * (1.0 + 1e-12)) ++violations;
    }
  }
  return {violations == 0, fmt::format("10000 triples, {} violations", violations)};
}

} // namespace

int main() {
  testing::TempDir dir;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 pair budget identity", pair_budget},
      {"2 minor-axis round trip", minor_axis_round_trip},
      {"3 Otsu equivalence", otsu_equivalence},
      {"4 synthetic detection recall", [&] { return synthetic_recall(dir); }},
      {"5 clustering compression", clustering_compression},
      {"6 non-deletion and determinism", [&] { return non_deletion_and_determinism(dir); }},
      {"7 filter behavior", filter_behavior},
      {"8 distance metric properties", metric_properties},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !v.pass;
    fmt::print("{} criterion {}: {}\n", v.pass ? "PASS" : "FAIL", name, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
