#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ap_oracle.hpp"
#include "camsim/error.hpp"
#include "camsim/eval.hpp"
#include "test_util.hpp"

using namespace camsim;
using camsim::testing::oracle_ap;
using camsim::testing::random_ap_instance;

namespace {

Box square(double x, double y, double s = 1.0) { return {x, y, x + s, y + s}; }

APCurve curve_of(std::initializer_list<std::optional<double>> aps) {
  APCurve c;
  double lo = 0.0;
  for (auto ap : aps) {
    c.bins.push_back({lo, lo + 10.0, ap, ap ? 1u : 0u});
    lo += 10.0;
  }
  return c;
}

// Beyond-range compares above every finite distance.
double od50_rank(const OD50Result& r) { return r.beyond_range ? INFINITY : *r.od50_m; }

}  // namespace

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou(square(0, 0), square(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(iou(square(0, 0), square(2, 2)), 0.0);
  EXPECT_DOUBLE_EQ(iou(square(0, 0), square(0.5, 0)), 0.5 / 1.5);
  EXPECT_DOUBLE_EQ(iou(square(0, 0), square(1, 0)), 0.0);
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const Box a = square(u(rng), u(rng), 1.0 + u(rng)), b = square(u(rng), u(rng), 1.0 + u(rng));
    const double v = iou(a, b);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Match, OneToOne) {
  const auto m = match({square(0, 0), square(5, 5)}, {0.9, 0.8}, {square(5, 5), square(0, 0)});
  EXPECT_TRUE(m.tp[0] && m.tp[1]);
  EXPECT_EQ(m.matched_gt[0], 1);
  EXPECT_EQ(m.matched_gt[1], 0);
}

TEST(Match, DuplicateIsFalsePositive) {
  const auto m = match({square(0, 0), square(0, 0)}, {0.3, 0.8}, {square(0, 0)});
  EXPECT_FALSE(m.tp[0]);
  EXPECT_TRUE(m.tp[1]);
}

TEST(Match, ScoreTieGoesToInputOrder) {
  const auto m = match({square(0, 0), square(0, 0)}, {0.5, 0.5}, {square(0, 0)});
  EXPECT_TRUE(m.tp[0]);
  EXPECT_FALSE(m.tp[1]);
}

TEST(Match, IouTieGoesToLowestGt) {
  const auto m = match({square(0, 0)}, {0.5}, {square(0, 0), square(0, 0)});
  EXPECT_EQ(m.matched_gt[0], 0);
}

TEST(Match, BelowThresholdMisses) {
  // Overlap o on 100×1 strips gives IoU o / (200 − o).
  const Box gt{0, 0, 100, 1};
  const double overlap = 2 * 100 * 0.49 / 1.49;
  const Box det{100 - overlap, 0, 200 - overlap, 1};
  ASSERT_NEAR(iou(det, gt), 0.49, 1e-12);
  EXPECT_FALSE(match({det}, {1.0}, {gt}).tp[0]);
}

TEST(Match, ScoreCountMismatchThrows) {
  EXPECT_THROW(match({square(0, 0)}, {}, {}), Error);
}

TEST(AveragePrecision, Examples) {
  const std::vector<GroundTruth> gt{{1, square(0, 0, 10), 20}};
  EXPECT_DOUBLE_EQ(*average_precision({{1, square(0, 0, 10), 0.9}}, gt), 1.0);
  EXPECT_DOUBLE_EQ(*average_precision({}, gt), 0.0);
  EXPECT_DOUBLE_EQ(*average_precision({{1, square(0, 0, 10), 0.9}, {1, square(50, 50, 10), 0.8}}, gt), 1.0);
  EXPECT_DOUBLE_EQ(*average_precision({{1, square(0, 0, 10), 0.8}, {1, square(50, 50, 10), 0.9}}, gt), 0.5);
  EXPECT_FALSE(average_precision({{1, square(0, 0, 10), 0.9}}, {}).has_value());
}

TEST(AveragePrecision, MatchesPrefixOracleExactly) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 1000; ++i) {
    const auto inst = random_ap_instance(rng);
    const auto got = average_precision(inst.dets, inst.gts);
    const auto want = oracle_ap(inst.dets, inst.gts);
    ASSERT_EQ(got.has_value(), want.has_value()) << "instance " << i;
    if (got) {
      ASSERT_EQ(*got, *want) << "instance " << i;
    }
  }
}

TEST(AveragePrecision, BoundedAndInvariantUnderMonotoneScoreTransform) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    auto inst = random_ap_instance(rng);
    const auto base = average_precision(inst.dets, inst.gts);
    if (!base) continue;
    EXPECT_GE(*base, 0.0);
    EXPECT_LE(*base, 1.0);
    for (auto& d : inst.dets) d.score = std::sqrt(d.score) * 0.5 + 0.1;
    EXPECT_EQ(*average_precision(inst.dets, inst.gts), *base);
  }
}

TEST(AveragePrecision, LowestScoreZeroIouDetectionNeverHelps) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    auto inst = random_ap_instance(rng);
    const auto base = average_precision(inst.dets, inst.gts);
    if (!base) continue;
    inst.dets.push_back({1, square(1000, 1000, 5), 0.0});
    EXPECT_LE(*average_precision(inst.dets, inst.gts), *base);
  }
}

TEST(AveragePrecision, ElevenPoint) {
  // One hit at rank 2 of 2: precision 0.5 at recall 1, so every point reads 0.5.
  EXPECT_DOUBLE_EQ(*ap_from_flags({false, true}, 1, ApMethod::kElevenPoint), 0.5);
  EXPECT_DOUBLE_EQ(*ap_from_flags({true, true}, 2, ApMethod::kElevenPoint), 1.0);
  // Half recall reached at precision 1: points 0..0.5 read 1, the rest 0.
  EXPECT_DOUBLE_EQ(*ap_from_flags({true}, 2, ApMethod::kElevenPoint), 6.0 / 11.0);
}

TEST(ApVsDistance, SingleBinEqualsGlobal) {
  std::mt19937_64 rng(5);
  auto inst = random_ap_instance(rng);
  while (inst.gts.empty()) inst = random_ap_instance(rng);
  for (auto& g : inst.gts) g.distance_m = 23.0;
  const auto curve = ap_vs_distance(inst.dets, inst.gts);
  ASSERT_EQ(curve.bins.size(), 3u);
  EXPECT_FALSE(curve.bins[0].ap);
  EXPECT_FALSE(curve.bins[1].ap);
  EXPECT_EQ(curve.bins[0].gt_count, 0u);
  EXPECT_EQ(*curve.bins[2].ap, *average_precision(inst.dets, inst.gts));
}

TEST(ApVsDistance, PerfectBelowFiftyNoneAbove) {
  std::vector<GroundTruth> gts;
  std::vector<Detection> dets;
  for (int i = 0; i < 10; ++i) {
    const double d = 5.0 + 10.0 * i;
    gts.push_back({i, square(0, 0, 10), d});
    if (d < 50.0) dets.push_back({i, square(0, 0, 10), 0.9});
  }
  const auto curve = ap_vs_distance(dets, gts, 10.0, 100.0);
  ASSERT_EQ(curve.bins.size(), 10u);
  for (std::size_t b = 0; b < 10; ++b) {
    EXPECT_DOUBLE_EQ(curve.bins[b].low_m, 10.0 * b);
    EXPECT_EQ(*curve.bins[b].ap, b < 5 ? 1.0 : 0.0) << b;
  }
}

TEST(ApVsDistance, FalsePositiveFollowsNearestGtOrIsDropped) {
  const std::vector<GroundTruth> gts{{1, square(0, 0, 10), 5.0}, {1, square(100, 0, 10), 15.0}};
  // Detection overlapping the far GT below threshold counts as an FP in bin 1.
  std::vector<Detection> dets{{1, square(0, 0, 10), 0.9}, {1, square(100, 0, 10), 0.5},
                              {1, square(106, 0, 10), 0.95}};
  auto curve = ap_vs_distance(dets, gts);
  EXPECT_EQ(*curve.bins[0].ap, 1.0);
  EXPECT_EQ(*curve.bins[1].ap, 0.5);
  // A detection touching no GT is excluded everywhere.
  dets[2].bbox = square(500, 500, 10);
  curve = ap_vs_distance(dets, gts);
  EXPECT_EQ(*curve.bins[0].ap, 1.0);
  EXPECT_EQ(*curve.bins[1].ap, 1.0);
}

TEST(ApVsDistance, ContiguousBinsAndDefinedOnlyWithGts) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 149.0);
  for (int i = 0; i < 50; ++i) {
    auto inst = random_ap_instance(rng);
    for (auto& g : inst.gts) g.distance_m = dist(rng);
    const auto curve = ap_vs_distance(inst.dets, inst.gts, 10.0, 150.0);
    ASSERT_EQ(curve.bins.size(), 15u);
    for (std::size_t b = 0; b < curve.bins.size(); ++b) {
      EXPECT_EQ(curve.bins[b].low_m, 10.0 * b);
      EXPECT_EQ(curve.bins[b].ap.has_value(), curve.bins[b].gt_count > 0);
    }
  }
}

TEST(ApVsDistance, BadBinWidthThrows) {
  EXPECT_THROW(ap_vs_distance({}, {}, 0.0), Error);
}

TEST(Od50, Examples) {
  APCurve c;
  c.bins = {{40, 50, 0.6, 3}, {50, 60, 0.4, 3}};
  EXPECT_EQ(*od50(c).od50_m, 50.0);
  EXPECT_EQ(od50(c).crossing_bin, 1u);
  EXPECT_TRUE(od50(curve_of({1.0, 1.0, 1.0})).beyond_range);
  EXPECT_EQ(od50(curve_of({1.0, 1.0, 1.0})).to_string(), "beyond-range");
  EXPECT_EQ(*od50(curve_of({0.3, 1.0})).od50_m, 0.0);
}

TEST(Od50, SkipsUndefinedBins) {
  const auto r = od50(curve_of({0.9, std::nullopt, 0.1}));
  // Interpolates between centers 5 and 25.
  EXPECT_DOUBLE_EQ(*r.od50_m, 5.0 + 0.4 / 0.8 * 20.0);
}

TEST(Od50, RaisingEveryBinNeverLowersIt) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    APCurve lo, hi;
    for (int b = 0; b < 15; ++b) {
      std::optional<double> a, r;
      if (u(rng) > 0.1) {
        a = u(rng);
        r = std::min(1.0, *a + u(rng) * 0.3);
      }
      lo.bins.push_back({10.0 * b, 10.0 * b + 10, a, a ? 1u : 0u});
      hi.bins.push_back({10.0 * b, 10.0 * b + 10, r, r ? 1u : 0u});
    }
    const auto a = od50(lo), b = od50(hi);
    EXPECT_GE(od50_rank(b), od50_rank(a)) << "curve " << i;
    if (!a.beyond_range) EXPECT_GE(*a.od50_m, 0.0);
  }
}

TEST(MetricsCsv, RoundTripsExactly) {
  APCurve c = curve_of({1.0 / 3.0, std::nullopt, 0.1 + 0.2});
  c.bins[0].gt_count = 17;
  const std::string text = metrics_csv(c);
  EXPECT_EQ(text.substr(0, text.find('\n')), "bin_low_m,bin_high_m,gt_count,ap");
  const APCurve back = parse_metrics_csv(text);
  ASSERT_EQ(back.bins.size(), 3u);
  EXPECT_EQ(*back.bins[0].ap, 1.0 / 3.0);
  EXPECT_EQ(back.bins[0].gt_count, 17u);
  EXPECT_FALSE(back.bins[1].ap);
  EXPECT_EQ(*back.bins[2].ap, 0.1 + 0.2);
  EXPECT_EQ(metrics_csv(back), text);

  camsim::testing::TempDir dir;
  write_metrics_csv(c, dir / "m.csv");
  EXPECT_EQ(metrics_csv(read_metrics_csv(dir / "m.csv")), text);
}

TEST(MetricsCsv, RejectsMalformed) {
  EXPECT_THROW(parse_metrics_csv("a,b\n"), Error);
  EXPECT_THROW(parse_metrics_csv("bin_low_m,bin_high_m,gt_count,ap\n0,10,x,1\n"), Error);
  EXPECT_THROW(parse_metrics_csv("bin_low_m,bin_high_m,gt_count,ap\n0,10\n"), Error);
}

TEST(Svg, HasOnePolylinePerSeries) {
  const std::string svg = curves_svg({{"a", curve_of({1.0, 0.5})}, {"b<c", curve_of({0.2})}}, "t");
  std::size_t n = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++n;
  EXPECT_EQ(n, 2u);
  EXPECT_NE(svg.find("b&lt;c"), std::string::npos);
}

TEST(DetectionsJson, RoundTripUsesXywh) {
  const std::vector<Detection> dets{{4, {1, 2, 11, 22}, 0.75, "car"}, {5, {0, 0, 3, 3}, 1.0, "car"}};
  const auto j = detections_to_json(dets);
  EXPECT_EQ(j[0]["bbox"], nlohmann::json({1.0, 2.0, 10.0, 20.0}));
  EXPECT_EQ(detections_from_json(j), dets);

  camsim::testing::TempDir dir;
  export_detections(dets, dir / "d.json");
  EXPECT_EQ(import_detections(dir / "d.json", {4, 5}), dets);
}

TEST(DetectionsJson, Validation) {
  auto j = detections_to_json({{4, {1, 2, 11, 22}, 0.75, "car"}});
  try {
    detections_from_json(j, {1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find('4'), std::string::npos);
  }
  auto bad = j;
  bad[0]["score"] = 1.5;
  EXPECT_THROW(detections_from_json(bad), Error);
  bad = j;
  bad[0]["bbox"] = {0, 0, -1, 3};
  EXPECT_THROW(detections_from_json(bad), Error);
  bad = j;
  bad[0].erase("score");
  EXPECT_THROW(detections_from_json(bad), Error);
  EXPECT_THROW(detections_from_json(nlohmann::json::object()), Error);
}
