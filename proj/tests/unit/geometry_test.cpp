#include "frackbench/error.hpp"
#include "frackbench/geometry.hpp"
#include "frackbench/scenario.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace {

using namespace frackbench::geometry;

ConvexPolygon unit_square() { return ConvexPolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

// Convex polygon from sorted random angles on an ellipse.
ConvexPolygon random_convex(std::mt19937& rng, Point2 center, double rx, double ry) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> count(3, 8);
  std::vector<double> angles(count(rng));
  for (double& a : angles) a = u(rng);
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return b - a < 0.05; }),
               angles.end());
  while (angles.size() < 3) angles = {0.0, 2.1, 4.2};
  std::vector<Point2> pts;
  for (double a : angles) pts.push_back(center + Point2{rx * std::cos(a), ry * std::sin(a)});
  return ConvexPolygon(pts);
}

// Length of the part of seg inside poly by dense parametric sampling.
double sampled_inside_length(const Segment2& seg, const ConvexPolygon& poly, int n) {
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    if (poly.contains(seg.at((i + 0.5) / n), 1e-12)) ++inside;
  }
  return seg.length() * inside / n;
}

// Midpoint-rule quadrature of the mean distance to the line of seg over poly.
double quadrature_mean_distance(const ConvexPolygon& poly, const Segment2& seg, int n) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (Point2 p : poly.vertices()) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double hx = (xmax - xmin) / n;
  const double hy = (ymax - ymin) / n;
  double sum = 0.0;
  double area = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Point2 p{xmin + (i + 0.5) * hx, ymin + (j + 0.5) * hy};
      if (!poly.contains(p)) continue;
      sum += distance_to_line(p, seg);
      area += 1.0;
    }
  }
  return sum / area;
}

Point2 rotate(Point2 p, double angle) {
  return {std::cos(angle) * p.x - std::sin(angle) * p.y,
          std::sin(angle) * p.x + std::cos(angle) * p.y};
}

ConvexPolygon transform(const ConvexPolygon& poly, double angle, Point2 shift, double scale) {
  std::vector<Point2> pts;
  for (Point2 p : poly.vertices()) pts.push_back(scale * rotate(p, angle) + shift);
  return ConvexPolygon(pts);
}

Segment2 transform(const Segment2& s, double angle, Point2 shift, double scale) {
  return {scale * rotate(s.a, angle) + shift, scale * rotate(s.b, angle) + shift};
}

TEST(Polygon, AreaAndCentroidOfUnitSquare) {
  const auto sq = unit_square();
  EXPECT_DOUBLE_EQ(sq.area(), 1.0);
  EXPECT_DOUBLE_EQ(sq.centroid().x, 0.5);
  EXPECT_DOUBLE_EQ(sq.centroid().y, 0.5);
}

TEST(Polygon, RejectsClockwiseAndNonConvexInput) {
  EXPECT_THROW(ConvexPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), frackbench::Error);
  EXPECT_THROW(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), frackbench::Error);
  EXPECT_THROW(ConvexPolygon({{0, 0}, {1, 0}}), frackbench::Error);
}

TEST(Polygon, SignedAreaAndPointInNonConvexPolygon) {
  const std::vector<Point2> ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  EXPECT_DOUBLE_EQ(signed_area(ell), 3.0);
  std::vector<Point2> reversed(ell.rbegin(), ell.rend());
  EXPECT_DOUBLE_EQ(signed_area(reversed), -3.0);
  EXPECT_TRUE(point_in_polygon({0.5, 1.5}, ell));
  EXPECT_FALSE(point_in_polygon({1.5, 1.5}, ell));
  EXPECT_TRUE(point_in_polygon({2.0, 0.5}, ell, 1e-12));
  const Point2 c = polygon_centroid(ell);
  // Two unit-area pieces: the 2x1 bar (centroid (1, 0.5)) and the square (0.5, 1.5).
  EXPECT_NEAR(c.x, (2.0 * 1.0 + 1.0 * 0.5) / 3.0, 1e-15);
  EXPECT_NEAR(c.y, (2.0 * 0.5 + 1.0 * 1.5) / 3.0, 1e-15);
}

TEST(Clip, SegmentSpanningTheSquare) {
  auto r = clip_segment_to_polygon({{0, 0.5}, {1, 0.5}}, unit_square());
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->length(), 1.0, 1e-15);
}

TEST(Clip, DisjointSegmentIsEmpty) {
  EXPECT_FALSE(clip_segment_to_polygon({{2, 2}, {3, 3}}, unit_square()));
}

TEST(Clip, PartialOverlapMatchesSampling) {
  const Segment2 seg{{-0.5, 0.5}, {0.5, 0.5}};
  auto r = clip_segment_to_polygon(seg, unit_square());
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->a.x, 0.0, 1e-15);
  EXPECT_NEAR(r->b.x, 0.5, 1e-15);
  EXPECT_NEAR(r->a.y, 0.5, 1e-15);
  EXPECT_NEAR(r->length(), sampled_inside_length(seg, unit_square(), 100000), 1e-4);
}

TEST(Clip, MinimumLengthDropsShortPieces) {
  EXPECT_FALSE(clip_segment_to_polygon({{-0.5, 0.5}, {0.001, 0.5}}, unit_square(), 0.01));
}

TEST(Clip, RandomSegmentsAgreeWithSamplingAndAreIdempotent) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  constexpr int samples = 20000;
  for (int trial = 0; trial < 200; ++trial) {
    const auto poly = random_convex(rng, {0, 0}, 1.0, 0.7);
    const Segment2 seg{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const auto clipped = clip_segment_to_polygon(seg, poly);
    const double expected = sampled_inside_length(seg, poly, samples);
    const double got = clipped ? clipped->length() : 0.0;
    EXPECT_NEAR(got, expected, 2.0 * seg.length() / samples) << "trial " << trial;
    if (!clipped) continue;
    const auto again = clip_segment_to_polygon(*clipped, poly);
    ASSERT_TRUE(again);
    EXPECT_NEAR(distance(again->a, clipped->a), 0.0, 1e-12);
    EXPECT_NEAR(distance(again->b, clipped->b), 0.0, 1e-12);
  }
}

TEST(Intersect, CrossingDiagonals) {
  auto r = intersect_segments({{0, 0}, {1, 1}}, {{0, 1}, {1, 0}}, 1e-12);
  ASSERT_EQ(r.kind, IntersectionKind::point);
  EXPECT_NEAR(r.point.x, 0.5, 1e-15);
  EXPECT_NEAR(r.point.y, 0.5, 1e-15);
  EXPECT_NEAR(r.t1, 0.5, 1e-15);
  EXPECT_NEAR(r.t2, 0.5, 1e-15);
}

TEST(Intersect, ParallelDisjointAndCollinear) {
  EXPECT_EQ(intersect_segments({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}, 1e-12).kind,
            IntersectionKind::none);
  EXPECT_EQ(intersect_segments({{0, 0}, {1, 0}}, {{0.5, 0}, {2, 0}}, 1e-12).kind,
            IntersectionKind::collinear_overlap);
  const auto touch = intersect_segments({{0, 0}, {1, 0}}, {{1, 0}, {2, 0}}, 1e-12);
  EXPECT_EQ(touch.kind, IntersectionKind::point);
  EXPECT_NEAR(touch.point.x, 1.0, 1e-15);
  EXPECT_EQ(intersect_segments({{0, 0}, {1, 0}}, {{2, -1}, {2, 1}}, 1e-12).kind,
            IntersectionKind::none);
}

// Sign change of the side of s2 along s1, located by dense sampling, then checked to
// fall within s2's extent.
bool sampled_crossing(const Segment2& s1, const Segment2& s2, int n) {
  auto side = [&](double t) { return cross(s2.b - s2.a, s1.at(t) - s2.a); };
  double prev = side(0.0);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double cur = side(t);
    if (prev == 0.0 || (prev < 0) != (cur < 0)) {
      const double u = project_parameter(s1.at(t), s2);
      if (u >= -1.0 / n && u <= 1.0 + 1.0 / n) return true;
    }
    prev = cur;
  }
  return false;
}

TEST(Intersect, Benchmark3FirstTwoFracturesAgreeWithSampling) {
  const auto s = frackbench::scenario::builtin_benchmark("3a");
  const auto segs = s.network.segments();
  const bool sampled = sampled_crossing(segs[0], segs[1], 200000);
  const auto r = intersect_segments(segs[0], segs[1], s.tolerance());
  EXPECT_EQ(r.kind == IntersectionKind::point, sampled);
}

TEST(Intersect, RandomPairsAgreeWithSamplingAndAreSymmetric) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int crossings = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Segment2 s1{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const Segment2 s2{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const auto r12 = intersect_segments(s1, s2, 1e-12);
    const auto r21 = intersect_segments(s2, s1, 1e-12);
    ASSERT_EQ(r12.kind, r21.kind);
    if (r12.kind == IntersectionKind::point) {
      ++crossings;
      EXPECT_NEAR(r12.t1, r21.t2, 1e-12);
      EXPECT_NEAR(r12.t2, r21.t1, 1e-12);
      EXPECT_NEAR(distance(r12.point, s1.at(r12.t1)), 0.0, 1e-12);
      EXPECT_NEAR(distance(r12.point, s2.at(r12.t2)), 0.0, 1e-12);
    }
    // Sampling can miss crossings within one sample of an endpoint; skip those.
    const double margin = 1e-3;
    const bool near_end = r12.kind == IntersectionKind::point &&
                          (std::min(r12.t1, 1 - r12.t1) < margin ||
                           std::min(r12.t2, 1 - r12.t2) < margin);
    if (!near_end) EXPECT_EQ(r12.kind == IntersectionKind::point, sampled_crossing(s1, s2, 20000));
  }
  EXPECT_GT(crossings, 50);
}

TEST(MeanDistance, UnitSquareBisectorAndEdge) {
  EXPECT_NEAR(mean_distance_cell_to_segment(unit_square(), {{0.5, 0}, {0.5, 1}}), 0.25, 1e-15);
  EXPECT_NEAR(mean_distance_cell_to_segment(unit_square(), {{0, 0}, {0, 1}}), 0.5, 1e-15);
}

TEST(MeanDistance, OnlyTheSupportingLineMatters) {
  // A short piece of the bisector gives the same cell-averaged distance.
  EXPECT_NEAR(mean_distance_cell_to_segment(unit_square(), {{0.5, 0.4}, {0.5, 0.6}}), 0.25,
              1e-15);
}

TEST(MeanDistance, RandomCellsMatchQuadrature) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto poly = random_convex(rng, {0, 0}, 1.0, 0.6);
    const Segment2 seg{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const double exact = mean_distance_cell_to_segment(poly, seg);
    EXPECT_NEAR(exact, quadrature_mean_distance(poly, seg, 600), 2e-3 * (1.0 + exact))
        << "trial " << trial;
  }
}

TEST(MeanDistance, InvariantUnderRigidMotionAndLinearInScale) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto poly = random_convex(rng, {0, 0}, 1.0, 0.8);
    const Segment2 seg{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const double base = mean_distance_cell_to_segment(poly, seg);
    const double angle = 3.0 * u(rng);
    const Point2 shift{10 * u(rng), 10 * u(rng)};
    EXPECT_NEAR(mean_distance_cell_to_segment(transform(poly, angle, shift, 1.0),
                                              transform(seg, angle, shift, 1.0)),
                base, 1e-11);
    EXPECT_NEAR(mean_distance_cell_to_segment(transform(poly, 0.0, {}, 3.5),
                                              transform(seg, 0.0, {}, 3.5)),
                3.5 * base, 1e-11);
  }
}

TEST(MeanDistance, ReflectionAcrossTheLineLeavesItUnchanged) {
  const ConvexPolygon tri({{0.1, -0.3}, {0.9, 0.2}, {0.2, 0.8}});
  const Segment2 line{{0, 0}, {1, 1}};
  // Reflection across y = x swaps coordinates; reverse to keep counter-clockwise order.
  const ConvexPolygon mirrored({{0.8, 0.2}, {0.2, 0.9}, {-0.3, 0.1}});
  EXPECT_NEAR(mean_distance_cell_to_segment(tri, line),
              mean_distance_cell_to_segment(mirrored, line), 1e-15);
}

TEST(MeanDistance, CellOnOneSideUsesCentroidDistance) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto poly = random_convex(rng, {0, 3}, 1.0, 0.5);
    const Segment2 line{{-2, 0.5}, {2, 1.0}};
    EXPECT_NEAR(mean_distance_cell_to_segment(poly, line), distance_to_line(poly.centroid(), line),
                1e-12);
  }
}

TEST(Distances, PointToLineAndSegment) {
  const Segment2 s{{0, 0}, {1, 0}};
  EXPECT_DOUBLE_EQ(distance_to_line({3, 2}, s), 2.0);
  EXPECT_DOUBLE_EQ(distance_to_segment({3, 0}, s), 2.0);
  EXPECT_DOUBLE_EQ(project_parameter({0.25, 7}, s), 0.25);
  EXPECT_DOUBLE_EQ(relative_tolerance(std::vector<Point2>{{0, 0}, {3, 4}}), 5e-9);
}

TEST(ClipPolygon, OverlapOfTwoSquares) {
  const std::vector<Point2> subject{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
  const auto overlap = clip_polygon(subject, unit_square());
  EXPECT_NEAR(signed_area(overlap), 0.25, 1e-15);
  const std::vector<Point2> far{{3, 3}, {4, 3}, {4, 4}};
  EXPECT_TRUE(clip_polygon(far, unit_square()).empty());
}

}  // namespace
