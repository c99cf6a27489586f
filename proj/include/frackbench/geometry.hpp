#pragma once

// Planar geometry kernels shared by meshing, fracture embedding and error evaluation.
// Predicates are tolerance based; callers pass an absolute tolerance, usually derived
// from the scenario extent through relative_tolerance().

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace frackbench::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return a + t * (b - a); }

/// Relative geometric tolerance: 1e-9 of the diagonal of the bounding box.
double relative_tolerance(std::span<const Point2> points);

struct Segment2 {
  Point2 a;
  Point2 b;

  [[nodiscard]] double length() const { return distance(a, b); }
  [[nodiscard]] Point2 midpoint() const { return 0.5 * (a + b); }
  [[nodiscard]] Point2 direction() const { return (b - a) / length(); }
  /// Unit normal, direction rotated by +90 degrees.
  [[nodiscard]] Point2 normal() const {
    const Point2 t = direction();
    return {-t.y, t.x};
  }
  [[nodiscard]] Point2 at(double t) const { return lerp(a, b, t); }
};

/// Distance from p to the infinite line through s.
double distance_to_line(Point2 p, const Segment2& s);
/// Distance from p to the closed segment s.
double distance_to_segment(Point2 p, const Segment2& s);
/// Parameter of the orthogonal projection of p onto the line through s (0 at a, 1 at b).
double project_parameter(Point2 p, const Segment2& s);

/// Counter-clockwise, strictly convex polygon with at least three vertices.
class ConvexPolygon {
 public:
  /// Validates the invariants; clockwise input is rejected, not reordered.
  explicit ConvexPolygon(std::vector<Point2> vertices);

  [[nodiscard]] const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  [[nodiscard]] std::size_t size() const noexcept { return vertices_.size(); }
  [[nodiscard]] double area() const noexcept { return area_; }
  [[nodiscard]] Point2 centroid() const noexcept { return centroid_; }
  [[nodiscard]] bool contains(Point2 p, double tol = 0.0) const;

 private:
  std::vector<Point2> vertices_;
  double area_ = 0.0;
  Point2 centroid_;
};

/// Signed area (positive for counter-clockwise) of an arbitrary simple polygon.
double signed_area(std::span<const Point2> polygon);
/// Area centroid of an arbitrary simple polygon with nonzero area.
Point2 polygon_centroid(std::span<const Point2> polygon);
/// Even-odd point-in-polygon test for a simple (possibly non-convex) polygon.
/// Points on the boundary within tol count as inside.
bool point_in_polygon(Point2 p, std::span<const Point2> polygon, double tol = 0.0);

/// Intersection of a segment with a closed convex polygon. Returns nothing when the
/// overlap is empty or shorter than min_length.
std::optional<Segment2> clip_segment_to_polygon(const Segment2& seg, const ConvexPolygon& poly,
                                                double min_length = 0.0);

enum class IntersectionKind {
  none,
  point,
  collinear_overlap,
};

struct SegmentIntersection {
  IntersectionKind kind = IntersectionKind::none;
  Point2 point;
  double t1 = 0.0;  ///< parameter along the first segment
  double t2 = 0.0;  ///< parameter along the second segment
};

/// Transversal intersection of two closed segments. Parallel segments lying on a common
/// line with positive-length overlap are reported as collinear_overlap; touching
/// collinear segments (single shared endpoint) are reported as a point.
SegmentIntersection intersect_segments(const Segment2& s1, const Segment2& s2, double tol);

/// Sutherland-Hodgman clip of a convex subject polygon against a convex clip polygon.
/// Returns the (possibly empty) vertex list of the overlap, counter-clockwise.
std::vector<Point2> clip_polygon(std::span<const Point2> subject, const ConvexPolygon& clip);

/// Mean distance (1/|poly|) * integral over poly of dist(x, line(seg)) dA.
/// The polygon is split by the supporting line; on each piece the distance is linear,
/// so a triangle-fan centroid rule integrates it exactly.
double mean_distance_cell_to_segment(const ConvexPolygon& poly, const Segment2& seg);

}  // namespace frackbench::geometry
