#include "frackbench/geometry.hpp"

#include "frackbench/error.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace frackbench::geometry {

double relative_tolerance(std::span<const Point2> points) {
  if (points.empty()) return 1e-9;
  double xmin = points[0].x, xmax = points[0].x, ymin = points[0].y, ymax = points[0].y;
  for (const Point2& p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double diag = std::hypot(xmax - xmin, ymax - ymin);
  return 1e-9 * (diag > 0.0 ? diag : 1.0);
}

double distance_to_line(Point2 p, const Segment2& s) {
  return std::abs(cross(s.b - s.a, p - s.a)) / s.length();
}

double project_parameter(Point2 p, const Segment2& s) {
  const Point2 d = s.b - s.a;
  return dot(p - s.a, d) / dot(d, d);
}

double distance_to_segment(Point2 p, const Segment2& s) {
  const double t = std::clamp(project_parameter(p, s), 0.0, 1.0);
  return distance(p, s.at(t));
}

double signed_area(std::span<const Point2> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

Point2 polygon_centroid(std::span<const Point2> polygon) {
  // Shift to the first vertex to limit cancellation for far-from-origin coordinates.
  const Point2 o = polygon.front();
  double twice_area = 0.0;
  Point2 acc;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = polygon[i] - o;
    const Point2 q = polygon[(i + 1) % n] - o;
    const double w = cross(p, q);
    twice_area += w;
    acc = acc + w * (p + q);
  }
  return o + acc / (3.0 * twice_area);
}

bool point_in_polygon(Point2 p, std::span<const Point2> polygon, double tol) {
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Segment2 edge{polygon[i], polygon[(i + 1) % n]};
    if (distance_to_segment(p, edge) <= tol) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = polygon[i];
    const Point2 b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw Error(ErrorCode::geometry, "convex polygon needs at least 3 vertices");
  for (const Point2& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw Error(ErrorCode::geometry, "convex polygon has a non-finite vertex");
    }
  }
  area_ = signed_area(vertices_);
  if (!(area_ > 0.0)) {
    std::ostringstream msg;
    msg << "convex polygon has non-positive signed area " << area_;
    throw Error(ErrorCode::geometry, msg.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e0 = vertices_[(i + 1) % n] - vertices_[i];
    const Point2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (!(cross(e0, e1) > 1e-12 * norm(e0) * norm(e1))) {
      throw Error(ErrorCode::geometry, "polygon is not strictly convex");
    }
  }
  centroid_ = polygon_centroid(vertices_);
}

bool ConvexPolygon::contains(Point2 p, double tol) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = vertices_[(i + 1) % n] - vertices_[i];
    if (cross(e, p - vertices_[i]) < -tol * norm(e)) return false;
  }
  return true;
}

std::optional<Segment2> clip_segment_to_polygon(const Segment2& seg, const ConvexPolygon& poly,
                                                double min_length) {
  const Point2 d = seg.b - seg.a;
  double t_enter = 0.0;
  double t_exit = 1.0;
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = v[(i + 1) % n] - v[i];
    // Inside of a counter-clockwise edge is to its left: cross(e, x - v_i) >= 0.
    const double num = cross(e, seg.a - v[i]);
    const double den = cross(e, d);
    if (den == 0.0) {
      if (num < 0.0) return std::nullopt;
      continue;
    }
    const double t = -num / den;
    if (den > 0.0) {
      t_enter = std::max(t_enter, t);
    } else {
      t_exit = std::min(t_exit, t);
    }
    if (t_enter > t_exit) return std::nullopt;
  }
  const double len = (t_exit - t_enter) * norm(d);
  if (!(len > min_length)) return std::nullopt;
  return Segment2{seg.at(t_enter), seg.at(t_exit)};
}

SegmentIntersection intersect_segments(const Segment2& s1, const Segment2& s2, double tol) {
  const Point2 r = s1.b - s1.a;
  const Point2 s = s2.b - s2.a;
  const double lr = norm(r);
  const double ls = norm(s);
  const double denom = cross(r, s);
  const Point2 qp = s2.a - s1.a;
  SegmentIntersection out;

  if (std::abs(denom) <= 1e-12 * lr * ls) {
    if (distance_to_line(s2.a, s1) > tol) return out;
    // Collinear: overlap of the projected parameter intervals on s1.
    const double ta = dot(s2.a - s1.a, r) / (lr * lr);
    const double tb = dot(s2.b - s1.a, r) / (lr * lr);
    const double lo = std::max(0.0, std::min(ta, tb));
    const double hi = std::min(1.0, std::max(ta, tb));
    const double overlap = (hi - lo) * lr;
    if (overlap < -tol) return out;
    out.kind = overlap > tol ? IntersectionKind::collinear_overlap : IntersectionKind::point;
    out.t1 = std::clamp(lo, 0.0, 1.0);
    out.point = s1.at(out.t1);
    out.t2 = std::clamp(project_parameter(out.point, s2), 0.0, 1.0);
    return out;
  }

  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  const double et = tol / lr;
  const double eu = tol / ls;
  if (t < -et || t > 1.0 + et || u < -eu || u > 1.0 + eu) return out;
  out.kind = IntersectionKind::point;
  out.t1 = std::clamp(t, 0.0, 1.0);
  out.t2 = std::clamp(u, 0.0, 1.0);
  out.point = s1.a + t * r;
  return out;
}

std::vector<Point2> clip_polygon(std::span<const Point2> subject, const ConvexPolygon& clip) {
  std::vector<Point2> output(subject.begin(), subject.end());
  const auto& c = clip.vertices();
  const std::size_t nc = c.size();
  for (std::size_t i = 0; i < nc && !output.empty(); ++i) {
    const Point2 a = c[i];
    const Point2 e = c[(i + 1) % nc] - a;
    const std::vector<Point2> input = std::move(output);
    output.clear();
    const std::size_t n = input.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Point2 p = input[k];
      const Point2 q = input[(k + 1) % n];
      const double sp = cross(e, p - a);
      const double sq = cross(e, q - a);
      if (sp >= 0.0) output.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        output.push_back(lerp(p, q, t));
      }
    }
  }
  if (output.size() < 3) output.clear();
  return output;
}

namespace {

// Fan-triangulated integral of |signed distance| over a convex piece that lies on one
// side of the line (distance linear, exact by centroid rule).
double integrate_distance(const std::vector<Point2>& piece, Point2 origin, Point2 dir) {
  if (piece.size() < 3) return 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < piece.size(); ++i) {
    const Point2 a = piece[0], b = piece[i], c = piece[i + 1];
    const double area = 0.5 * std::abs(cross(b - a, c - a));
    const Point2 g = (a + b + c) / 3.0;
    total += area * std::abs(cross(dir, g - origin));
  }
  return total;
}

}  // namespace

double mean_distance_cell_to_segment(const ConvexPolygon& poly, const Segment2& seg) {
  const double len = seg.length();
  if (!(len > 0.0)) throw Error(ErrorCode::geometry, "mean distance: degenerate segment");
  const Point2 dir = (seg.b - seg.a) / len;
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  std::vector<Point2> pos;
  std::vector<Point2> neg;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = v[i];
    const Point2 q = v[(i + 1) % n];
    const double sp = cross(dir, p - seg.a);
    const double sq = cross(dir, q - seg.a);
    if (sp >= 0.0) pos.push_back(p);
    if (sp <= 0.0) neg.push_back(p);
    if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
      const Point2 x = lerp(p, q, sp / (sp - sq));
      pos.push_back(x);
      neg.push_back(x);
    }
  }
  const double integral = integrate_distance(pos, seg.a, dir) + integrate_distance(neg, seg.a, dir);
  return integral / poly.area();
}

}  // namespace frackbench::geometry
