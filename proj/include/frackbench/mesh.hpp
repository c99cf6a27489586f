#pragma once

#include "frackbench/geometry.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace frackbench::mesh {

using geometry::Point2;
using geometry::Segment2;
using Index = std::size_t;

inline constexpr Index no_cell = std::numeric_limits<Index>::max();

/// Edge given by its two vertex indices plus an integer tag (boundary tag or fracture id).
struct TaggedEdge {
  int tag = 0;
  Index a = 0;
  Index b = 0;
};

/// Unique mesh edge. Vertices are ordered as traversed counter-clockwise by the left cell,
/// so the normal points from left to right. Boundary faces have right == no_cell.
struct Face {
  std::array<Index, 2> vertices{};
  Index left = no_cell;
  Index right = no_cell;
  int boundary_tag = 0;  ///< 0 when untagged or interior

  [[nodiscard]] bool is_boundary() const noexcept { return right == no_cell; }
};

struct FaceGeometry {
  double area = 0.0;  ///< edge length times unit depth
  Point2 normal;      ///< unit normal, left to right
  Point2 centroid;
};

/// Immutable 2D cell complex of convex polygons (triangles and quadrilaterals in practice).
class Mesh {
 public:
  Mesh() = default;
  /// Cells may be given in either orientation; clockwise cells are reversed.
  /// Throws on out-of-range indices, zero-area or non-convex cells and edges shared by
  /// more than two cells. boundary_tags must reference boundary edges.
  Mesh(std::vector<Point2> vertices, const std::vector<std::vector<Index>>& cells,
       std::span<const TaggedEdge> boundary_tags = {}, std::vector<TaggedEdge> fracture_edges = {});

  [[nodiscard]] const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  [[nodiscard]] Index num_vertices() const noexcept { return vertices_.size(); }
  [[nodiscard]] Index num_cells() const noexcept { return cell_area_.size(); }
  [[nodiscard]] Index num_faces() const noexcept { return faces_.size(); }

  [[nodiscard]] std::span<const Index> cell_vertices(Index c) const {
    return {cell_vertex_ids_.data() + cell_offsets_[c], cell_offsets_[c + 1] - cell_offsets_[c]};
  }
  /// Face k of a cell joins cell_vertices(c)[k] and cell_vertices(c)[k+1].
  [[nodiscard]] std::span<const Index> cell_faces(Index c) const {
    return {cell_face_ids_.data() + cell_offsets_[c], cell_offsets_[c + 1] - cell_offsets_[c]};
  }
  [[nodiscard]] double cell_area(Index c) const { return cell_area_[c]; }
  [[nodiscard]] Point2 cell_centroid(Index c) const { return cell_centroid_[c]; }
  [[nodiscard]] std::vector<Point2> cell_points(Index c) const;
  [[nodiscard]] geometry::ConvexPolygon cell_polygon(Index c) const;

  [[nodiscard]] const std::vector<Face>& faces() const noexcept { return faces_; }
  [[nodiscard]] const Face& face(Index f) const { return faces_[f]; }
  [[nodiscard]] const FaceGeometry& face_geometry(Index f) const { return face_geometry_[f]; }
  [[nodiscard]] Segment2 face_segment(Index f) const {
    return {vertices_[faces_[f].vertices[0]], vertices_[faces_[f].vertices[1]]};
  }
  /// Unit normal of face f pointing out of cell c.
  [[nodiscard]] Point2 outward_normal(Index c, Index f) const;
  /// Vector from the centroid of cell c to the centroid of face f.
  [[nodiscard]] Point2 center_to_face(Index c, Index f) const {
    return face_geometry_[f].centroid - cell_centroid_[c];
  }
  /// Face joining two vertices, if any.
  [[nodiscard]] std::optional<Index> find_face(Index a, Index b) const;

  /// Fracture edges read from a mesh file (tag = fracture id), as given.
  [[nodiscard]] const std::vector<TaggedEdge>& fracture_edges() const noexcept {
    return fracture_edges_;
  }

  [[nodiscard]] double total_area() const;
  /// Absolute geometric tolerance, 1e-9 of the bounding-box diagonal.
  [[nodiscard]] double tolerance() const { return geometry::relative_tolerance(vertices_); }

 private:
  std::vector<Point2> vertices_;
  std::vector<Index> cell_offsets_{0};
  std::vector<Index> cell_vertex_ids_;
  std::vector<Index> cell_face_ids_;
  std::vector<double> cell_area_;
  std::vector<Point2> cell_centroid_;
  std::vector<Face> faces_;
  std::vector<FaceGeometry> face_geometry_;
  std::vector<TaggedEdge> fracture_edges_;
};

struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 1.0;
  double ymax = 1.0;
};

/// Extra grid-line coordinates inserted into a structured grid.
struct SnapLines {
  std::vector<double> x;
  std::vector<double> y;
};

/// Boundary tags assigned by the rectangular builders, numbered like the edges of a
/// counter-clockwise rectangle starting at its lower-left corner.
enum RectSide : int { bottom = 1, right = 2, top = 3, left = 4 };

/// Tensor-product quadrilateral mesh from strictly increasing line coordinates.
Mesh build_tensor_mesh(std::span<const double> xs, std::span<const double> ys);

/// Uniform nx-by-ny quadrilateral grid with optional inserted grid lines.
Mesh build_structured_quads(const Rect& domain, Index nx, Index ny, const SnapLines& snap = {});

/// Splits every triangle and quadrilateral into four through edge midpoints (and the
/// quadrilateral's vertex average). Conformity to fractures and boundary tags carry over.
Mesh refine_uniform(const Mesh& mesh);

/// Copy with boundary tags removed, so boundary faces resolve against a scenario's domain
/// edges geometrically. Fracture edges are kept.
Mesh without_boundary_tags(const Mesh& mesh);

/// Reads the native format or Gmsh v2 ASCII, chosen by content.
Mesh read_mesh(const std::filesystem::path& path);
Mesh read_mesh(std::istream& in);
Mesh read_gmsh(std::istream& in);
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);

/// Mesh faces lying on each fracture, ordered along the fracture from its first endpoint.
struct FractureFaceTagging {
  std::vector<std::vector<Index>> faces;
  std::vector<double> covered_length;
};

/// Tags faces that lie on each fracture segment. Throws if some portion of a fracture is
/// not covered by mesh faces, listing the uncovered intervals.
FractureFaceTagging tag_fracture_faces(const Mesh& mesh, std::span<const Segment2> fractures);

/// Tagging taken from the fracture edges stored in the mesh file.
FractureFaceTagging file_fracture_tagging(const Mesh& mesh);

}  // namespace frackbench::mesh
