#include "frackbench/error.hpp"
#include "frackbench/mesh.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

namespace {

using namespace frackbench::mesh;
using frackbench::Error;
using frackbench::ErrorCode;
using frackbench::geometry::Point2;
using frackbench::geometry::Segment2;

Index count_boundary_faces(const Mesh& m) {
  return std::count_if(m.faces().begin(), m.faces().end(),
                       [](const Face& f) { return f.is_boundary(); });
}

void expect_closed_cells(const Mesh& m) {
  for (Index c = 0; c < m.num_cells(); ++c) {
    Point2 sum;
    for (Index f : m.cell_faces(c)) sum = sum + m.face_geometry(f).area * m.outward_normal(c, f);
    EXPECT_NEAR(sum.x, 0.0, 1e-12) << "cell " << c;
    EXPECT_NEAR(sum.y, 0.0, 1e-12) << "cell " << c;
  }
}

void expect_consistent_normals(const Mesh& m) {
  for (Index f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.face(f);
    if (face.is_boundary()) continue;
    const Point2 nl = m.outward_normal(face.left, f);
    const Point2 nr = m.outward_normal(face.right, f);
    EXPECT_EQ(nl.x, -nr.x);
    EXPECT_EQ(nl.y, -nr.y);
    EXPECT_EQ(nl, m.face_geometry(f).normal);
  }
}

TEST(StructuredQuads, TwoByTwoCounts) {
  const Mesh m = build_structured_quads({}, 2, 2);
  EXPECT_EQ(m.num_cells(), 4u);
  EXPECT_EQ(m.num_faces(), 12u);
  EXPECT_EQ(m.num_vertices(), 9u);
  EXPECT_EQ(count_boundary_faces(m), 8u);
}

TEST(StructuredQuads, SingleCell) {
  const Mesh m = build_structured_quads({}, 1, 1);
  EXPECT_EQ(m.num_cells(), 1u);
  EXPECT_EQ(count_boundary_faces(m), 4u);
  for (const Face& f : m.faces()) EXPECT_NE(f.boundary_tag, 0);
}

TEST(StructuredQuads, SnapLinesBecomeGridLines) {
  const double lo = 0.5 - 5e-5;
  const double hi = 0.5 + 5e-5;
  const Mesh m = build_structured_quads({}, 10, 10, SnapLines{{lo, hi}, {}});
  bool found_lo = false;
  bool found_hi = false;
  for (Index f = 0; f < m.num_faces(); ++f) {
    const Segment2 s = m.face_segment(f);
    if (s.a.x != s.b.x) continue;
    found_lo |= s.a.x == lo;
    found_hi |= s.a.x == hi;
  }
  EXPECT_TRUE(found_lo);
  EXPECT_TRUE(found_hi);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
}

TEST(StructuredQuads, SnapLineOutsideDomainIsRejected) {
  EXPECT_THROW(build_structured_quads({}, 4, 4, SnapLines{{1.5}, {}}), Error);
}

TEST(StructuredQuads, BoundaryTagsFollowRectangleSides) {
  const Mesh m = build_structured_quads({0, 0, 2, 1}, 4, 2);
  for (Index f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.face(f);
    if (!face.is_boundary()) continue;
    const Point2 c = m.face_geometry(f).centroid;
    if (c.y == 0.0) EXPECT_EQ(face.boundary_tag, RectSide::bottom);
    if (c.x == 2.0) EXPECT_EQ(face.boundary_tag, RectSide::right);
    if (c.y == 1.0) EXPECT_EQ(face.boundary_tag, RectSide::top);
    if (c.x == 0.0) EXPECT_EQ(face.boundary_tag, RectSide::left);
  }
}

TEST(MeshInvariants, AreasNormalsAndClosureOnShippedMeshes) {
  for (const char* name : {"meshes/b2_tri.fvmesh", "meshes/b3_tri.fvmesh", "meshes/b1_tri.fvmesh"}) {
    SCOPED_TRACE(name);
    const Mesh m = read_mesh(frackbench::testing::source_data(name));
    double domain = 0.0;
    if (std::string(name).find("b1") != std::string::npos) {
      domain = std::abs(frackbench::geometry::signed_area(
          frackbench::scenario::builtin_benchmark("1").domain));
    } else {
      domain = 1.0;
    }
    EXPECT_NEAR(m.total_area(), domain, 1e-12 * domain);
    expect_closed_cells(m);
    expect_consistent_normals(m);
  }
}

TEST(MeshInvariants, RefinementKeepsAreaAndTagging) {
  const Mesh coarse = read_mesh(frackbench::testing::source_data("meshes/b2_tri.fvmesh"));
  const Mesh fine = refine_uniform(coarse);
  EXPECT_EQ(fine.num_cells(), 4 * coarse.num_cells());
  EXPECT_NEAR(fine.total_area(), coarse.total_area(), 1e-12);
  expect_closed_cells(fine);
  const auto s = frackbench::scenario::builtin_benchmark("2a");
  const auto segs = s.network.segments();
  const auto tc = tag_fracture_faces(coarse, segs);
  const auto tf = tag_fracture_faces(fine, segs);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    EXPECT_EQ(tf.faces[i].size(), 2 * tc.faces[i].size());
    EXPECT_NEAR(tf.covered_length[i], segs[i].length(), 1e-9);
  }
}

TEST(ReadMesh, SingleTriangle) {
  std::istringstream in("fvmesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 2\n");
  const Mesh m = read_mesh(in);
  EXPECT_EQ(m.num_cells(), 1u);
  EXPECT_EQ(m.num_faces(), 3u);
  EXPECT_EQ(count_boundary_faces(m), 3u);
  EXPECT_DOUBLE_EQ(m.cell_area(0), 0.5);
}

TEST(ReadMesh, ClockwiseCellIsReoriented) {
  std::istringstream in("fvmesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 2 1\n");
  EXPECT_DOUBLE_EQ(read_mesh(in).cell_area(0), 0.5);
}

TEST(ReadMesh, FractureEdgeFromFile) {
  std::istringstream in(
      "fvmesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ncells 2\n3 0 1 2\n3 0 2 3\n"
      "fracture_faces 1\n0 0 2\n");
  const Mesh m = read_mesh(in);
  const auto tagging = file_fracture_tagging(m);
  ASSERT_EQ(tagging.faces.size(), 1u);
  ASSERT_EQ(tagging.faces[0].size(), 1u);
  EXPECT_EQ(tagging.faces[0][0], *m.find_face(0, 2));
  EXPECT_FALSE(m.face(tagging.faces[0][0]).is_boundary());
}

TEST(ReadMesh, MalformedInputsAreRejected) {
  auto code_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_mesh(in);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  EXPECT_EQ(code_of("fvmesh 1\nvertices 3\n0 0\n1 0\n"), ErrorCode::mesh);
  EXPECT_EQ(code_of("fvmesh 1\nvertices 3\n0 0\n1 0\n2 0\ncells 1\n3 0 1 2\n"), ErrorCode::mesh);
  EXPECT_EQ(code_of("fvmesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 7\n"), ErrorCode::mesh);
  // Three triangles sharing the edge 0-1.
  EXPECT_EQ(code_of("fvmesh 1\nvertices 5\n0 0\n1 0\n0 1\n0 -1\n2 1\ncells 3\n3 0 1 2\n"
                    "3 1 0 3\n3 0 1 4\n"),
            ErrorCode::mesh);
}

TEST(ReadMesh, RoundTripReproducesConnectivity) {
  const Mesh m = read_mesh(frackbench::testing::source_data("meshes/b3_tri.fvmesh"));
  std::ostringstream out;
  write_mesh(out, m);
  std::istringstream in(out.str());
  const Mesh again = read_mesh(in);
  ASSERT_EQ(again.num_cells(), m.num_cells());
  ASSERT_EQ(again.num_faces(), m.num_faces());
  EXPECT_EQ(again.vertices(), m.vertices());
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto a = m.cell_vertices(c);
    const auto b = again.cell_vertices(c);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  std::ostringstream twice;
  write_mesh(twice, again);
  EXPECT_EQ(out.str(), twice.str());
}

TEST(ReadMesh, GmshWithFractureAndBoundaryLines) {
  std::istringstream in(R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
1 1 "left"
1 2 "fracture_0"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
4
1 1 2 1 1 4 1
2 1 2 2 2 1 3
3 2 2 0 1 1 2 3
4 2 2 0 1 1 3 4
$EndElements
)");
  const Mesh m = read_gmsh(in);
  EXPECT_EQ(m.num_cells(), 2u);
  ASSERT_EQ(m.fracture_edges().size(), 1u);
  EXPECT_EQ(m.fracture_edges()[0].tag, 0);
  const auto left = m.find_face(0, 3);
  ASSERT_TRUE(left);
  EXPECT_EQ(m.face(*left).boundary_tag, 1);
}

TEST(TagFractures, HorizontalLineOnTwoByTwo) {
  const Mesh m = build_structured_quads({}, 2, 2);
  const std::vector<Segment2> fractures{{{0, 0.5}, {1, 0.5}}};
  const auto t = tag_fracture_faces(m, fractures);
  ASSERT_EQ(t.faces.size(), 1u);
  EXPECT_EQ(t.faces[0].size(), 2u);
  EXPECT_NEAR(t.covered_length[0], 1.0, 1e-15);
  // Ordered from the first endpoint.
  EXPECT_LT(m.face_geometry(t.faces[0][0]).centroid.x, m.face_geometry(t.faces[0][1]).centroid.x);
}

TEST(TagFractures, EmptyNetwork) {
  const Mesh m = build_structured_quads({}, 2, 2);
  EXPECT_TRUE(tag_fracture_faces(m, {}).faces.empty());
}

TEST(TagFractures, NonConformingFractureIsRejected) {
  const Mesh m = build_structured_quads({}, 2, 2);
  const std::vector<Segment2> fractures{{{0, 0.3}, {1, 0.3}}};
  try {
    tag_fracture_faces(m, fractures);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::mesh);
  }
}

TEST(TagFractures, TaggedLengthsEqualFractureLengths) {
  const auto s = frackbench::scenario::builtin_benchmark("3b");
  const Mesh m = read_mesh(frackbench::testing::source_data("meshes/b3_tri.fvmesh"));
  const auto segs = s.network.segments();
  const auto t = tag_fracture_faces(m, segs);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    double sum = 0.0;
    for (Index f : t.faces[i]) sum += m.face_geometry(f).area;
    EXPECT_NEAR(sum, segs[i].length(), 1e-9) << "fracture " << i;
  }
}

TEST(WithoutBoundaryTags, DropsTagsKeepsFractures) {
  const Mesh m = build_structured_quads({}, 3, 3);
  const Mesh bare = without_boundary_tags(m);
  for (const Face& f : bare.faces()) EXPECT_EQ(f.boundary_tag, 0);
  EXPECT_EQ(bare.num_cells(), m.num_cells());
}

}  // namespace
