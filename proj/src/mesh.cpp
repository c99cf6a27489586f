#include "frackbench/mesh.hpp"

#include "frackbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>

namespace frackbench::mesh {

namespace {

std::uint64_t edge_key(Index a, Index b, Index n) {
  return static_cast<std::uint64_t>(std::min(a, b)) * n + std::max(a, b);
}

[[noreturn]] void mesh_error(const std::string& msg) { throw Error(ErrorCode::mesh, msg); }

}  // namespace

Mesh::Mesh(std::vector<Point2> vertices, const std::vector<std::vector<Index>>& cells,
           std::span<const TaggedEdge> boundary_tags, std::vector<TaggedEdge> fracture_edges)
    : vertices_(std::move(vertices)), fracture_edges_(std::move(fracture_edges)) {
  const Index nv = vertices_.size();
  std::unordered_map<std::uint64_t, Index> face_of_edge;
  face_of_edge.reserve(cells.size() * 2);
  cell_area_.reserve(cells.size());
  cell_centroid_.reserve(cells.size());

  for (Index c = 0; c < cells.size(); ++c) {
    std::vector<Index> ids = cells[c];
    if (ids.size() < 3) mesh_error("cell " + std::to_string(c) + " has fewer than 3 vertices");
    std::vector<Point2> pts;
    pts.reserve(ids.size());
    for (Index v : ids) {
      if (v >= nv) mesh_error("cell " + std::to_string(c) + " references vertex out of range");
      pts.push_back(vertices_[v]);
    }
    const double area = geometry::signed_area(pts);
    if (area == 0.0 || !std::isfinite(area)) {
      mesh_error("cell " + std::to_string(c) + " has zero area");
    }
    if (area < 0.0) {
      std::reverse(ids.begin(), ids.end());
      std::reverse(pts.begin(), pts.end());
    }
    try {
      const geometry::ConvexPolygon poly(pts);
      cell_area_.push_back(poly.area());
      cell_centroid_.push_back(poly.centroid());
    } catch (const Error& e) {
      mesh_error("cell " + std::to_string(c) + ": " + e.what());
    }

    const Index k = ids.size();
    for (Index i = 0; i < k; ++i) {
      const Index a = ids[i];
      const Index b = ids[(i + 1) % k];
      if (a == b) mesh_error("cell " + std::to_string(c) + " has a repeated vertex");
      const auto key = edge_key(a, b, nv);
      auto it = face_of_edge.find(key);
      Index f;
      if (it == face_of_edge.end()) {
        f = faces_.size();
        face_of_edge.emplace(key, f);
        faces_.push_back(Face{{a, b}, c, no_cell, 0});
      } else {
        f = it->second;
        Face& face = faces_[f];
        if (face.right != no_cell) {
          mesh_error("non-manifold edge (" + std::to_string(a) + "," + std::to_string(b) +
                     ") shared by more than two cells");
        }
        if (face.vertices[0] != b || face.vertices[1] != a) {
          mesh_error("inconsistent cell orientation at edge (" + std::to_string(a) + "," +
                     std::to_string(b) + ")");
        }
        face.right = c;
      }
      cell_vertex_ids_.push_back(a);
      cell_face_ids_.push_back(f);
    }
    cell_offsets_.push_back(cell_vertex_ids_.size());
  }

  face_geometry_.reserve(faces_.size());
  for (const Face& face : faces_) {
    const Point2 a = vertices_[face.vertices[0]];
    const Point2 b = vertices_[face.vertices[1]];
    const Point2 e = b - a;
    const double len = geometry::norm(e);
    face_geometry_.push_back(FaceGeometry{len, Point2{e.y / len, -e.x / len}, 0.5 * (a + b)});
  }

  for (const TaggedEdge& t : boundary_tags) {
    if (t.a >= nv || t.b >= nv) mesh_error("boundary tag references vertex out of range");
    const auto it = face_of_edge.find(edge_key(t.a, t.b, nv));
    if (it == face_of_edge.end()) {
      mesh_error("boundary tag on edge (" + std::to_string(t.a) + "," + std::to_string(t.b) +
                 ") which is not a mesh edge");
    }
    Face& face = faces_[it->second];
    if (!face.is_boundary()) mesh_error("boundary tag on an interior edge");
    face.boundary_tag = t.tag;
  }
  for (const TaggedEdge& t : fracture_edges_) {
    if (t.a >= nv || t.b >= nv || !face_of_edge.contains(edge_key(t.a, t.b, nv))) {
      mesh_error("fracture edge (" + std::to_string(t.a) + "," + std::to_string(t.b) +
                 ") is not a mesh edge");
    }
    if (t.tag < 0) mesh_error("negative fracture id in fracture edge list");
  }
}

std::vector<Point2> Mesh::cell_points(Index c) const {
  std::vector<Point2> pts;
  for (Index v : cell_vertices(c)) pts.push_back(vertices_[v]);
  return pts;
}

geometry::ConvexPolygon Mesh::cell_polygon(Index c) const {
  return geometry::ConvexPolygon(cell_points(c));
}

Point2 Mesh::outward_normal(Index c, Index f) const {
  const Point2 n = face_geometry_[f].normal;
  return faces_[f].left == c ? n : Point2{-n.x, -n.y};
}

std::optional<Index> Mesh::find_face(Index a, Index b) const {
  // Linear scan through the cells around a would need vertex adjacency; faces are few
  // enough for the callers (file ingestion) that a scan is adequate.
  for (Index f = 0; f < faces_.size(); ++f) {
    const auto& v = faces_[f].vertices;
    if ((v[0] == a && v[1] == b) || (v[0] == b && v[1] == a)) return f;
  }
  return std::nullopt;
}

double Mesh::total_area() const {
  double s = 0.0;
  for (double a : cell_area_) s += a;
  return s;
}

Mesh build_tensor_mesh(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 2 || ys.size() < 2) mesh_error("tensor mesh needs at least two lines per axis");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) mesh_error("tensor mesh x lines must be strictly increasing");
  }
  for (std::size_t j = 1; j < ys.size(); ++j) {
    if (!(ys[j] > ys[j - 1])) mesh_error("tensor mesh y lines must be strictly increasing");
  }
  const Index nx = xs.size() - 1;
  const Index ny = ys.size() - 1;
  std::vector<Point2> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (Index j = 0; j <= ny; ++j) {
    for (Index i = 0; i <= nx; ++i) vertices.push_back({xs[i], ys[j]});
  }
  const auto vid = [nx](Index i, Index j) { return j * (nx + 1) + i; };
  std::vector<std::vector<Index>> cells;
  cells.reserve(nx * ny);
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  std::vector<TaggedEdge> tags;
  tags.reserve(2 * (nx + ny));
  for (Index i = 0; i < nx; ++i) {
    tags.push_back({RectSide::bottom, vid(i, 0), vid(i + 1, 0)});
    tags.push_back({RectSide::top, vid(i, ny), vid(i + 1, ny)});
  }
  for (Index j = 0; j < ny; ++j) {
    tags.push_back({RectSide::left, vid(0, j), vid(0, j + 1)});
    tags.push_back({RectSide::right, vid(nx, j), vid(nx, j + 1)});
  }
  return Mesh(std::move(vertices), cells, tags);
}

namespace {

std::vector<double> merged_lines(double lo, double hi, Index n, const std::vector<double>& snap) {
  const double tol = 1e-9 * (hi - lo);
  std::vector<double> lines;
  lines.reserve(n + 1 + snap.size());
  for (Index i = 0; i <= n; ++i) {
    lines.push_back(i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
  }
  for (double s : snap) {
    if (s < lo - tol || s > hi + tol) {
      std::ostringstream msg;
      msg << "snap line " << s << " outside domain [" << lo << ", " << hi << "]";
      mesh_error(msg.str());
    }
    lines.push_back(std::clamp(s, lo, hi));
  }
  std::sort(lines.begin(), lines.end());
  std::vector<double> out;
  for (double v : lines) {
    if (out.empty() || v - out.back() > tol) {
      out.push_back(v);
    } else if (std::find(snap.begin(), snap.end(), v) != snap.end()) {
      out.back() = v;  // keep the snap coordinate exactly
    }
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace

Mesh build_structured_quads(const Rect& domain, Index nx, Index ny, const SnapLines& snap) {
  if (nx < 1 || ny < 1) mesh_error("structured grid needs nx, ny >= 1");
  if (!(domain.xmax > domain.xmin) || !(domain.ymax > domain.ymin)) {
    mesh_error("structured grid domain is empty");
  }
  const auto xs = merged_lines(domain.xmin, domain.xmax, nx, snap.x);
  const auto ys = merged_lines(domain.ymin, domain.ymax, ny, snap.y);
  return build_tensor_mesh(xs, ys);
}

// ---------------------------------------------------------------------------
// File formats

namespace {

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) mesh_error(std::string("malformed mesh file: expected ") + what);
  return v;
}

void expect_keyword(std::istream& in, const std::string& keyword) {
  std::string word;
  if (!(in >> word) || word != keyword) {
    mesh_error("malformed mesh file: expected '" + keyword + "', found '" + word + "'");
  }
}

Mesh read_native(std::istream& in) {
  expect_keyword(in, "fvmesh");
  if (read_value<int>(in, "format version") != 1) mesh_error("unsupported fvmesh version");

  expect_keyword(in, "vertices");
  const auto nv = read_value<Index>(in, "vertex count");
  std::vector<Point2> vertices(nv);
  for (auto& p : vertices) {
    p.x = read_value<double>(in, "vertex x");
    p.y = read_value<double>(in, "vertex y");
  }

  expect_keyword(in, "cells");
  const auto nc = read_value<Index>(in, "cell count");
  std::vector<std::vector<Index>> cells(nc);
  for (auto& c : cells) {
    const auto k = read_value<Index>(in, "cell vertex count");
    if (k < 3 || k > 64) mesh_error("malformed mesh file: bad cell vertex count");
    c.resize(k);
    for (auto& v : c) v = read_value<Index>(in, "cell vertex index");
  }

  std::vector<TaggedEdge> fractures;
  std::vector<TaggedEdge> boundary;
  std::string word;
  while (in >> word) {
    std::vector<TaggedEdge>* target = nullptr;
    if (word == "fracture_faces") {
      target = &fractures;
    } else if (word == "boundary_tags") {
      target = &boundary;
    } else {
      mesh_error("malformed mesh file: unexpected block '" + word + "'");
    }
    const auto n = read_value<Index>(in, "block size");
    target->resize(n);
    for (auto& e : *target) {
      e.tag = read_value<int>(in, "tag");
      e.a = read_value<Index>(in, "edge vertex");
      e.b = read_value<Index>(in, "edge vertex");
    }
  }
  return Mesh(std::move(vertices), cells, boundary, std::move(fractures));
}

void expect_section_end(std::istream& in, const std::string& name) {
  std::string word;
  while (in >> word) {
    if (word == name) return;
  }
  mesh_error("malformed gmsh file: missing " + name);
}

std::optional<int> fracture_id_from_name(const std::string& name) {
  std::string n = name;
  std::erase(n, '"');
  for (const std::string prefix : {"fracture_", "fracture"}) {
    if (n.rfind(prefix, 0) == 0 && n.size() > prefix.size()) {
      try {
        std::size_t used = 0;
        const int id = std::stoi(n.substr(prefix.size()), &used);
        if (used == n.size() - prefix.size()) return id;
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

Mesh read_gmsh(std::istream& in) {
  std::map<int, std::string> physical_names;
  std::unordered_map<long, Index> node_index;
  std::vector<Point2> vertices;
  std::vector<std::vector<Index>> cells;
  std::vector<TaggedEdge> boundary;
  std::vector<TaggedEdge> fractures;
  bool have_nodes = false;
  bool have_elements = false;

  std::string word;
  while (in >> word) {
    if (word == "$MeshFormat") {
      const auto version = read_value<double>(in, "gmsh version");
      if (version < 2.0 || version >= 3.0) mesh_error("only gmsh v2 ASCII meshes are supported");
      if (read_value<int>(in, "file type") != 0) mesh_error("binary gmsh files are not supported");
      expect_section_end(in, "$EndMeshFormat");
    } else if (word == "$PhysicalNames") {
      const auto n = read_value<int>(in, "physical name count");
      for (int i = 0; i < n; ++i) {
        read_value<int>(in, "physical dimension");
        const auto tag = read_value<int>(in, "physical tag");
        std::string name;
        in >> std::ws;
        std::getline(in, name);
        while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
        physical_names[tag] = name;
      }
      expect_section_end(in, "$EndPhysicalNames");
    } else if (word == "$Nodes") {
      const auto n = read_value<Index>(in, "node count");
      vertices.reserve(n);
      for (Index i = 0; i < n; ++i) {
        const auto id = read_value<long>(in, "node id");
        const auto x = read_value<double>(in, "node x");
        const auto y = read_value<double>(in, "node y");
        read_value<double>(in, "node z");
        node_index[id] = vertices.size();
        vertices.push_back({x, y});
      }
      expect_section_end(in, "$EndNodes");
      have_nodes = true;
    } else if (word == "$Elements") {
      if (!have_nodes) mesh_error("malformed gmsh file: $Elements before $Nodes");
      const auto n = read_value<Index>(in, "element count");
      for (Index i = 0; i < n; ++i) {
        read_value<long>(in, "element id");
        const auto type = read_value<int>(in, "element type");
        const auto ntags = read_value<int>(in, "tag count");
        std::vector<int> tags(static_cast<std::size_t>(std::max(ntags, 0)));
        for (auto& t : tags) t = read_value<int>(in, "element tag");
        int nodes = 0;
        switch (type) {
          case 1: nodes = 2; break;
          case 2: nodes = 3; break;
          case 3: nodes = 4; break;
          case 15: nodes = 1; break;
          default: mesh_error("unsupported gmsh element type " + std::to_string(type));
        }
        std::vector<Index> ids;
        for (int k = 0; k < nodes; ++k) {
          const auto id = read_value<long>(in, "element node");
          const auto it = node_index.find(id);
          if (it == node_index.end()) mesh_error("gmsh element references unknown node");
          ids.push_back(it->second);
        }
        const int physical = tags.empty() ? 0 : tags[0];
        if (type == 2 || type == 3) {
          cells.push_back(std::move(ids));
        } else if (type == 1 && physical != 0) {
          const auto name = physical_names.find(physical);
          const auto fid = name == physical_names.end() ? std::nullopt
                                                        : fracture_id_from_name(name->second);
          if (fid) {
            fractures.push_back({*fid, ids[0], ids[1]});
          } else {
            boundary.push_back({physical, ids[0], ids[1]});
          }
        }
      }
      expect_section_end(in, "$EndElements");
      have_elements = true;
    }
  }
  if (!have_nodes || !have_elements) mesh_error("malformed gmsh file: missing nodes or elements");

  // Physical lines that turn out to be interior are not boundary tags.
  Mesh probe(vertices, cells);
  std::vector<TaggedEdge> on_boundary;
  std::unordered_map<std::uint64_t, Index> face_of_edge;
  for (Index f = 0; f < probe.num_faces(); ++f) {
    const auto& v = probe.face(f).vertices;
    face_of_edge.emplace(edge_key(v[0], v[1], vertices.size()), f);
  }
  for (const TaggedEdge& t : boundary) {
    const auto it = face_of_edge.find(edge_key(t.a, t.b, vertices.size()));
    if (it == face_of_edge.end()) mesh_error("gmsh line element is not a mesh edge");
    if (probe.face(it->second).is_boundary()) on_boundary.push_back(t);
  }
  return Mesh(std::move(vertices), cells, on_boundary, std::move(fractures));
}

Mesh read_mesh(std::istream& in) {
  in >> std::ws;
  const int first = in.peek();
  if (first == '$') return read_gmsh(in);
  return read_native(in);
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point2> vertices = mesh.vertices();
  std::vector<Index> midpoint(mesh.num_faces());
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const auto s = mesh.face_segment(f);
    midpoint[f] = vertices.size();
    vertices.push_back(0.5 * (s.a + s.b));
  }
  std::vector<std::vector<Index>> cells;
  cells.reserve(4 * mesh.num_cells());
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto v = mesh.cell_vertices(c);
    const auto f = mesh.cell_faces(c);
    if (v.size() == 3) {
      // Face k joins v[k] and v[k+1].
      cells.push_back({v[0], midpoint[f[0]], midpoint[f[2]]});
      cells.push_back({v[1], midpoint[f[1]], midpoint[f[0]]});
      cells.push_back({v[2], midpoint[f[2]], midpoint[f[1]]});
      cells.push_back({midpoint[f[0]], midpoint[f[1]], midpoint[f[2]]});
    } else if (v.size() == 4) {
      const Index center = vertices.size();
      vertices.push_back(0.25 * (vertices[v[0]] + vertices[v[1]] + vertices[v[2]] + vertices[v[3]]));
      for (Index k = 0; k < 4; ++k) {
        cells.push_back({v[k], midpoint[f[k]], center, midpoint[f[(k + 3) % 4]]});
      }
    } else {
      mesh_error("uniform refinement supports triangles and quadrilaterals only");
    }
  }
  std::vector<TaggedEdge> tags;
  std::vector<TaggedEdge> fractures;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    if (face.boundary_tag != 0) {
      tags.push_back({face.boundary_tag, face.vertices[0], midpoint[f]});
      tags.push_back({face.boundary_tag, midpoint[f], face.vertices[1]});
    }
  }
  const Index nv = mesh.num_vertices();
  std::unordered_map<std::uint64_t, Index> face_of_edge;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const auto& ends = mesh.face(f).vertices;
    face_of_edge.emplace(edge_key(ends[0], ends[1], nv), f);
  }
  for (const TaggedEdge& e : mesh.fracture_edges()) {
    const Index f = face_of_edge.at(edge_key(e.a, e.b, nv));
    fractures.push_back({e.tag, e.a, midpoint[f]});
    fractures.push_back({e.tag, midpoint[f], e.b});
  }
  return Mesh(std::move(vertices), cells, tags, std::move(fractures));
}

Mesh without_boundary_tags(const Mesh& mesh) {
  std::vector<std::vector<Index>> cells;
  cells.reserve(mesh.num_cells());
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto ids = mesh.cell_vertices(c);
    cells.emplace_back(ids.begin(), ids.end());
  }
  return Mesh(mesh.vertices(), cells, {}, mesh.fracture_edges());
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open mesh file " + path.string());
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  const auto old_precision = out.precision(17);
  out << "fvmesh 1\n";
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const Point2& p : mesh.vertices()) out << p.x << ' ' << p.y << '\n';
  out << "cells " << mesh.num_cells() << '\n';
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto ids = mesh.cell_vertices(c);
    out << ids.size();
    for (Index v : ids) out << ' ' << v;
    out << '\n';
  }
  out << "fracture_faces " << mesh.fracture_edges().size() << '\n';
  for (const TaggedEdge& e : mesh.fracture_edges()) out << e.tag << ' ' << e.a << ' ' << e.b << '\n';
  std::vector<TaggedEdge> tags;
  for (const Face& f : mesh.faces()) {
    if (f.boundary_tag != 0) tags.push_back({f.boundary_tag, f.vertices[0], f.vertices[1]});
  }
  out << "boundary_tags " << tags.size() << '\n';
  for (const TaggedEdge& e : tags) out << e.tag << ' ' << e.a << ' ' << e.b << '\n';
  out.precision(old_precision);
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write mesh file " + path.string());
  write_mesh(out, mesh);
}

// ---------------------------------------------------------------------------
// Fracture tagging

FractureFaceTagging tag_fracture_faces(const Mesh& mesh, std::span<const Segment2> fractures) {
  const double tol = 1e2 * mesh.tolerance();
  FractureFaceTagging tagging;
  tagging.faces.resize(fractures.size());
  tagging.covered_length.assign(fractures.size(), 0.0);
  std::ostringstream problems;
  problems.precision(10);

  for (std::size_t k = 0; k < fractures.size(); ++k) {
    const Segment2& frac = fractures[k];
    const double len = frac.length();
    std::vector<std::pair<double, double>> intervals;  // parameter ranges along the fracture
    std::vector<std::pair<double, Index>> hits;
    for (Index f = 0; f < mesh.num_faces(); ++f) {
      const Segment2 s = mesh.face_segment(f);
      if (geometry::distance_to_segment(s.a, frac) > tol) continue;
      if (geometry::distance_to_segment(s.b, frac) > tol) continue;
      const double ta = geometry::project_parameter(s.a, frac);
      const double tb = geometry::project_parameter(s.b, frac);
      hits.emplace_back(0.5 * (ta + tb), f);
      intervals.emplace_back(std::min(ta, tb), std::max(ta, tb));
    }
    std::sort(hits.begin(), hits.end());
    for (const auto& [t, f] : hits) {
      tagging.faces[k].push_back(f);
      tagging.covered_length[k] += mesh.face_geometry(f).area;
    }
    std::sort(intervals.begin(), intervals.end());
    double reached = 0.0;
    const double ptol = tol / len;
    for (const auto& [lo, hi] : intervals) {
      if (lo > reached + ptol) {
        problems << " fracture " << k << " uncovered on [" << reached * len << ", " << lo * len
                 << "];";
      }
      reached = std::max(reached, hi);
    }
    if (reached < 1.0 - ptol) {
      problems << " fracture " << k << " uncovered on [" << reached * len << ", " << len << "];";
    }
  }
  const std::string p = problems.str();
  if (!p.empty()) mesh_error("mesh does not conform to the fracture network:" + p);
  return tagging;
}

FractureFaceTagging file_fracture_tagging(const Mesh& mesh) {
  FractureFaceTagging tagging;
  std::unordered_map<std::uint64_t, Index> face_of_edge;
  const Index nv = mesh.num_vertices();
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const auto& v = mesh.face(f).vertices;
    face_of_edge.emplace(edge_key(v[0], v[1], nv), f);
  }
  for (const TaggedEdge& e : mesh.fracture_edges()) {
    const auto id = static_cast<std::size_t>(e.tag);
    if (id >= tagging.faces.size()) {
      tagging.faces.resize(id + 1);
      tagging.covered_length.resize(id + 1, 0.0);
    }
    const Index f = face_of_edge.at(edge_key(e.a, e.b, nv));
    tagging.faces[id].push_back(f);
    tagging.covered_length[id] += mesh.face_geometry(f).area;
  }
  return tagging;
}

}  // namespace frackbench::mesh
