#include "frackbench/edfm.hpp"

#include "frackbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frackbench::edfm {

namespace {

[[noreturn]] void scenario_error(const std::string& msg) { throw Error(ErrorCode::scenario, msg); }

struct Bounds {
  double xmin, ymin, xmax, ymax;
};

Bounds bounds_of(std::span<const Point2> pts) {
  Bounds b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& p : pts) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  return b;
}

}  // namespace

Embedding embed_network(const mesh::Mesh& mesh, const scenario::FractureNetwork& network) {
  Embedding out;
  out.by_fracture.resize(network.size());
  const double tol = 1e2 * mesh.tolerance();
  const double diagonal = mesh.tolerance() / 1e-9;
  const double min_length = 1e-6 * diagonal;

  std::vector<Bounds> cell_bounds;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto pts = mesh.cell_points(c);
    cell_bounds.push_back(bounds_of(pts));
  }

  for (Index k = 0; k < network.size(); ++k) {
    const auto& frac = network[k];
    const Segment2& line = frac.geometry;
    const Point2 ends[2] = {line.a, line.b};
    const Bounds fb = bounds_of(ends);

    for (Index f = 0; f < mesh.num_faces(); ++f) {
      const auto hit = geometry::intersect_segments(line, mesh.face_segment(f), tol);
      if (hit.kind == geometry::IntersectionKind::collinear_overlap) {
        std::ostringstream msg;
        msg << "fracture " << k << " overlaps a cell edge near (" << hit.point.x << ", "
            << hit.point.y << ")";
        scenario_error(msg.str());
      }
    }

    struct Piece {
      double t0, t1;
      Index host;
    };
    std::vector<Piece> pieces;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
      const auto& b = cell_bounds[c];
      if (b.xmax < fb.xmin - tol || b.xmin > fb.xmax + tol || b.ymax < fb.ymin - tol ||
          b.ymin > fb.ymax + tol) {
        continue;
      }
      const auto clipped = geometry::clip_segment_to_polygon(line, mesh.cell_polygon(c), tol);
      if (!clipped) continue;
      double t0 = geometry::project_parameter(clipped->a, line);
      double t1 = geometry::project_parameter(clipped->b, line);
      if (t0 > t1) std::swap(t0, t1);
      pieces.push_back({t0, t1, c});
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& a, const Piece& b) { return a.t0 + a.t1 < b.t0 + b.t1; });

    // Absorb fragments below the length threshold into a neighbour.
    const double len = line.length();
    for (Index i = 0; i < pieces.size();) {
      if ((pieces[i].t1 - pieces[i].t0) * len >= min_length || pieces.size() == 1) {
        ++i;
        continue;
      }
      if (i + 1 < pieces.size()) {
        pieces[i + 1].t0 = std::min(pieces[i + 1].t0, pieces[i].t0);
      } else {
        pieces[i - 1].t1 = std::max(pieces[i - 1].t1, pieces[i].t1);
      }
      pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(i));
      ++out.merged_fragments;
    }

    for (const auto& p : pieces) {
      out.by_fracture[k].push_back(out.cells.size());
      out.cells.push_back({k, p.host, {line.at(p.t0), line.at(p.t1)}, frac.aperture, frac.k_n,
                           frac.k_t});
    }
  }

  // Crossings between distinct fractures.
  for (Index a = 0; a < network.size(); ++a) {
    for (Index b = a + 1; b < network.size(); ++b) {
      const auto hit = geometry::intersect_segments(network[a].geometry, network[b].geometry, tol);
      if (hit.kind == geometry::IntersectionKind::none) continue;
      if (hit.kind == geometry::IntersectionKind::collinear_overlap) {
        scenario_error("fractures " + std::to_string(a) + " and " + std::to_string(b) +
                       " overlap along a segment");
      }
      const auto host_fragment = [&](Index k) {
        Index best = out.by_fracture[k].front();
        double best_dist = std::numeric_limits<double>::infinity();
        for (Index i : out.by_fracture[k]) {
          const double d = geometry::distance_to_segment(hit.point, out.cells[i].segment);
          if (d < best_dist) {
            best_dist = d;
            best = i;
          }
        }
        return best;
      };
      out.crossings.push_back({hit.point, host_fragment(a), host_fragment(b)});
    }
  }
  return out;
}

double matrix_fracture_T(const geometry::ConvexPolygon& cell, const EmbeddedFractureCell& frag,
                         const Tensor2& k) {
  const double d = geometry::mean_distance_cell_to_segment(cell, frag.segment);
  if (!(d > 0.0)) throw Error(ErrorCode::solver, "vanishing matrix-fracture distance");
  const Point2 n = frag.segment.normal();
  return frag.length() * k.bilinear(n, n) / d;
}

double intersection_half_T(const EmbeddedFractureCell& frag, Point2 crossing) {
  const double length = frag.length();
  const double a = geometry::distance(frag.segment.a, crossing);
  const double b = geometry::distance(frag.segment.b, crossing);
  // Mean of |x - crossing| along the fragment, for a crossing inside it.
  const double d = (a * a + b * b) / (2.0 * length);
  if (!(d > 0.0)) throw Error(ErrorCode::solver, "crossing at a degenerate fragment");
  return frag.k_t * frag.aperture / d;
}

flow::SolutionField assemble(const scenario::Scenario& scenario,
                             std::shared_ptr<const mesh::Mesh> mesh_ptr, const Options&) {
  if (!mesh_ptr) throw Error(ErrorCode::solver, "no mesh given");
  const mesh::Mesh& mesh = *mesh_ptr;
  flow::SolutionField field;
  field.method = "edfm";
  field.scenario_name = scenario.name;
  field.mesh = mesh_ptr;
  auto& graph = field.graph;
  graph.set_source_density(scenario.source);

  const flow::BoundaryResolver boundary(scenario, mesh);
  std::vector<Tensor2> cell_k;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    graph.add_dof({flow::EntityKind::matrix_cell, c}, mesh.cell_area(c));
    cell_k.push_back(scenario.permeability_at(mesh.cell_centroid(c)));
  }
  flow::add_matrix_tpfa(graph, mesh, scenario, boundary, {}, cell_k);

  const auto embedding = embed_network(mesh, scenario.network);
  std::vector<Index> dof;
  for (Index i = 0; i < embedding.cells.size(); ++i) {
    const auto& frag = embedding.cells[i];
    field.fracture_cells.push_back({frag.fracture, frag.segment, frag.aperture, frag.host});
    dof.push_back(graph.add_dof({flow::EntityKind::fracture_cell, i}, frag.length() * frag.aperture));
    graph.connect(frag.host, dof.back(),
                  matrix_fracture_T(mesh.cell_polygon(frag.host), frag, cell_k[frag.host]));
  }

  const auto half = [&](Index i) {
    const auto& frag = embedding.cells[i];
    return frag.aperture * frag.k_t / (0.5 * frag.length());
  };
  for (Index k = 0; k < embedding.by_fracture.size(); ++k) {
    const auto& chain = embedding.by_fracture[k];
    for (Index j = 0; j + 1 < chain.size(); ++j) {
      graph.connect(dof[chain[j]], dof[chain[j + 1]], flow::harmonic(half(chain[j]), half(chain[j + 1])));
    }
    if (chain.empty()) continue;
    // Fracture ends on the domain boundary take the boundary condition there.
    for (const auto& [i, end] : {std::pair{chain.front(), embedding.cells[chain.front()].segment.a},
                                 std::pair{chain.back(), embedding.cells[chain.back()].segment.b}}) {
      const auto* bc = boundary.point_condition(end);
      if (bc == nullptr) continue;
      if (bc->kind == scenario::BcKind::dirichlet) {
        graph.add_dirichlet(dof[i], half(i), bc->value_at(end));
      } else {
        graph.add_boundary_flux(dof[i], bc->value_at(end) * embedding.cells[i].aperture);
      }
    }
  }

  for (const auto& x : embedding.crossings) {
    const double ta = intersection_half_T(embedding.cells[x.fragment_a], x.point);
    const double tb = intersection_half_T(embedding.cells[x.fragment_b], x.point);
    graph.connect(dof[x.fragment_a], dof[x.fragment_b], flow::harmonic(ta, tb));
  }
  return field;
}

flow::SolutionField assemble_and_solve(const scenario::Scenario& scenario,
                                       std::shared_ptr<const mesh::Mesh> mesh,
                                       const Options& options) {
  auto field = assemble(scenario, std::move(mesh), options);
  flow::solve_into(field, options.settings);
  return field;
}

}  // namespace frackbench::edfm
