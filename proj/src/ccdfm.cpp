#include "frackbench/ccdfm.hpp"

#include "frackbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace frackbench::ccdfm {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::solver, msg); }

constexpr Index none = mesh::no_cell;

}  // namespace

double matrix_fracture_transmissibility(double area, Point2 normal_out, const Tensor2& k,
                                        Point2 d, double aperture, double k_n) {
  const double normal_distance = geometry::dot(d, normal_out);
  if (aperture >= 2.0 * normal_distance) {
    std::ostringstream msg;
    msg << "aperture " << aperture << " too large for a cell whose center lies "
        << normal_distance << " from the fracture";
    fail(msg.str());
  }
  const Point2 shifted = d - (0.5 * aperture) * normal_out;
  const double alpha_m = flow::half_transmissibility(area, normal_out, k, shifted);
  const double alpha_f = area * k_n / (0.5 * aperture);
  return flow::harmonic(alpha_m, alpha_f);
}

double fracture_half_transmissibility(double length, double aperture, double k_t) {
  return aperture * k_t / (0.5 * length);
}

double fracture_fracture_transmissibility(double length_a, double aperture_a, double k_t_a,
                                          double length_b, double aperture_b, double k_t_b) {
  return flow::harmonic(fracture_half_transmissibility(length_a, aperture_a, k_t_a),
                        fracture_half_transmissibility(length_b, aperture_b, k_t_b));
}

std::vector<flow::Transmissibility> star_delta_eliminate(std::span<const double> alpha) {
  if (alpha.size() < 2) fail("star-delta elimination needs at least two branches");
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0)) fail("star-delta elimination needs positive half transmissibilities");
    sum += a;
  }
  std::vector<flow::Transmissibility> out;
  for (Index i = 0; i < alpha.size(); ++i) {
    for (Index j = i + 1; j < alpha.size(); ++j) out.push_back({i, j, alpha[i] * alpha[j] / sum});
  }
  return out;
}

flow::SolutionField assemble(const scenario::Scenario& scenario,
                             std::shared_ptr<const mesh::Mesh> mesh_ptr, const Options& options) {
  if (!mesh_ptr) fail("no mesh given");
  const mesh::Mesh& mesh = *mesh_ptr;
  flow::SolutionField field;
  field.method = options.mode == IntersectionMode::eliminate ? "ccdfm" : "ccdfm_star";
  field.scenario_name = scenario.name;
  field.mesh = mesh_ptr;
  auto& graph = field.graph;
  graph.set_source_density(scenario.source);

  const flow::BoundaryResolver boundary(scenario, mesh);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    graph.add_dof({flow::EntityKind::matrix_cell, c}, mesh.cell_area(c));
  }

  // Fracture cells, one per tagged face.
  const auto& network = scenario.network;
  std::vector<Index> face_fracture_cell(mesh.num_faces(), none);
  std::vector<Index> fracture_dof;
  if (!network.empty()) {
    const auto segments = network.segments();
    const auto tagging = mesh::tag_fracture_faces(mesh, segments);
    for (Index k = 0; k < network.size(); ++k) {
      const auto& frac = network[k];
      for (Index f : tagging.faces[k]) {
        if (face_fracture_cell[f] != none) {
          fail("face " + std::to_string(f) + " lies on more than one fracture");
        }
        if (mesh.face(f).is_boundary()) {
          fail("fracture " + std::to_string(k) + " runs along the domain boundary");
        }
        Segment2 s = mesh.face_segment(f);
        if (geometry::dot(s.b - s.a, frac.geometry.b - frac.geometry.a) < 0.0) std::swap(s.a, s.b);
        face_fracture_cell[f] = field.fracture_cells.size();
        field.fracture_cells.push_back({k, s, frac.aperture, f});
        fracture_dof.push_back(graph.add_dof(
            {flow::EntityKind::fracture_cell, field.fracture_cells.size() - 1},
            s.length() * frac.aperture));
      }
    }
  }

  std::vector<Tensor2> cell_k;
  cell_k.reserve(mesh.num_cells());
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    cell_k.push_back(scenario.permeability_at(mesh.cell_centroid(c)));
  }
  auto skip = std::make_unique<bool[]>(mesh.num_faces());
  for (Index f = 0; f < mesh.num_faces(); ++f) skip[f] = face_fracture_cell[f] != none;
  flow::add_matrix_tpfa(graph, mesh, scenario, boundary,
                        std::span<const bool>(skip.get(), mesh.num_faces()), cell_k);

  // Matrix-fracture couplings through the hybrid faces.
  for (Index fc = 0; fc < field.fracture_cells.size(); ++fc) {
    const auto& cell = field.fracture_cells[fc];
    const Index f = cell.mesh_entity;
    const auto& frac = network[cell.fracture];
    const auto& geo = mesh.face_geometry(f);
    for (Index c : {mesh.face(f).left, mesh.face(f).right}) {
      double t = 0.0;
      try {
        t = matrix_fracture_transmissibility(geo.area, mesh.outward_normal(c, f), cell_k[c],
                                             mesh.center_to_face(c, f), frac.aperture, frac.k_n);
      } catch (const Error& e) {
        fail(std::string(e.what()) + " (cell " + std::to_string(c) + ", face " + std::to_string(f) +
             ")");
      }
      graph.connect(c, fracture_dof[fc], t);
    }
  }

  // Fracture-fracture couplings, grouped by shared vertex.
  std::map<Index, std::vector<Index>> at_vertex;
  for (Index fc = 0; fc < field.fracture_cells.size(); ++fc) {
    for (Index v : mesh.face(field.fracture_cells[fc].mesh_entity).vertices) at_vertex[v].push_back(fc);
  }
  const auto half = [&](Index fc) {
    const auto& cell = field.fracture_cells[fc];
    return fracture_half_transmissibility(cell.segment.length(), cell.aperture,
                                          network[cell.fracture].k_t);
  };
  for (const auto& [v, cells] : at_vertex) {
    std::set<Index> fractures;
    for (Index fc : cells) fractures.insert(field.fracture_cells[fc].fracture);
    const Point2 x = mesh.vertices()[v];

    if (fractures.size() >= 2) {
      std::vector<double> alpha;
      for (Index fc : cells) alpha.push_back(half(fc));
      if (options.mode == IntersectionMode::eliminate) {
        for (const auto& t : star_delta_eliminate(alpha)) {
          graph.connect(fracture_dof[cells[t.i]], fracture_dof[cells[t.j]], t.value);
        }
      } else {
        double aperture_sum = 0.0;
        double inverse_k_sum = 0.0;
        for (Index fc : cells) {
          aperture_sum += field.fracture_cells[fc].aperture;
          inverse_k_sum += 1.0 / network[field.fracture_cells[fc].fracture].k_t;
        }
        const double n = static_cast<double>(cells.size());
        const double size = aperture_sum / n;
        const double k_harmonic = n / inverse_k_sum;
        field.intersection_points.push_back(x);
        const Index dof = graph.add_dof(
            {flow::EntityKind::intersection_cell, field.intersection_points.size() - 1},
            size * size);
        for (Index k = 0; k < cells.size(); ++k) {
          const auto& cell = field.fracture_cells[cells[k]];
          const double k_int =
              options.intersection_permeability == IntersectionPermeability::harmonic
                  ? k_harmonic
                  : network[cell.fracture].k_t;
          const double alpha_int = cell.aperture * k_int / (0.5 * size);
          graph.connect(fracture_dof[cells[k]], dof, flow::harmonic(alpha[k], alpha_int));
        }
      }
    } else if (cells.size() == 2) {
      graph.connect(fracture_dof[cells[0]], fracture_dof[cells[1]],
                    flow::harmonic(half(cells[0]), half(cells[1])));
    }

    // Fracture cells ending on the domain boundary feel the boundary condition directly.
    if (cells.size() == 1 || fractures.size() >= 2) {
      const auto* bc = boundary.point_condition(x);
      if (bc == nullptr) continue;
      for (Index fc : cells) {
        if (bc->kind == scenario::BcKind::dirichlet) {
          graph.add_dirichlet(fracture_dof[fc], half(fc), bc->value_at(x));
        } else {
          graph.add_boundary_flux(fracture_dof[fc], bc->value_at(x) * field.fracture_cells[fc].aperture);
        }
      }
    }
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

}  // namespace frackbench::ccdfm
