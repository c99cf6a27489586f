#include "frackbench/flow.hpp"

#include "frackbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frackbench::flow {

double half_transmissibility(double area, Point2 normal, const Tensor2& k, Point2 d) {
  const double alpha = area * k.bilinear(normal, d) / geometry::dot(d, d);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    std::ostringstream msg;
    msg << "non-positive half transmissibility " << alpha;
    throw Error(ErrorCode::solver, msg.str());
  }
  return alpha;
}

double harmonic(double a, double b) { return a * b / (a + b); }

// ---------------------------------------------------------------------------

Index TransmissibilityGraph::add_dof(Entity entity, double volume) {
  entities_.push_back(entity);
  volumes_.push_back(volume);
  return entities_.size() - 1;
}

void TransmissibilityGraph::connect(Index i, Index j, double t) {
  if (i == j || i >= size() || j >= size()) throw Error(ErrorCode::solver, "invalid connection");
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << "non-positive transmissibility " << t << " between unknowns " << i << " and " << j;
    throw Error(ErrorCode::solver, msg.str());
  }
  connections_.push_back({i, j, t});
}

void TransmissibilityGraph::add_dirichlet(Index dof, double t, double boundary_value) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::solver, "non-positive boundary transmissibility at unknown " + std::to_string(dof));
  }
  dirichlet_.push_back({dof, t, boundary_value});
}

void TransmissibilityGraph::add_boundary_flux(Index dof, double outflow) {
  if (outflow != 0.0) boundary_fluxes_.push_back({dof, outflow});
}

linalg::SparseSystem TransmissibilityGraph::assemble() const {
  const Index n = size();
  linalg::TripletBuilder builder(n);
  for (const auto& c : connections_) builder.add_connection(c.i, c.j, c.value);
  std::vector<double> rhs(n, 0.0);
  for (Index i = 0; i < n; ++i) rhs[i] = source_density_ * volumes_[i];
  for (const auto& d : dirichlet_) {
    builder.add(d.dof, d.dof, d.value);
    rhs[d.dof] += d.value * d.boundary_value;
  }
  for (const auto& b : boundary_fluxes_) rhs[b.dof] -= b.outflow;
  return {builder.build(), std::move(rhs), entities_};
}

std::vector<double> TransmissibilityGraph::connection_fluxes(std::span<const long double> p) const {
  std::vector<double> out;
  out.reserve(connections_.size());
  for (const auto& c : connections_) {
    out.push_back(static_cast<double>(c.value * (p[c.i] - p[c.j])));
  }
  return out;
}

std::vector<long double> TransmissibilityGraph::conservation_residuals(
    std::span<const long double> p) const {
  std::vector<long double> r(size(), 0.0L);
  for (const auto& c : connections_) {
    const long double flux = c.value * (p[c.i] - p[c.j]);
    r[c.i] += flux;
    r[c.j] -= flux;
  }
  for (const auto& d : dirichlet_) r[d.dof] += d.value * (p[d.dof] - d.boundary_value);
  for (const auto& b : boundary_fluxes_) r[b.dof] += b.outflow;
  for (Index i = 0; i < size(); ++i) r[i] -= static_cast<long double>(source_density_) * volumes_[i];
  return r;
}

double TransmissibilityGraph::max_abs_flux(std::span<const long double> p) const {
  long double m = 0.0L;
  for (const auto& c : connections_) m = std::max(m, std::abs(c.value * (p[c.i] - p[c.j])));
  for (const auto& d : dirichlet_) {
    m = std::max(m, std::abs(d.value * (p[d.dof] - d.boundary_value)));
  }
  for (const auto& b : boundary_fluxes_) m = std::max<long double>(m, std::abs(b.outflow));
  return static_cast<double>(m);
}

double TransmissibilityGraph::boundary_outflow(std::span<const long double> p) const {
  long double s = 0.0L;
  for (const auto& d : dirichlet_) s += d.value * (p[d.dof] - d.boundary_value);
  for (const auto& b : boundary_fluxes_) s += b.outflow;
  return static_cast<double>(s);
}

double TransmissibilityGraph::total_source() const {
  double s = 0.0;
  for (double v : volumes_) s += source_density_ * v;
  return s;
}

// ---------------------------------------------------------------------------

BoundaryResolver::BoundaryResolver(const scenario::Scenario& scenario, const mesh::Mesh& mesh)
    : scenario_(&scenario), mesh_(&mesh), face_bc_(mesh.num_faces(), nullptr) {
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    if (!face.is_boundary()) continue;
    boundary_faces_.push_back(f);
    int tag = face.boundary_tag;
    if (tag == 0) tag = scenario.domain_edge_tag(mesh.face_segment(f));
    const auto* bc = scenario.bc_for_tag(tag);
    if (bc == nullptr) {
      const Point2 c = mesh.face_geometry(f).centroid;
      std::ostringstream msg;
      msg << "boundary face at (" << c.x << ", " << c.y << ") with tag " << tag
          << " has no boundary condition";
      throw Error(ErrorCode::scenario, msg.str());
    }
    face_bc_[f] = bc;
  }
}

const scenario::BoundaryCondition& BoundaryResolver::face_condition(Index f) const {
  if (face_bc_[f] == nullptr) throw Error(ErrorCode::solver, "face is not a boundary face");
  return *face_bc_[f];
}

const scenario::BoundaryCondition* BoundaryResolver::point_condition(Point2 p) const {
  const double tol = 10.0 * mesh_->tolerance();
  const scenario::BoundaryCondition* found = nullptr;
  for (Index f : boundary_faces_) {
    if (geometry::distance_to_segment(p, mesh_->face_segment(f)) > tol) continue;
    const auto* bc = face_bc_[f];
    if (found == nullptr || bc->kind == scenario::BcKind::dirichlet) found = bc;
  }
  return found;
}

void add_matrix_tpfa(TransmissibilityGraph& graph, const mesh::Mesh& mesh,
                     const scenario::Scenario& scenario, const BoundaryResolver& boundary,
                     std::span<const bool> skip_face, std::span<const Tensor2> cell_permeability) {
  std::vector<Tensor2> k_local;
  if (cell_permeability.empty()) {
    k_local.reserve(mesh.num_cells());
    for (Index c = 0; c < mesh.num_cells(); ++c) {
      k_local.push_back(scenario.permeability_at(mesh.cell_centroid(c)));
    }
    cell_permeability = k_local;
  }
  const auto alpha = [&](Index c, Index f) {
    try {
      return half_transmissibility(mesh.face_geometry(f).area, mesh.outward_normal(c, f),
                                   cell_permeability[c], mesh.center_to_face(c, f));
    } catch (const Error& e) {
      throw Error(ErrorCode::solver, std::string(e.what()) + " at cell " + std::to_string(c) +
                                         ", face " + std::to_string(f));
    }
  };
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    if (!skip_face.empty() && skip_face[f]) continue;
    if (face.is_boundary()) {
      const auto& bc = boundary.face_condition(f);
      const Point2 centroid = mesh.face_geometry(f).centroid;
      if (bc.kind == scenario::BcKind::dirichlet) {
        graph.add_dirichlet(face.left, alpha(face.left, f), bc.value_at(centroid));
      } else {
        graph.add_boundary_flux(face.left, bc.value_at(centroid) * mesh.face_geometry(f).area);
      }
    } else {
      graph.connect(face.left, face.right, harmonic(alpha(face.left, f), alpha(face.right, f)));
    }
  }
}

// ---------------------------------------------------------------------------

double SolutionField::max_relative_conservation_residual() const {
  const auto r = graph.conservation_residuals(dof_pressure);
  double worst = 0.0;
  for (long double v : r) worst = std::max(worst, static_cast<double>(std::abs(v)));
  const double scale = graph.max_abs_flux(dof_pressure);
  return scale > 0.0 ? worst / scale : worst;
}

double SolutionField::relative_global_imbalance() const {
  const double out = graph.boundary_outflow(dof_pressure);
  const double src = graph.total_source();
  const double scale = std::max(std::abs(out), graph.max_abs_flux(dof_pressure));
  return scale > 0.0 ? std::abs(out - src) / scale : std::abs(out - src);
}

void solve_into(SolutionField& field, const SolveSettings& settings) {
  const auto system = field.graph.assemble();
  const auto residual = [&field](std::span<const long double> x, std::span<long double> r) {
    const auto c = field.graph.conservation_residuals(x);
    for (Index i = 0; i < c.size(); ++i) r[i] = -c[i];
  };
  field.dof_pressure =
      linalg::solve_extended(system, residual, settings.solve, &field.solve_report);
  if (settings.compute_stats) field.stats = linalg::matrix_stats(system.matrix, settings.stats);

  field.matrix_pressure.assign(field.mesh ? field.mesh->num_cells() : 0, 0.0);
  field.fracture_pressure.assign(field.fracture_cells.size(), 0.0);
  field.intersection_pressure.assign(field.intersection_points.size(), 0.0);
  const auto& entities = field.graph.entities();
  for (Index i = 0; i < entities.size(); ++i) {
    const double p = static_cast<double>(field.dof_pressure[i]);
    switch (entities[i].kind) {
      case EntityKind::matrix_cell: field.matrix_pressure.at(entities[i].index) = p; break;
      case EntityKind::fracture_cell: field.fracture_pressure.at(entities[i].index) = p; break;
      case EntityKind::intersection_cell:
        field.intersection_pressure.at(entities[i].index) = p;
        break;
    }
  }
}

}  // namespace frackbench::flow
