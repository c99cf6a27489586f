#pragma once

// Two-point flux building blocks shared by the conforming, embedded and reference solvers:
// a transmissibility graph over unknowns, boundary-condition lookup on a mesh, and the
// solution container handed to post-processing.

#include "frackbench/linalg.hpp"
#include "frackbench/mesh.hpp"
#include "frackbench/scenario.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frackbench::flow {

using geometry::Point2;
using geometry::Segment2;
using linalg::Entity;
using linalg::EntityKind;
using linalg::Index;
using scenario::Tensor2;

/// Cell-face half transmissibility A n^T K d / (d^T d), with d from cell center to face
/// centroid and n the outward unit normal. Throws Error(solver) if not positive.
double half_transmissibility(double area, Point2 normal, const Tensor2& k, Point2 d);

/// Harmonic combination a*b/(a+b) of two half transmissibilities.
double harmonic(double a, double b);

/// Transmissibility between two unknowns; positive and symmetric.
struct Transmissibility {
  Index i = 0;
  Index j = 0;
  double value = 0.0;
};

/// Connection of an unknown to a prescribed boundary value.
struct DirichletLink {
  Index dof = 0;
  double value = 0.0;  ///< transmissibility
  double boundary_value = 0.0;
};

/// Prescribed flux leaving an unknown through the boundary (Neumann data).
struct BoundaryFlux {
  Index dof = 0;
  double outflow = 0.0;
};

class TransmissibilityGraph {
 public:
  Index add_dof(Entity entity, double volume);
  void connect(Index i, Index j, double t);
  void add_dirichlet(Index dof, double t, double boundary_value);
  void add_boundary_flux(Index dof, double outflow);
  /// Uniform volumetric source density applied to every unknown.
  void set_source_density(double q) { source_density_ = q; }

  [[nodiscard]] Index size() const noexcept { return entities_.size(); }
  [[nodiscard]] const std::vector<Entity>& entities() const noexcept { return entities_; }
  [[nodiscard]] const std::vector<double>& volumes() const noexcept { return volumes_; }
  [[nodiscard]] const std::vector<Transmissibility>& connections() const noexcept {
    return connections_;
  }
  [[nodiscard]] const std::vector<DirichletLink>& dirichlet() const noexcept { return dirichlet_; }
  [[nodiscard]] const std::vector<BoundaryFlux>& boundary_fluxes() const noexcept {
    return boundary_fluxes_;
  }

  /// Symmetric positive definite system with Dirichlet data eliminated into the rhs.
  [[nodiscard]] linalg::SparseSystem assemble() const;

  /// Flux through each connection, T (p_i - p_j), in connection order.
  [[nodiscard]] std::vector<double> connection_fluxes(std::span<const long double> p) const;
  /// Net outflow minus source per unknown; zero for an exactly conservative solution.
  /// Evaluated in long double, flux by flux.
  [[nodiscard]] std::vector<long double> conservation_residuals(std::span<const long double> p) const;
  /// Largest absolute flux over connections and boundary links.
  [[nodiscard]] double max_abs_flux(std::span<const long double> p) const;
  /// Total flux leaving through Dirichlet links and Neumann data (positive = out).
  [[nodiscard]] double boundary_outflow(std::span<const long double> p) const;
  [[nodiscard]] double total_source() const;

 private:
  std::vector<Entity> entities_;
  std::vector<double> volumes_;
  std::vector<Transmissibility> connections_;
  std::vector<DirichletLink> dirichlet_;
  std::vector<BoundaryFlux> boundary_fluxes_;
  double source_density_ = 0.0;
};

/// Boundary conditions of a scenario resolved onto the boundary faces of a mesh. Faces
/// with an explicit tag use it; untagged faces take the index of the domain edge they
/// lie on.
class BoundaryResolver {
 public:
  BoundaryResolver(const scenario::Scenario& scenario, const mesh::Mesh& mesh);

  /// Condition on boundary face f (throws if the face is not covered).
  [[nodiscard]] const scenario::BoundaryCondition& face_condition(Index f) const;
  /// Condition at a boundary point, preferring Dirichlet where faces of different kind
  /// meet. Empty if p is not on the boundary.
  [[nodiscard]] const scenario::BoundaryCondition* point_condition(Point2 p) const;

 private:
  const scenario::Scenario* scenario_;
  const mesh::Mesh* mesh_;
  std::vector<const scenario::BoundaryCondition*> face_bc_;
  std::vector<Index> boundary_faces_;
};

/// Adds matrix-matrix two-point connections across all interior faces not flagged in
/// `skip_face`, and boundary conditions on all boundary faces. Cell permeability is
/// taken at the cell centroid, or from `cell_permeability` when given.
void add_matrix_tpfa(TransmissibilityGraph& graph, const mesh::Mesh& mesh,
                     const scenario::Scenario& scenario, const BoundaryResolver& boundary,
                     std::span<const bool> skip_face = {},
                     std::span<const Tensor2> cell_permeability = {});

/// Lower-dimensional cell of a hybrid solution.
struct FractureCell {
  Index fracture = 0;
  Segment2 segment;
  double aperture = 0.0;
  Index mesh_entity = 0;  ///< tagged face (conforming) or host cell (embedded)
};

struct SolveSettings {
  linalg::SolveOptions solve;
  bool compute_stats = true;
  linalg::StatsOptions stats;
};

struct SolutionField {
  std::string method;
  std::string scenario_name;
  std::shared_ptr<const mesh::Mesh> mesh;
  std::vector<double> matrix_pressure;  ///< per mesh cell
  std::vector<FractureCell> fracture_cells;
  std::vector<double> fracture_pressure;  ///< per fracture cell
  std::vector<Point2> intersection_points;
  std::vector<double> intersection_pressure;

  TransmissibilityGraph graph;
  std::vector<long double> dof_pressure;  ///< per unknown, refined beyond double precision
  std::optional<linalg::MatrixStats> stats;
  linalg::SolveReport solve_report;

  [[nodiscard]] Index dofs() const noexcept { return dof_pressure.size(); }
  /// max_i |residual_i| / max |flux|
  [[nodiscard]] double max_relative_conservation_residual() const;
  /// |outflow - sources| / max(|outflow|, max|flux|)
  [[nodiscard]] double relative_global_imbalance() const;
};

/// Assembles and solves the graph, then scatters dof pressures into the field's matrix,
/// fracture and intersection arrays according to the entity map.
void solve_into(SolutionField& field, const SolveSettings& settings);

}  // namespace frackbench::flow
