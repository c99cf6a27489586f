#pragma once

// Conforming cell-centered discrete fracture-matrix scheme. Fractures are mesh faces;
// each tagged face carries one fracture cell of volume length x aperture, coupled to the
// matrix cells on both sides through hybrid faces displaced by half an aperture.

#include "frackbench/flow.hpp"

#include <memory>
#include <span>
#include <vector>

namespace frackbench::ccdfm {

using flow::Index;
using flow::Point2;
using flow::Segment2;
using flow::Tensor2;

enum class IntersectionMode {
  eliminate,          ///< star-delta elimination of intersection cells
  keep_intersections  ///< intersection cells retained as unknowns
};

/// Permeability assigned to a retained intersection cell.
enum class IntersectionPermeability {
  harmonic,  ///< harmonic mean of the tangential permeabilities meeting there
  branch     ///< each branch uses its own tangential permeability
};

struct Options {
  IntersectionMode mode = IntersectionMode::eliminate;
  IntersectionPermeability intersection_permeability = IntersectionPermeability::harmonic;
  flow::SolveSettings settings;
};

/// Matrix-side half transmissibility to a hybrid face shifted by half the aperture into
/// the matrix cell, combined harmonically with the fracture normal half transmissibility
/// A k_n / (aperture/2). `normal_out` points out of the matrix cell, `d` runs from the
/// cell center to the face centroid. Throws if the aperture is too large for the cell.
double matrix_fracture_transmissibility(double area, Point2 normal_out, const Tensor2& k,
                                        Point2 d, double aperture, double k_n);

/// Half transmissibility of a fracture cell along the fracture: aperture k_t / (length/2).
double fracture_half_transmissibility(double length, double aperture, double k_t);

/// TPFA coupling of two consecutive fracture cells.
double fracture_fracture_transmissibility(double length_a, double aperture_a, double k_t_a,
                                          double length_b, double aperture_b, double k_t_b);

/// Pairwise transmissibilities alpha_i alpha_j / sum(alpha) replacing a sourceless
/// intersection with branch half transmissibilities `alpha`. Indices are positions in
/// `alpha`, ordered (0,1), (0,2), ..., (n-2,n-1).
std::vector<flow::Transmissibility> star_delta_eliminate(std::span<const double> alpha);

flow::SolutionField assemble_and_solve(const scenario::Scenario& scenario,
                                       std::shared_ptr<const mesh::Mesh> mesh,
                                       const Options& options = {});

/// Builds the transmissibility graph without solving (fields other than pressures set).
flow::SolutionField assemble(const scenario::Scenario& scenario,
                             std::shared_ptr<const mesh::Mesh> mesh, const Options& options = {});

}  // namespace frackbench::ccdfm
