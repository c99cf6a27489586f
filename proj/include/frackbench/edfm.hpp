#pragma once

// Embedded discrete fracture model: fractures are cut by the cells of a background grid
// into fragments, each an unknown coupled to its host cell, to its neighbours along the
// fracture and to fragments of crossing fractures.

#include "frackbench/flow.hpp"

#include <memory>
#include <vector>

namespace frackbench::edfm {

using flow::Index;
using flow::Point2;
using flow::Segment2;
using flow::Tensor2;

struct EmbeddedFractureCell {
  Index fracture = 0;
  Index host = 0;
  Segment2 segment;  ///< oriented along the fracture
  double aperture = 0.0;
  double k_n = 0.0;
  double k_t = 0.0;

  [[nodiscard]] double length() const { return segment.length(); }
};

struct FractureCrossing {
  Point2 point;
  Index fragment_a = 0;
  Index fragment_b = 0;
};

struct Embedding {
  std::vector<EmbeddedFractureCell> cells;  ///< grouped by fracture, ordered along it
  std::vector<std::vector<Index>> by_fracture;
  std::vector<FractureCrossing> crossings;
  Index merged_fragments = 0;  ///< short fragments absorbed into a neighbour
};

/// Splits every fracture into per-cell fragments and locates fracture crossings.
/// Throws Error(scenario) when a fracture overlaps a cell edge or another fracture
/// along a segment.
Embedding embed_network(const mesh::Mesh& mesh, const scenario::FractureNetwork& network);

/// A n^T K n / d, with A the fragment length, n its unit normal and d the mean distance
/// of the cell to the fragment's supporting line.
double matrix_fracture_T(const geometry::ConvexPolygon& cell, const EmbeddedFractureCell& frag,
                         const Tensor2& k);

/// k_t aperture / d, with d the mean distance from points of the fragment to the
/// crossing point (unit out-of-plane measure of the crossing).
double intersection_half_T(const EmbeddedFractureCell& frag, Point2 crossing);

struct Options {
  flow::SolveSettings settings;
};

flow::SolutionField assemble(const scenario::Scenario& scenario,
                             std::shared_ptr<const mesh::Mesh> mesh, const Options& options = {});

flow::SolutionField assemble_and_solve(const scenario::Scenario& scenario,
                                       std::shared_ptr<const mesh::Mesh> mesh,
                                       const Options& options = {});

}  // namespace frackbench::edfm
