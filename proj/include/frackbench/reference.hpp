#pragma once

// Equi-dimensional reference: fractures resolved as strips of full-dimensional cells on a
// graded tensor grid, solved with two-point fluxes. Also the reference-field file format
// consumed by the error norms.

#include "frackbench/flow.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace frackbench::reference {

using flow::Index;
using flow::Point2;
using flow::Segment2;
using flow::Tensor2;

struct GridOptions {
  Index cells_across = 10;  ///< cells across each fracture aperture
  double grading = 1.3;     ///< growth ratio of cell sizes away from fracture walls
  double max_cell_size = 0.0;  ///< 0 selects 1/256 of the larger domain extent
  double max_aspect_ratio = 1e4;
};

/// Line coordinates of one axis: given breakpoints with their local cell size, fills each
/// gap with cells growing geometrically from both ends, capped at max_size.
std::vector<double> graded_lines(std::vector<std::pair<double, double>> breakpoints,
                                 double ratio, double max_size);

/// Tensor grid of an axis-aligned rectangular domain with grid lines on both walls and
/// both ends of every fracture strip. Throws Error(scenario) for slanted fractures or a
/// non-rectangular domain.
mesh::Mesh build_equidimensional_grid(const scenario::Scenario& scenario,
                                      const GridOptions& options = {});

/// Nested refinement halving every cell.
mesh::Mesh refine_tensor_grid(const mesh::Mesh& grid);

/// Cell permeabilities with fracture strips resolved: a cell whose centroid lies in the
/// strip of a fracture takes k_t along and k_n across it (harmonic mean where strips
/// overlap). `strip_of` receives the fracture index per cell or -1.
std::vector<Tensor2> strip_permeability(const scenario::Scenario& scenario, const mesh::Mesh& grid,
                                        std::vector<int>* strip_of = nullptr);

/// Pressure field on a reference mesh, optionally with hybrid fracture cells.
struct ReferenceField {
  std::shared_ptr<const mesh::Mesh> mesh;
  std::vector<double> cell_pressures;
  std::vector<flow::FractureCell> fracture_cells;
  std::vector<double> fracture_pressures;
  std::map<std::string, std::string> metadata;

  [[nodiscard]] bool is_hybrid() const noexcept { return !fracture_cells.empty(); }
  /// max - min over all reference values
  [[nodiscard]] double pressure_range() const;
};

flow::SolutionField solve_reference(const scenario::Scenario& scenario,
                                    std::shared_ptr<const mesh::Mesh> grid,
                                    const flow::SolveSettings& settings = {});

/// Reference field from any solution (hybrid solutions keep their fracture cells).
ReferenceField to_reference_field(const flow::SolutionField& solution);

void write_reference_field(std::ostream& out, const ReferenceField& field);
void write_reference_field(const std::filesystem::path& path, const ReferenceField& field);
/// Native mesh followed by `cell_pressures N` and optional `metadata` and
/// `fracture_cells` blocks.
ReferenceField read_reference_field(std::istream& in);
ReferenceField read_reference_field(const std::filesystem::path& path);

}  // namespace frackbench::reference
