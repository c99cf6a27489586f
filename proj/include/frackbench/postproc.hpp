#pragma once

// Error norms against a reference, line sampling and report writers.

#include "frackbench/flow.hpp"
#include "frackbench/reference.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frackbench::postproc {

using flow::Index;
using flow::Point2;
using flow::Segment2;

/// Read-only view of a piecewise-constant field: matrix cells plus optional hybrid
/// fracture cells.
struct FieldView {
  const mesh::Mesh* mesh = nullptr;
  std::span<const double> matrix;
  std::span<const flow::FractureCell> fracture_cells;
  std::span<const double> fracture;
};

FieldView view(const flow::SolutionField& field);
FieldView view(const reference::ReferenceField& field);

/// Bucket grid over the cells of a mesh for point and box queries.
class CellLocator {
 public:
  explicit CellLocator(const mesh::Mesh& mesh);
  /// Cell containing p (boundary points count as inside), if any.
  [[nodiscard]] std::optional<Index> locate(Point2 p) const;
  /// Cells whose bounding boxes meet the given box.
  void candidates(Point2 lo, Point2 hi, std::vector<Index>& out) const;

 private:
  struct Box {
    Point2 lo, hi;
  };
  [[nodiscard]] std::pair<Index, Index> bucket(Point2 p) const;

  const mesh::Mesh* mesh_;
  std::vector<Box> boxes_;
  Point2 origin_;
  double dx_ = 1.0;
  double dy_ = 1.0;
  Index nx_ = 1;
  Index ny_ = 1;
  std::vector<std::vector<Index>> buckets_;
  mutable std::vector<Index> stamp_;
  mutable Index generation_ = 0;
};

struct ErrorReport {
  double err_m = 0.0;
  double err_f = 0.0;
  double dp_ref = 0.0;
  double domain_area = 0.0;    ///< |Omega|
  double fracture_length = 0.0;  ///< |gamma|, the summed fracture overlap measure
  double overlap_area = 0.0;   ///< summed area of all reference/solution cell overlaps
  std::vector<double> per_fracture;
  bool has_fracture_error = false;
};

/// Normalized L2 errors of a solution against a reference. For an equi-dimensional
/// reference, reference cells centred in a fracture's aperture band are compared with
/// the solution's fracture cells (weighted by overlap area over aperture) and left out
/// of the matrix error. A hybrid reference is compared fracture cell to fracture cell by
/// overlap length along the fracture.
ErrorReport compute_errors(const flow::SolutionField& solution,
                           const reference::ReferenceField& reference,
                           const scenario::FractureNetwork& network);
ErrorReport compute_errors(const FieldView& solution, const FieldView& reference,
                           const scenario::FractureNetwork& network);

/// sqrt(sum over cell overlaps of area * (a - b)^2), matrix cells only.
double l2_difference(const FieldView& a, const FieldView& b);

struct LineSample {
  Segment2 line;
  std::vector<double> arc_length;
  std::vector<double> value;  ///< NaN marks a point outside the domain
};

/// Values at n equally spaced points of the line. Points inside a fracture's aperture
/// band take the fracture-cell value.
LineSample sample_line(const FieldView& field, const Segment2& line, Index n = 1000);

void write_line_csv(std::ostream& out, const LineSample& sample);

struct SummaryRow {
  std::string method;
  std::optional<double> err_m;
  std::optional<double> err_f;
  double nnz_density = 0.0;
  double cond2 = 0.0;
  Index dofs = 0;
};

SummaryRow summarize(const flow::SolutionField& field, const std::optional<ErrorReport>& errors);
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const SummaryRow& row);

/// Legacy ASCII VTK of the matrix cells with a cell-data pressure array.
void write_vtk_cells(std::ostream& out, const FieldView& field, const std::string& title);
/// Legacy ASCII VTK of fracture cells as line cells with pressure.
void write_vtk_fractures(std::ostream& out, const FieldView& field, const std::string& title);

}  // namespace frackbench::postproc
