#include "frackbench/postproc.hpp"

#include "frackbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace frackbench::postproc {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// Arc-length interval of a segment projected onto a fracture.
std::pair<double, double> interval_along(const Segment2& s, const Segment2& fracture) {
  const double len = fracture.length();
  double a = geometry::project_parameter(s.a, fracture) * len;
  double b = geometry::project_parameter(s.b, fracture) * len;
  if (a > b) std::swap(a, b);
  return {std::clamp(a, 0.0, len), std::clamp(b, 0.0, len)};
}

double overlap(std::pair<double, double> a, std::pair<double, double> b) {
  return std::max(0.0, std::min(a.second, b.second) - std::max(a.first, b.first));
}

bool in_band(Point2 p, const Segment2& centerline, double aperture) {
  const double t = geometry::project_parameter(p, centerline);
  return t >= 0.0 && t <= 1.0 && geometry::distance_to_line(p, centerline) < 0.5 * aperture;
}

std::pair<Point2, Point2> bounds(std::span<const Point2> pts) {
  Point2 lo = pts[0];
  Point2 hi = pts[0];
  for (const auto& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  return {lo, hi};
}

/// Calls fn(cell_a, cell_b, area) for every overlap of a cell of `a` with a cell of `b`.
template <typename Fn>
void for_each_overlap(const mesh::Mesh& a, const mesh::Mesh& b, Fn&& fn) {
  const CellLocator locator(a);
  std::vector<geometry::ConvexPolygon> polys;
  polys.reserve(a.num_cells());
  for (Index c = 0; c < a.num_cells(); ++c) polys.push_back(a.cell_polygon(c));
  std::vector<Index> found;
  for (Index cb = 0; cb < b.num_cells(); ++cb) {
    const auto pts = b.cell_points(cb);
    const auto [lo, hi] = bounds(pts);
    locator.candidates(lo, hi, found);
    for (Index ca : found) {
      const auto piece = geometry::clip_polygon(pts, polys[ca]);
      if (piece.size() < 3) continue;
      // Cells that merely touch leave rounding slivers behind.
      const double area = geometry::signed_area(piece);
      if (area > 1e-10 * std::min(a.cell_area(ca), b.cell_area(cb))) fn(ca, cb, area);
    }
  }
}

}  // namespace

FieldView view(const flow::SolutionField& field) {
  return {field.mesh.get(), field.matrix_pressure, field.fracture_cells, field.fracture_pressure};
}

FieldView view(const reference::ReferenceField& field) {
  return {field.mesh.get(), field.cell_pressures, field.fracture_cells, field.fracture_pressures};
}

// ---------------------------------------------------------------------------

CellLocator::CellLocator(const mesh::Mesh& mesh) : mesh_(&mesh), stamp_(mesh.num_cells(), 0) {
  if (mesh.num_cells() == 0) throw Error(ErrorCode::mesh, "cannot index an empty mesh");
  boxes_.reserve(mesh.num_cells());
  Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 hi = -1.0 * lo;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto pts = mesh.cell_points(c);
    const auto [l, h] = bounds(pts);
    boxes_.push_back({l, h});
    lo = {std::min(lo.x, l.x), std::min(lo.y, l.y)};
    hi = {std::max(hi.x, h.x), std::max(hi.y, h.y)};
  }
  origin_ = lo;
  const double w = std::max(hi.x - lo.x, 1e-300);
  const double h = std::max(hi.y - lo.y, 1e-300);
  const double per_axis = std::sqrt(static_cast<double>(mesh.num_cells()));
  nx_ = std::max<Index>(1, static_cast<Index>(per_axis * std::sqrt(w / h)));
  ny_ = std::max<Index>(1, static_cast<Index>(per_axis * std::sqrt(h / w)));
  dx_ = w / static_cast<double>(nx_);
  dy_ = h / static_cast<double>(ny_);
  buckets_.resize(nx_ * ny_);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto [i0, j0] = bucket(boxes_[c].lo);
    const auto [i1, j1] = bucket(boxes_[c].hi);
    for (Index j = j0; j <= j1; ++j) {
      for (Index i = i0; i <= i1; ++i) buckets_[j * nx_ + i].push_back(c);
    }
  }
}

std::pair<Index, Index> CellLocator::bucket(Point2 p) const {
  const auto clamp_index = [](double v, Index n) {
    if (!(v > 0.0)) return Index{0};
    return std::min(static_cast<Index>(v), n - 1);
  };
  return {clamp_index((p.x - origin_.x) / dx_, nx_), clamp_index((p.y - origin_.y) / dy_, ny_)};
}

void CellLocator::candidates(Point2 lo, Point2 hi, std::vector<Index>& out) const {
  out.clear();
  ++generation_;
  const auto [i0, j0] = bucket(lo);
  const auto [i1, j1] = bucket(hi);
  for (Index j = j0; j <= j1; ++j) {
    for (Index i = i0; i <= i1; ++i) {
      for (Index c : buckets_[j * nx_ + i]) {
        if (stamp_[c] == generation_) continue;
        stamp_[c] = generation_;
        const auto& b = boxes_[c];
        if (b.hi.x < lo.x || b.lo.x > hi.x || b.hi.y < lo.y || b.lo.y > hi.y) continue;
        out.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

std::optional<Index> CellLocator::locate(Point2 p) const {
  std::vector<Index> found;
  candidates(p, p, found);
  const double tol = mesh_->tolerance();
  for (Index c : found) {
    const auto pts = mesh_->cell_points(c);
    if (geometry::point_in_polygon(p, pts, tol)) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

ErrorReport compute_errors(const flow::SolutionField& solution,
                           const reference::ReferenceField& reference,
                           const scenario::FractureNetwork& network) {
  return compute_errors(view(solution), view(reference), network);
}

ErrorReport compute_errors(const FieldView& sol, const FieldView& ref,
                           const scenario::FractureNetwork& network) {
  if (sol.mesh == nullptr || ref.mesh == nullptr) throw Error(ErrorCode::solver, "missing mesh");
  ErrorReport report;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double p : ref.matrix) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  for (double p : ref.fracture) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  report.dp_ref = hi - lo;
  if (!(report.dp_ref > 0.0)) throw Error(ErrorCode::solver, "reference pressure range is zero");
  report.domain_area = sol.mesh->total_area();

  const bool hybrid_reference = !ref.fracture_cells.empty();
  // Fracture bands containing each reference cell centroid (equi-dimensional references).
  std::vector<std::vector<Index>> bands(ref.mesh->num_cells());
  if (!hybrid_reference) {
    for (Index r = 0; r < ref.mesh->num_cells(); ++r) {
      const Point2 p = ref.mesh->cell_centroid(r);
      for (Index k = 0; k < network.size(); ++k) {
        if (in_band(p, network[k].geometry, network[k].aperture)) bands[r].push_back(k);
      }
    }
  }

  double sum_m = 0.0;
  for_each_overlap(*sol.mesh, *ref.mesh, [&](Index m, Index r, double area) {
    report.overlap_area += area;
    if (!bands[r].empty()) return;
    const double d = sol.matrix[m] - ref.matrix[r];
    sum_m += area * d * d;
  });
  if (!(report.overlap_area > 0.0)) throw Error(ErrorCode::solver, "solution and reference do not overlap");
  report.err_m = std::sqrt(sum_m / (report.domain_area * report.dp_ref * report.dp_ref));

  if (sol.fracture_cells.empty() || network.empty()) return report;

  // Solution fracture cells by fracture, as arc-length intervals.
  std::vector<std::vector<std::pair<std::pair<double, double>, Index>>> sol_cells(network.size());
  for (Index i = 0; i < sol.fracture_cells.size(); ++i) {
    const auto& c = sol.fracture_cells[i];
    if (c.fracture >= network.size()) throw Error(ErrorCode::solver, "fracture id out of range");
    sol_cells[c.fracture].push_back({interval_along(c.segment, network[c.fracture].geometry), i});
  }
  std::vector<double> sum_k(network.size(), 0.0);
  std::vector<double> length_k(network.size(), 0.0);
  const auto accumulate = [&](Index k, std::pair<double, double> span, double width_factor,
                              double ref_value) {
    for (const auto& [interval, i] : sol_cells[k]) {
      const double w = overlap(span, interval) * width_factor;
      if (w <= 0.0) continue;
      const double d = sol.fracture[i] - ref_value;
      sum_k[k] += w * d * d;
      length_k[k] += w;
    }
  };
  if (hybrid_reference) {
    for (Index j = 0; j < ref.fracture_cells.size(); ++j) {
      const auto& c = ref.fracture_cells[j];
      if (c.fracture >= network.size()) throw Error(ErrorCode::solver, "fracture id out of range");
      accumulate(c.fracture, interval_along(c.segment, network[c.fracture].geometry), 1.0,
                 ref.fracture[j]);
    }
  } else {
    for (Index r = 0; r < ref.mesh->num_cells(); ++r) {
      for (Index k : bands[r]) {
        const auto& centerline = network[k].geometry;
        const auto pts = ref.mesh->cell_points(r);
        double u0 = std::numeric_limits<double>::infinity();
        double u1 = -u0;
        for (const auto& p : pts) {
          const double u = geometry::project_parameter(p, centerline) * centerline.length();
          u0 = std::min(u0, u);
          u1 = std::max(u1, u);
        }
        if (!(u1 > u0)) continue;
        // Overlap area with a fracture-cell slab, divided by the aperture.
        const double width_factor = ref.mesh->cell_area(r) / ((u1 - u0) * network[k].aperture);
        const double len = centerline.length();
        accumulate(k, {std::clamp(u0, 0.0, len), std::clamp(u1, 0.0, len)}, width_factor,
                   ref.matrix[r]);
      }
    }
  }
  double sum_f = 0.0;
  report.per_fracture.assign(network.size(), 0.0);
  for (Index k = 0; k < network.size(); ++k) {
    sum_f += sum_k[k];
    report.fracture_length += length_k[k];
    if (length_k[k] > 0.0) {
      report.per_fracture[k] = std::sqrt(sum_k[k] / (length_k[k] * report.dp_ref * report.dp_ref));
    }
  }
  if (report.fracture_length > 0.0) {
    report.err_f = std::sqrt(sum_f / (report.fracture_length * report.dp_ref * report.dp_ref));
    report.has_fracture_error = true;
  }
  return report;
}

double l2_difference(const FieldView& a, const FieldView& b) {
  double sum = 0.0;
  for_each_overlap(*a.mesh, *b.mesh, [&](Index ca, Index cb, double area) {
    const double d = a.matrix[ca] - b.matrix[cb];
    sum += area * d * d;
  });
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------

LineSample sample_line(const FieldView& field, const Segment2& line, Index n) {
  if (n < 2) throw Error(ErrorCode::config, "line sampling needs at least two points");
  const CellLocator locator(*field.mesh);
  LineSample out;
  out.line = line;
  const double length = line.length();
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    const Point2 p = line.at(t);
    double value = nan;
    for (Index j = 0; j < field.fracture_cells.size(); ++j) {
      const auto& c = field.fracture_cells[j];
      if (in_band(p, c.segment, c.aperture)) {
        value = field.fracture[j];
        break;
      }
    }
    if (std::isnan(value)) {
      if (const auto cell = locator.locate(p)) value = field.matrix[*cell];
    }
    out.arc_length.push_back(t * length);
    out.value.push_back(value);
  }
  return out;
}

void write_line_csv(std::ostream& out, const LineSample& sample) {
  const auto old_precision = out.precision(17);
  out << "arc_length,value\n";
  for (Index i = 0; i < sample.arc_length.size(); ++i) {
    out << sample.arc_length[i] << ',';
    if (std::isnan(sample.value[i])) {
      out << "nan";
    } else {
      out << sample.value[i];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

SummaryRow summarize(const flow::SolutionField& field, const std::optional<ErrorReport>& errors) {
  SummaryRow row;
  row.method = field.method;
  row.dofs = field.dofs();
  if (field.stats) {
    row.nnz_density = field.stats->nnz_density;
    row.cond2 = field.stats->cond2_estimate;
  }
  if (errors) {
    row.err_m = errors->err_m;
    if (errors->has_fracture_error) row.err_f = errors->err_f;
  }
  return row;
}

void write_summary_header(std::ostream& out) { out << "method,err_m,err_f,nnz_density,cond2,dofs\n"; }

void write_summary_row(std::ostream& out, const SummaryRow& row) {
  const auto old_precision = out.precision(6);
  out << row.method << ',';
  if (row.err_m) out << *row.err_m;
  out << ',';
  if (row.err_f) out << *row.err_f;
  out << ',' << row.nnz_density << ',' << row.cond2 << ',' << row.dofs << '\n';
  out.precision(old_precision);
}

// ---------------------------------------------------------------------------

void write_vtk_cells(std::ostream& out, const FieldView& field, const std::string& title) {
  const auto& m = *field.mesh;
  const auto old_precision = out.precision(17);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << m.num_vertices() << " double\n";
  for (const auto& p : m.vertices()) out << p.x << ' ' << p.y << " 0\n";
  Index size = 0;
  for (Index c = 0; c < m.num_cells(); ++c) size += 1 + m.cell_vertices(c).size();
  out << "CELLS " << m.num_cells() << ' ' << size << '\n';
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto ids = m.cell_vertices(c);
    out << ids.size();
    for (Index v : ids) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << m.num_cells() << '\n';
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto k = m.cell_vertices(c).size();
    out << (k == 3 ? 5 : k == 4 ? 9 : 7) << '\n';
  }
  out << "CELL_DATA " << m.num_cells() << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double p : field.matrix) out << p << '\n';
  out.precision(old_precision);
}

void write_vtk_fractures(std::ostream& out, const FieldView& field, const std::string& title) {
  const auto n = field.fracture_cells.size();
  const auto old_precision = out.precision(17);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 2 * n << " double\n";
  for (const auto& c : field.fracture_cells) {
    out << c.segment.a.x << ' ' << c.segment.a.y << " 0\n";
    out << c.segment.b.x << ' ' << c.segment.b.y << " 0\n";
  }
  out << "CELLS " << n << ' ' << 3 * n << '\n';
  for (Index i = 0; i < n; ++i) out << "2 " << 2 * i << ' ' << 2 * i + 1 << '\n';
  out << "CELL_TYPES " << n << '\n';
  for (Index i = 0; i < n; ++i) out << "3\n";
  out << "CELL_DATA " << n << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double p : field.fracture) out << p << '\n';
  out << "SCALARS fracture int 1\nLOOKUP_TABLE default\n";
  for (const auto& c : field.fracture_cells) out << c.fracture << '\n';
  out.precision(old_precision);
}

}  // namespace frackbench::postproc
