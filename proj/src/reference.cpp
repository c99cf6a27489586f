#include "frackbench/reference.hpp"

#include "frackbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace frackbench::reference {

namespace {

[[noreturn]] void scenario_error(const std::string& msg) { throw Error(ErrorCode::scenario, msg); }
[[noreturn]] void io_error(const std::string& msg) { throw Error(ErrorCode::io, msg); }

struct Box {
  double xmin, ymin, xmax, ymax;
};

Box rectangular_domain(const scenario::Scenario& scenario) {
  const auto& d = scenario.domain;
  Box b{d[0].x, d[0].y, d[0].x, d[0].y};
  for (const auto& p : d) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  const double box_area = (b.xmax - b.xmin) * (b.ymax - b.ymin);
  if (d.size() != 4 || std::abs(scenario.domain_area() - box_area) > 1e-12 * box_area) {
    scenario_error("the equi-dimensional reference needs an axis-aligned rectangular domain");
  }
  return b;
}

std::vector<double> unique_sorted(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  return out;
}

double read_number(std::istream& in, const char* what) {
  double v = 0.0;
  if (!(in >> v)) io_error(std::string("malformed reference field: expected ") + what);
  return v;
}

}  // namespace

std::vector<double> graded_lines(std::vector<std::pair<double, double>> breakpoints, double ratio,
                                 double max_size) {
  if (breakpoints.size() < 2) scenario_error("graded grid needs at least two breakpoints");
  if (!(ratio >= 1.0)) scenario_error("grading ratio must be at least 1");
  std::sort(breakpoints.begin(), breakpoints.end());
  const double extent = breakpoints.back().first - breakpoints.front().first;
  const double tol = 1e-12 * extent;
  std::vector<std::pair<double, double>> merged;
  for (const auto& [x, h] : breakpoints) {
    if (!merged.empty() && x - merged.back().first <= tol) {
      merged.back().second = std::min(merged.back().second, h);
    } else {
      merged.emplace_back(x, std::min(h, max_size));
    }
  }

  std::vector<double> lines{merged.front().first};
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    double left = merged[i].first;
    double right = merged[i + 1].first;
    double step_left = merged[i].second;
    double step_right = merged[i + 1].second;
    std::vector<double> from_right;
    while (true) {
      const double smaller = std::min(step_left, step_right);
      if (right - left <= 1.5 * smaller) break;
      if (step_left <= step_right) {
        left += step_left;
        lines.push_back(left);
        step_left = std::min(step_left * ratio, max_size);
      } else {
        right -= step_right;
        from_right.push_back(right);
        step_right = std::min(step_right * ratio, max_size);
      }
    }
    lines.insert(lines.end(), from_right.rbegin(), from_right.rend());
    lines.push_back(merged[i + 1].first);
  }
  return lines;
}

mesh::Mesh build_equidimensional_grid(const scenario::Scenario& scenario,
                                      const GridOptions& options) {
  if (options.cells_across == 0) scenario_error("cells_across must be positive");
  const Box box = rectangular_domain(scenario);
  const double extent = std::max(box.xmax - box.xmin, box.ymax - box.ymin);
  const double tol = 1e-9 * extent;

  double finest = extent;
  for (const auto& frac : scenario.network.fractures) {
    finest = std::min(finest, frac.aperture / static_cast<double>(options.cells_across));
  }
  double max_size = options.max_cell_size > 0.0 ? options.max_cell_size : extent / 256.0;
  if (!scenario.network.empty()) max_size = std::min(max_size, options.max_aspect_ratio * finest);

  std::vector<std::pair<double, double>> xb{{box.xmin, max_size}, {box.xmax, max_size}};
  std::vector<std::pair<double, double>> yb{{box.ymin, max_size}, {box.ymax, max_size}};
  const auto inside = [](double v, double lo, double hi) { return v >= lo && v <= hi; };

  for (std::size_t k = 0; k < scenario.network.size(); ++k) {
    const auto& frac = scenario.network[k];
    const Segment2& s = frac.geometry;
    const double h = frac.aperture / static_cast<double>(options.cells_across);
    const bool horizontal = std::abs(s.a.y - s.b.y) <= tol;
    const bool vertical = std::abs(s.a.x - s.b.x) <= tol;
    if (!horizontal && !vertical) {
      scenario_error("fracture " + std::to_string(k) +
                     " is not axis-aligned; the equi-dimensional reference cannot resolve it");
    }
    auto& across = horizontal ? yb : xb;
    auto& along = horizontal ? xb : yb;
    const double center = horizontal ? s.a.y : s.a.x;
    const double lo = horizontal ? box.ymin : box.xmin;
    const double hi = horizontal ? box.ymax : box.xmax;
    for (Index i = 0; i <= options.cells_across; ++i) {
      const double v = center - 0.5 * frac.aperture + static_cast<double>(i) * h;
      if (inside(v, lo, hi)) across.emplace_back(v, h);
    }
    along.emplace_back(horizontal ? s.a.x : s.a.y, h);
    along.emplace_back(horizontal ? s.b.x : s.b.y, h);
  }

  const auto xs = graded_lines(xb, options.grading, max_size);
  const auto ys = graded_lines(yb, options.grading, max_size);
  return mesh::without_boundary_tags(mesh::build_tensor_mesh(xs, ys));
}

mesh::Mesh refine_tensor_grid(const mesh::Mesh& grid) {
  const double tol = grid.tolerance();
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : grid.vertices()) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  xs = unique_sorted(std::move(xs), tol);
  ys = unique_sorted(std::move(ys), tol);
  if ((xs.size() - 1) * (ys.size() - 1) != grid.num_cells()) {
    throw Error(ErrorCode::mesh, "refinement needs a tensor-product grid");
  }
  const auto halve = [](const std::vector<double>& v) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      out.push_back(v[i]);
      out.push_back(0.5 * (v[i] + v[i + 1]));
    }
    out.push_back(v.back());
    return out;
  };
  return mesh::without_boundary_tags(mesh::build_tensor_mesh(halve(xs), halve(ys)));
}

std::vector<Tensor2> strip_permeability(const scenario::Scenario& scenario, const mesh::Mesh& grid,
                                        std::vector<int>* strip_of) {
  std::vector<Tensor2> k(grid.num_cells());
  if (strip_of != nullptr) strip_of->assign(grid.num_cells(), -1);
  const auto& fractures = scenario.network.fractures;
  for (Index c = 0; c < grid.num_cells(); ++c) {
    const Point2 p = grid.cell_centroid(c);
    int hits = 0;
    Tensor2 inverse_sum{0.0, 0.0, 0.0};
    for (std::size_t f = 0; f < fractures.size(); ++f) {
      const auto& frac = fractures[f];
      const double t = geometry::project_parameter(p, frac.geometry);
      if (t < 0.0 || t > 1.0) continue;
      if (geometry::distance_to_line(p, frac.geometry) >= 0.5 * frac.aperture) continue;
      const Point2 dir = frac.geometry.direction();
      const Point2 n = frac.geometry.normal();
      const Tensor2 kf{frac.k_t * dir.x * dir.x + frac.k_n * n.x * n.x,
                       frac.k_t * dir.x * dir.y + frac.k_n * n.x * n.y,
                       frac.k_t * dir.y * dir.y + frac.k_n * n.y * n.y};
      inverse_sum.xx += 1.0 / kf.xx;
      inverse_sum.yy += 1.0 / kf.yy;
      if (strip_of != nullptr && hits == 0) (*strip_of)[c] = static_cast<int>(f);
      ++hits;
    }
    if (hits == 0) {
      k[c] = scenario.permeability_at(p);
    } else {
      k[c] = {hits / inverse_sum.xx, 0.0, hits / inverse_sum.yy};
    }
  }
  return k;
}

double ReferenceField::pressure_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double p : cell_pressures) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  for (double p : fracture_pressures) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return hi - lo;
}

flow::SolutionField solve_reference(const scenario::Scenario& scenario,
                                    std::shared_ptr<const mesh::Mesh> grid,
                                    const flow::SolveSettings& settings) {
  if (!grid) throw Error(ErrorCode::solver, "no grid given");
  flow::SolutionField field;
  field.method = "reference";
  field.scenario_name = scenario.name;
  field.mesh = grid;
  field.graph.set_source_density(scenario.source);
  for (Index c = 0; c < grid->num_cells(); ++c) {
    field.graph.add_dof({flow::EntityKind::matrix_cell, c}, grid->cell_area(c));
  }
  const flow::BoundaryResolver boundary(scenario, *grid);
  const auto k = strip_permeability(scenario, *grid);
  flow::add_matrix_tpfa(field.graph, *grid, scenario, boundary, {}, k);
  flow::solve_into(field, settings);
  return field;
}

ReferenceField to_reference_field(const flow::SolutionField& solution) {
  ReferenceField out;
  out.mesh = solution.mesh;
  out.cell_pressures = solution.matrix_pressure;
  out.fracture_cells = solution.fracture_cells;
  out.fracture_pressures = solution.fracture_pressure;
  out.metadata["method"] = solution.method;
  out.metadata["scenario"] = solution.scenario_name;
  out.metadata["cells"] = std::to_string(solution.mesh ? solution.mesh->num_cells() : 0);
  return out;
}

void write_reference_field(std::ostream& out, const ReferenceField& field) {
  if (!field.mesh) io_error("reference field without mesh");
  mesh::write_mesh(out, *field.mesh);
  const auto old_precision = out.precision(17);
  out << "reference_field 1\n";
  out << "metadata " << field.metadata.size() << '\n';
  for (const auto& [key, value] : field.metadata) out << key << ' ' << value << '\n';
  out << "cell_pressures " << field.cell_pressures.size() << '\n';
  for (double p : field.cell_pressures) out << p << '\n';
  out << "fracture_cells " << field.fracture_cells.size() << '\n';
  for (std::size_t i = 0; i < field.fracture_cells.size(); ++i) {
    const auto& c = field.fracture_cells[i];
    out << c.fracture << ' ' << c.aperture << ' ' << c.segment.a.x << ' ' << c.segment.a.y << ' '
        << c.segment.b.x << ' ' << c.segment.b.y << ' ' << field.fracture_pressures[i] << '\n';
  }
  out.precision(old_precision);
}

void write_reference_field(const std::filesystem::path& path, const ReferenceField& field) {
  std::ofstream out(path);
  if (!out) io_error("cannot write " + path.string());
  write_reference_field(out, field);
  if (!out) io_error("failed writing " + path.string());
}

ReferenceField read_reference_field(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::size_t split = std::string::npos;
  for (const char* key : {"\nreference_field", "\nmetadata", "\ncell_pressures"}) {
    split = std::min(split, text.find(key));
  }
  if (split == std::string::npos) io_error("malformed reference field: no cell_pressures block");

  ReferenceField field;
  std::istringstream mesh_in(text.substr(0, split));
  field.mesh = std::make_shared<const mesh::Mesh>(mesh::read_mesh(mesh_in));

  std::istringstream rest(text.substr(split));
  std::string word;
  bool have_pressures = false;
  while (rest >> word) {
    if (word == "reference_field") {
      if (read_number(rest, "format version") != 1.0) io_error("unsupported reference field version");
    } else if (word == "metadata") {
      const auto n = static_cast<std::size_t>(read_number(rest, "metadata count"));
      std::string line;
      std::getline(rest, line);
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(rest, line)) io_error("malformed reference field: truncated metadata");
        const auto space = line.find(' ');
        field.metadata[line.substr(0, space)] = space == std::string::npos ? "" : line.substr(space + 1);
      }
    } else if (word == "cell_pressures") {
      const auto n = static_cast<std::size_t>(read_number(rest, "cell count"));
      if (n != field.mesh->num_cells()) {
        io_error("reference field has " + std::to_string(n) + " pressures for " +
                 std::to_string(field.mesh->num_cells()) + " cells");
      }
      field.cell_pressures.resize(n);
      for (auto& p : field.cell_pressures) p = read_number(rest, "cell pressure");
      have_pressures = true;
    } else if (word == "fracture_cells") {
      const auto n = static_cast<std::size_t>(read_number(rest, "fracture cell count"));
      for (std::size_t i = 0; i < n; ++i) {
        flow::FractureCell c;
        c.fracture = static_cast<Index>(read_number(rest, "fracture id"));
        c.aperture = read_number(rest, "aperture");
        c.segment.a.x = read_number(rest, "coordinate");
        c.segment.a.y = read_number(rest, "coordinate");
        c.segment.b.x = read_number(rest, "coordinate");
        c.segment.b.y = read_number(rest, "coordinate");
        field.fracture_cells.push_back(c);
        field.fracture_pressures.push_back(read_number(rest, "fracture pressure"));
      }
    } else {
      io_error("malformed reference field: unexpected block '" + word + "'");
    }
  }
  if (!have_pressures) io_error("malformed reference field: no cell_pressures block");
  return field;
}

ReferenceField read_reference_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) io_error("cannot open reference field " + path.string());
  return read_reference_field(in);
}

}  // namespace frackbench::reference
