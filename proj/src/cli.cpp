#include "frackbench/cli.hpp"

#include "frackbench/ccdfm.hpp"
#include "frackbench/edfm.hpp"
#include "frackbench/error.hpp"
#include "frackbench/reference.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace frackbench::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::config, msg); }

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  return out;
}

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

geometry::Point2 point_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) config_error("line endpoints must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "ccdfm") return Method::ccdfm;
  if (name == "ccdfm_star") return Method::ccdfm_star;
  if (name == "edfm") return Method::edfm;
  if (name == "reference") return Method::reference;
  config_error("unknown method '" + name + "' (expected ccdfm, ccdfm_star, edfm or reference)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::ccdfm: return "ccdfm";
    case Method::ccdfm_star: return "ccdfm_star";
    case Method::edfm: return "edfm";
    case Method::reference: return "reference";
  }
  return "unknown";
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const long nx = std::stol(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string rest = text.substr(x + 1);
    const long ny = std::stol(rest, &used);
    if (used != rest.size() || nx <= 0 || ny <= 0) throw std::invalid_argument(text);
    return {static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)};
  } catch (const std::exception&) {
    config_error("grid must look like NXxNY, got '" + text + "'");
  }
}

ccdfm::IntersectionPermeability parse_intersection_permeability(const std::string& name) {
  if (name == "harmonic") return ccdfm::IntersectionPermeability::harmonic;
  if (name == "branch") return ccdfm::IntersectionPermeability::branch;
  config_error("intersection permeability must be harmonic or branch, got '" + name + "'");
}

void apply_json(RunConfig& c, const nlohmann::json& doc) {
  if (!doc.is_object()) config_error("run file must hold a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "benchmark") {
        c.benchmark = value.get<std::string>();
      } else if (key == "scenario") {
        c.scenario = value.get<std::string>();
      } else if (key == "fractures") {
        c.fractures = value.get<std::string>();
      } else if (key == "method") {
        c.method = parse_method(value.get<std::string>());
      } else if (key == "mesh") {
        c.mesh = value.get<std::string>();
      } else if (key == "grid") {
        c.grid = parse_grid(value.get<std::string>());
      } else if (key == "cells_across") {
        c.cells_across = value.get<std::size_t>();
      } else if (key == "grading") {
        c.grading = value.get<double>();
      } else if (key == "max_cell_size") {
        c.max_cell_size = value.get<double>();
      } else if (key == "refine") {
        c.refine = value.get<std::size_t>();
      } else if (key == "intersection_permeability") {
        c.intersection_permeability = parse_intersection_permeability(value.get<std::string>());
      } else if (key == "reference") {
        c.reference = value.get<std::string>();
      } else if (key == "lines") {
        c.lines = value.get<std::string>();
      } else if (key == "out") {
        c.out = value.get<std::string>();
      } else if (key == "export_matrix") {
        c.export_matrix = value.get<bool>();
      } else if (key == "report") {
        c.report = value.get<bool>();
      } else if (key == "stats") {
        c.stats = value.get<bool>();
      } else if (key == "no_stats") {
        c.stats = !value.get<bool>();
      } else {
        config_error("unknown run file key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("bad run file value: ") + e.what());
  }
}

fs::path resolve_data_path(const fs::path& path) {
  if (fs::exists(path) || path.is_absolute()) return path;
  const fs::path in_data = scenario::data_directory() / path;
  if (fs::exists(in_data)) return in_data;
  return path;
}

std::vector<LineSpec> parse_lines(const nlohmann::json& doc) {
  if (!doc.is_array()) config_error("line file must hold a JSON list");
  std::vector<LineSpec> out;
  for (const auto& item : doc) {
    LineSpec spec;
    spec.name = "line" + std::to_string(out.size());
    if (item.is_array()) {
      if (item.size() != 2) config_error("a line is [[x0, y0], [x1, y1]]");
      spec.segment = {point_from(item[0]), point_from(item[1])};
    } else if (item.is_object()) {
      spec.name = item.value("name", spec.name);
      if (!item.contains("from") || !item.contains("to")) config_error("a line needs from and to");
      spec.segment = {point_from(item["from"]), point_from(item["to"])};
      spec.samples = item.value("samples", spec.samples);
    } else {
      config_error("malformed line entry");
    }
    out.push_back(spec);
  }
  return out;
}

std::vector<LineSpec> read_lines(const fs::path& path) {
  std::ifstream in(resolve_data_path(path));
  if (!in) throw Error(ErrorCode::io, "cannot open line file " + path.string());
  try {
    return parse_lines(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string("line file is not valid JSON: ") + e.what());
  }
}

scenario::Scenario load_config_scenario(const RunConfig& config) {
  if (config.benchmark && config.scenario) config_error("give either --benchmark or --scenario");
  if (config.benchmark) {
    std::optional<fs::path> geometry;
    if (config.fractures) geometry = resolve_data_path(*config.fractures);
    return scenario::builtin_benchmark(*config.benchmark, geometry);
  }
  if (config.scenario) {
    const auto path = resolve_data_path(*config.scenario);
    if (!config.fractures) return scenario::load_scenario(path);
    auto s = scenario::load_scenario(path, scenario::FractureFilePolicy::allow_missing);
    scenario::use_fracture_file(s, resolve_data_path(*config.fractures));
    s.validate();
    return s;
  }
  config_error("no scenario given (use --benchmark or --scenario)");
}

namespace {

mesh::Mesh base_mesh(const RunConfig& config,
                     const scenario::Scenario& scenario) {
  if (config.mesh && config.grid) config_error("give either --mesh or --grid");
  if (config.mesh) return mesh::read_mesh(resolve_data_path(*config.mesh));
  if (config.grid) {
    double xmin = scenario.domain[0].x;
    double xmax = xmin;
    double ymin = scenario.domain[0].y;
    double ymax = ymin;
    for (const auto& p : scenario.domain) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double box = (xmax - xmin) * (ymax - ymin);
    if (scenario.domain.size() != 4 || std::abs(scenario.domain_area() - box) > 1e-12 * box) {
      config_error("--grid needs a rectangular domain; give a --mesh instead");
    }
    // Conforming methods get grid lines through axis-aligned fractures and their ends.
    mesh::SnapLines snap;
    if (config.method == Method::ccdfm || config.method == Method::ccdfm_star) {
      const double tol = scenario.tolerance();
      for (const auto& frac : scenario.network.fractures) {
        const auto& s = frac.geometry;
        if (std::abs(s.a.y - s.b.y) <= tol) {
          snap.y.push_back(s.a.y);
          snap.x.insert(snap.x.end(), {s.a.x, s.b.x});
        } else if (std::abs(s.a.x - s.b.x) <= tol) {
          snap.x.push_back(s.a.x);
          snap.y.insert(snap.y.end(), {s.a.y, s.b.y});
        }
      }
    }
    return mesh::without_boundary_tags(mesh::build_structured_quads(
        {xmin, ymin, xmax, ymax}, config.grid->first, config.grid->second, snap));
  }
  switch (config.method) {
    case Method::reference: {
      reference::GridOptions options;
      options.cells_across = config.cells_across;
      options.grading = config.grading;
      options.max_cell_size = config.max_cell_size;
      return reference::build_equidimensional_grid(scenario, options);
    }
    case Method::edfm: config_error("edfm needs a background mesh (--grid or --mesh)");
    default: config_error(to_string(config.method) + " needs a mesh conforming to the fractures (--mesh)");
  }
}

}  // namespace

std::shared_ptr<const mesh::Mesh> build_mesh(const RunConfig& config,
                                             const scenario::Scenario& scenario) {
  auto m = base_mesh(config, scenario);
  for (std::size_t i = 0; i < config.refine; ++i) m = mesh::refine_uniform(m);
  return std::make_shared<const mesh::Mesh>(std::move(m));
}

RunResult run(const RunConfig& config, std::ostream& log) {
  const auto scenario = load_config_scenario(config);
  const auto mesh = build_mesh(config, scenario);

  flow::SolveSettings settings;
  settings.compute_stats = config.stats.value_or(config.method != Method::reference);

  RunResult result;
  switch (config.method) {
    case Method::ccdfm:
    case Method::ccdfm_star: {
      ccdfm::Options options;
      options.settings = settings;
      options.intersection_permeability = config.intersection_permeability;
      options.mode = config.method == Method::ccdfm ? ccdfm::IntersectionMode::eliminate
                                                    : ccdfm::IntersectionMode::keep_intersections;
      result.solution = ccdfm::assemble_and_solve(scenario, mesh, options);
      break;
    }
    case Method::edfm: {
      edfm::Options options;
      options.settings = settings;
      result.solution = edfm::assemble_and_solve(scenario, mesh, options);
      break;
    }
    case Method::reference:
      result.solution = reference::solve_reference(scenario, mesh, settings);
      break;
  }
  const auto& sol = result.solution;

  if (config.reference) {
    const auto ref = reference::read_reference_field(resolve_data_path(*config.reference));
    result.errors = postproc::compute_errors(sol, ref, scenario.network);
  }
  result.summary = postproc::summarize(sol, result.errors);

  fs::create_directories(config.out);
  {
    auto field = reference::to_reference_field(sol);
    field.metadata["dofs"] = std::to_string(sol.dofs());
    if (sol.stats) {
      field.metadata["nnz_density"] = format_double(sol.stats->nnz_density);
      field.metadata["cond2"] = format_double(sol.stats->cond2_estimate);
      field.metadata["cond2_lower_bound"] = sol.stats->lower_bound ? "1" : "0";
    }
    reference::write_reference_field(config.out / "solution.field", field);
  }
  {
    auto out = open_output(config.out / "solution.vtk");
    postproc::write_vtk_cells(out, postproc::view(sol), scenario.name + " " + sol.method);
  }
  if (!sol.fracture_cells.empty()) {
    auto out = open_output(config.out / "fractures.vtk");
    postproc::write_vtk_fractures(out, postproc::view(sol), scenario.name + " " + sol.method);
  }
  {
    auto out = open_output(config.out / "summary.csv");
    postproc::write_summary_header(out);
    postproc::write_summary_row(out, result.summary);
  }
  if (result.errors) {
    auto out = open_output(config.out / "errors.csv");
    out.precision(10);
    out << "fracture,err\n";
    out << "matrix," << result.errors->err_m << '\n';
    out << "fractures," << result.errors->err_f << '\n';
    for (std::size_t k = 0; k < result.errors->per_fracture.size(); ++k) {
      out << k << ',' << result.errors->per_fracture[k] << '\n';
    }
  }
  if (config.lines) {
    for (const auto& line : read_lines(*config.lines)) {
      const auto sample = postproc::sample_line(postproc::view(sol), line.segment, line.samples);
      auto out = open_output(config.out / ("line_" + line.name + ".csv"));
      postproc::write_line_csv(out, sample);
    }
  }
  if (config.export_matrix) {
    auto out = open_output(config.out / "matrix.mtx");
    linalg::write_matrix_market(out, sol.graph.assemble().matrix);
  }
  log << sol.method << ": " << sol.dofs() << " unknowns, relative residual "
      << sol.solve_report.relative_residual << ", conservation residual "
      << sol.max_relative_conservation_residual() << '\n';
  return result;
}

std::vector<postproc::SummaryRow> compare(const std::vector<fs::path>& runs,
                                          const std::optional<fs::path>& reference_path,
                                          const scenario::Scenario& scenario) {
  std::optional<reference::ReferenceField> ref;
  if (reference_path) ref = reference::read_reference_field(resolve_data_path(*reference_path));
  std::vector<postproc::SummaryRow> rows;
  for (const auto& dir : runs) {
    const auto field = reference::read_reference_field(dir / "solution.field");
    const auto meta = [&](const std::string& key) -> std::string {
      const auto it = field.metadata.find(key);
      return it == field.metadata.end() ? std::string{} : it->second;
    };
    if (meta("scenario") != scenario.name) {
      config_error("run " + dir.string() + " solved scenario '" + meta("scenario") + "', not '" +
                   scenario.name + "'");
    }
    postproc::SummaryRow row;
    row.method = meta("method");
    if (!meta("dofs").empty()) row.dofs = std::stoul(meta("dofs"));
    if (!meta("nnz_density").empty()) row.nnz_density = std::stod(meta("nnz_density"));
    if (!meta("cond2").empty()) row.cond2 = std::stod(meta("cond2"));
    if (ref) {
      const auto errors = postproc::compute_errors(postproc::view(field), postproc::view(*ref),
                                                   scenario.network);
      row.err_m = errors.err_m;
      if (errors.has_fracture_error) row.err_f = errors.err_f;
    }
    rows.push_back(row);
  }
  return rows;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Darcy flow in fractured porous media: hybrid-dimensional solvers and benchmarks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // run
  auto* run_cmd = app.add_subcommand("run", "Solve a scenario and write its artifacts");
  std::string config_file, benchmark, scenario_file, fractures, method, mesh_file, grid,
      reference_file, lines_file, out_dir, intersection_k;
  std::size_t cells_across = 0;
  std::size_t refine = 0;
  double grading = 0.0;
  double max_cell_size = 0.0;
  bool export_matrix = false;
  bool report = false;
  bool stats = false;
  bool no_stats = false;
  run_cmd->add_option("--config", config_file, "JSON run file; flags override its values");
  run_cmd->add_option("--benchmark", benchmark, "Built-in benchmark: 1, 2a, 2b, 3a, 3b, 4");
  run_cmd->add_option("--scenario", scenario_file, "Scenario JSON file");
  run_cmd->add_option("--fractures", fractures, "Fracture geometry file (benchmark 4)");
  run_cmd->add_option("--method", method, "ccdfm, ccdfm_star, edfm or reference");
  run_cmd->add_option("--mesh", mesh_file, "Mesh file (native or Gmsh v2)");
  run_cmd->add_option("--grid", grid, "Structured background grid NXxNY");
  run_cmd->add_option("--cells-across", cells_across, "Reference cells across each aperture");
  run_cmd->add_option("--grading", grading, "Reference grid growth ratio");
  run_cmd->add_option("--max-cell-size", max_cell_size, "Reference grid maximum cell size");
  run_cmd->add_option("--refine", refine, "Uniform refinements of the mesh (each cell split in four)");
  run_cmd->add_option("--intersection-permeability", intersection_k,
                      "Intersection cell permeability for ccdfm_star: harmonic or branch");
  run_cmd->add_option("--reference", reference_file, "Reference field for error norms");
  run_cmd->add_option("--lines", lines_file, "JSON list of sampling lines");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_flag("--export-matrix", export_matrix, "Write the system matrix (MatrixMarket)");
  run_cmd->add_flag("--report", report, "Print the summary row");
  run_cmd->add_flag("--stats", stats, "Estimate the condition number");
  run_cmd->add_flag("--no-stats", no_stats, "Skip the condition number estimate");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Tabulate several runs of one scenario");
  std::vector<std::string> run_dirs;
  std::string cmp_benchmark, cmp_scenario, cmp_fractures, cmp_reference, cmp_out;
  compare_cmd->add_option("runs", run_dirs, "Run output directories");
  compare_cmd->add_option("--benchmark", cmp_benchmark, "Built-in benchmark id");
  compare_cmd->add_option("--scenario", cmp_scenario, "Scenario JSON file");
  compare_cmd->add_option("--fractures", cmp_fractures, "Fracture geometry file (benchmark 4)");
  compare_cmd->add_option("--reference", cmp_reference, "Reference field");
  compare_cmd->add_option("--out", cmp_out, "CSV file (default: standard output)");

  // export-scenario
  auto* export_cmd = app.add_subcommand("export-scenario", "Write a built-in benchmark as JSON");
  std::string exp_benchmark, exp_fractures, exp_out;
  export_cmd->add_option("--benchmark", exp_benchmark, "Built-in benchmark id")->required();
  export_cmd->add_option("--fractures", exp_fractures, "Fracture geometry file (benchmark 4)");
  export_cmd->add_option("--out", exp_out, "Output JSON file")->required();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      config_error(e.what());
    }

    if (run_cmd->parsed()) {
      RunConfig config;
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw Error(ErrorCode::io, "cannot open run file " + config_file);
        try {
          apply_json(config, nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
          config_error(std::string("run file is not valid JSON: ") + e.what());
        }
      }
      const auto given = [&](const char* flag) { return run_cmd->count(flag) > 0; };
      if (given("--benchmark")) {
        config.benchmark = benchmark;
        config.scenario.reset();
      }
      if (given("--scenario")) {
        config.scenario = scenario_file;
        if (!given("--benchmark")) config.benchmark.reset();
      }
      if (given("--fractures")) config.fractures = fractures;
      if (given("--method")) config.method = parse_method(method);
      if (given("--mesh")) {
        config.mesh = mesh_file;
        config.grid.reset();
      }
      if (given("--grid")) {
        config.grid = parse_grid(grid);
        if (!given("--mesh")) config.mesh.reset();
      }
      if (given("--cells-across")) config.cells_across = cells_across;
      if (given("--grading")) config.grading = grading;
      if (given("--max-cell-size")) config.max_cell_size = max_cell_size;
      if (given("--refine")) config.refine = refine;
      if (given("--intersection-permeability"))
        config.intersection_permeability = parse_intersection_permeability(intersection_k);
      if (given("--reference")) config.reference = reference_file;
      if (given("--lines")) config.lines = lines_file;
      if (given("--out")) config.out = out_dir;
      if (given("--export-matrix")) config.export_matrix = true;
      if (given("--report")) config.report = true;
      if (given("--stats")) config.stats = true;
      if (given("--no-stats")) config.stats = false;

      const auto result = run(config, err);
      if (config.report) {
        postproc::write_summary_header(out);
        postproc::write_summary_row(out, result.summary);
      }
    } else if (compare_cmd->parsed()) {
      RunConfig config;
      if (!cmp_benchmark.empty()) config.benchmark = cmp_benchmark;
      if (!cmp_scenario.empty()) config.scenario = cmp_scenario;
      if (!cmp_fractures.empty()) config.fractures = cmp_fractures;
      const auto scenario = load_config_scenario(config);
      std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
      std::optional<fs::path> ref;
      if (!cmp_reference.empty()) ref = cmp_reference;
      const auto rows = compare(dirs, ref, scenario);
      std::ofstream file;
      if (!cmp_out.empty()) file = open_output(cmp_out);
      std::ostream& table = cmp_out.empty() ? out : file;
      postproc::write_summary_header(table);
      for (const auto& row : rows) postproc::write_summary_row(table, row);
    } else if (export_cmd->parsed()) {
      std::optional<fs::path> geometry;
      if (!exp_fractures.empty()) geometry = resolve_data_path(exp_fractures);
      scenario::save_scenario(exp_out, scenario::builtin_benchmark(exp_benchmark, geometry));
    }
  } catch (const Error& e) {
    err << "error: " << frackbench::to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: E_INTERNAL: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace frackbench::cli
