#pragma once

// Command-line driver: scenario selection, mesh construction, solve, reports.

#include "frackbench/ccdfm.hpp"
#include "frackbench/flow.hpp"
#include "frackbench/postproc.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace frackbench::cli {

enum class Method { ccdfm, ccdfm_star, edfm, reference };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct LineSpec {
  std::string name;
  geometry::Segment2 segment;
  std::size_t samples = 1000;
};

struct RunConfig {
  std::optional<std::string> benchmark;
  std::optional<std::filesystem::path> scenario;
  std::optional<std::filesystem::path> fractures;  ///< external fracture geometry file
  Method method = Method::ccdfm;
  std::optional<std::filesystem::path> mesh;
  std::optional<std::pair<std::size_t, std::size_t>> grid;
  std::size_t cells_across = 10;
  double grading = 1.3;
  double max_cell_size = 0.0;
  std::size_t refine = 0;  ///< uniform refinements applied to the mesh
  ccdfm::IntersectionPermeability intersection_permeability = ccdfm::IntersectionPermeability::harmonic;
  std::optional<std::filesystem::path> reference;
  std::optional<std::filesystem::path> lines;
  std::filesystem::path out = "out";
  bool export_matrix = false;
  bool report = false;
  std::optional<bool> stats;  ///< default: on, except for the reference method
};

/// Applies the keys of a JSON run file (flag names with '_' for '-').
void apply_json(RunConfig& config, const nlohmann::json& doc);

ccdfm::IntersectionPermeability parse_intersection_permeability(const std::string& name);

/// "NXxNY"
std::pair<std::size_t, std::size_t> parse_grid(const std::string& text);

/// Paths are tried as given, then relative to the benchmark data directory.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

std::vector<LineSpec> read_lines(const std::filesystem::path& path);
std::vector<LineSpec> parse_lines(const nlohmann::json& doc);

scenario::Scenario load_config_scenario(const RunConfig& config);

/// Mesh the method runs on, per the config.
std::shared_ptr<const mesh::Mesh> build_mesh(const RunConfig& config,
                                             const scenario::Scenario& scenario);

struct RunResult {
  flow::SolutionField solution;
  std::optional<postproc::ErrorReport> errors;
  postproc::SummaryRow summary;
};

/// Solves and writes all artifacts into config.out.
RunResult run(const RunConfig& config, std::ostream& log);

/// Rows of a combined table, one per run directory, with errors recomputed against the
/// reference when given.
std::vector<postproc::SummaryRow> compare(const std::vector<std::filesystem::path>& runs,
                                          const std::optional<std::filesystem::path>& reference,
                                          const scenario::Scenario& scenario);

/// Entry point; returns the process exit status.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace frackbench::cli
