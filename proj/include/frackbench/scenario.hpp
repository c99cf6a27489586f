#pragma once

#include "frackbench/geometry.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace frackbench::scenario {

using geometry::Point2;
using geometry::Segment2;

/// Symmetric 2x2 permeability (or conductivity) tensor.
struct Tensor2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  static Tensor2 isotropic(double k) { return {k, 0.0, k}; }
  [[nodiscard]] Point2 apply(Point2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  /// a^T K b
  [[nodiscard]] double bilinear(Point2 a, Point2 b) const { return geometry::dot(a, apply(b)); }
  [[nodiscard]] bool is_spd() const { return xx > 0.0 && xx * yy - xy * xy > 0.0; }
  [[nodiscard]] Tensor2 scaled(double c) const { return {c * xx, c * xy, c * yy}; }
};

struct FractureSegment {
  Segment2 geometry;
  double aperture = 0.0;
  double k_n = 0.0;  ///< normal permeability
  double k_t = 0.0;  ///< tangential permeability
};

struct FractureNetwork {
  std::vector<FractureSegment> fractures;

  [[nodiscard]] std::size_t size() const noexcept { return fractures.size(); }
  [[nodiscard]] bool empty() const noexcept { return fractures.empty(); }
  [[nodiscard]] const FractureSegment& operator[](std::size_t i) const { return fractures[i]; }
  [[nodiscard]] std::vector<Segment2> segments() const;
  [[nodiscard]] double total_length() const;
};

enum class BcKind { dirichlet, neumann };

/// a*x + b*y + c
struct LinearFunction {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  [[nodiscard]] double operator()(Point2 p) const { return a * p.x + b * p.y + c; }
};

/// Condition on all boundary faces carrying `tag`. For Neumann the value is the outward
/// normal flux density u.n (negative for inflow).
struct BoundaryCondition {
  int tag = 0;
  BcKind kind = BcKind::neumann;
  double value = 0.0;
  std::optional<LinearFunction> linear;

  [[nodiscard]] double value_at(Point2 p) const { return linear ? (*linear)(p) : value; }
};

struct Region {
  std::vector<Point2> polygon;
  Tensor2 K;
};

enum class FieldKind { pressure, head };

/// Fractures read from an external whitespace/comma separated "xA yA xB yB" file with
/// uniform properties.
struct FractureFileRef {
  std::string path;
  double aperture = 0.0;
  double k_n = 0.0;
  double k_t = 0.0;
  bool resolved = false;
  std::size_t first_index = 0;  ///< index of the first file fracture in the network
};

struct Scenario {
  std::string name;
  std::vector<Point2> domain;  ///< simple polygon, counter-clockwise; edge i has tag i+1
  std::vector<Region> regions;
  FractureNetwork network;
  std::vector<BoundaryCondition> bcs;
  double source = 0.0;
  FieldKind field = FieldKind::pressure;
  std::optional<FractureFileRef> fracture_file;

  [[nodiscard]] Tensor2 permeability_at(Point2 p) const;
  [[nodiscard]] const BoundaryCondition* bc_for_tag(int tag) const;
  /// 1-based index of the domain edge containing the segment, 0 if none.
  [[nodiscard]] int domain_edge_tag(const Segment2& s) const;
  [[nodiscard]] double tolerance() const { return geometry::relative_tolerance(domain); }
  [[nodiscard]] double domain_area() const { return geometry::signed_area(domain); }
  [[nodiscard]] bool all_neumann_zero() const;
  /// Range of the Dirichlet data evaluated at the domain vertices on Dirichlet edges
  /// (exact bounds for constant and linear data).
  [[nodiscard]] std::pair<double, double> dirichlet_range() const;

  /// Throws Error(scenario) on any violated invariant.
  void validate() const;
};

enum class FractureFilePolicy { require, allow_missing };

Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {},
                        FractureFilePolicy policy = FractureFilePolicy::require);
Scenario load_scenario(const std::filesystem::path& path,
                       FractureFilePolicy policy = FractureFilePolicy::require);
nlohmann::json to_json(const Scenario& s);
void save_scenario(const std::filesystem::path& path, const Scenario& s);

std::vector<Segment2> read_fracture_geometry(const std::filesystem::path& path);

/// Replaces the file fractures of a scenario with those read from path.
void use_fracture_file(Scenario& s, const std::filesystem::path& path);

/// Benchmark data directory: $FRACKBENCH_DATA, else the directory compiled into the build.
std::filesystem::path data_directory();

/// Ids: "1", "2a", "2b", "3a", "3b", "4". Benchmark 4 needs its fracture geometry file,
/// taken from geometry_file or data_directory()/benchmark4_fractures.txt.
Scenario builtin_benchmark(std::string_view id,
                           const std::optional<std::filesystem::path>& geometry_file = {});

/// Numbered points of the modified Hydrocoin domain (keys "1", "2'", ..., "19").
const std::map<std::string, Point2>& hydrocoin_points();

}  // namespace frackbench::scenario
