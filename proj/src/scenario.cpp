#include "frackbench/scenario.hpp"

#include "frackbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#ifndef FRACKBENCH_DEFAULT_DATA_DIR
#define FRACKBENCH_DEFAULT_DATA_DIR "data"
#endif

namespace frackbench::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void scenario_error(const std::string& msg) { throw Error(ErrorCode::scenario, msg); }

}  // namespace

std::vector<Segment2> FractureNetwork::segments() const {
  std::vector<Segment2> out;
  out.reserve(fractures.size());
  for (const auto& f : fractures) out.push_back(f.geometry);
  return out;
}

double FractureNetwork::total_length() const {
  double s = 0.0;
  for (const auto& f : fractures) s += f.geometry.length();
  return s;
}

Tensor2 Scenario::permeability_at(Point2 p) const {
  const double tol = tolerance();
  for (const Region& r : regions) {
    if (geometry::point_in_polygon(p, r.polygon, tol)) return r.K;
  }
  std::ostringstream msg;
  msg << "no region contains point (" << p.x << ", " << p.y << ")";
  scenario_error(msg.str());
}

const BoundaryCondition* Scenario::bc_for_tag(int tag) const {
  for (const auto& bc : bcs) {
    if (bc.tag == tag) return &bc;
  }
  return nullptr;
}

int Scenario::domain_edge_tag(const Segment2& s) const {
  const double tol = 10.0 * tolerance();
  const std::size_t n = domain.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Segment2 edge{domain[i], domain[(i + 1) % n]};
    if (geometry::distance_to_segment(s.a, edge) <= tol &&
        geometry::distance_to_segment(s.b, edge) <= tol) {
      return static_cast<int>(i) + 1;
    }
  }
  return 0;
}

bool Scenario::all_neumann_zero() const {
  return std::all_of(bcs.begin(), bcs.end(), [](const BoundaryCondition& bc) {
    return bc.kind == BcKind::dirichlet || (!bc.linear && bc.value == 0.0) ||
           (bc.linear && bc.linear->a == 0.0 && bc.linear->b == 0.0 && bc.linear->c == 0.0);
  });
}

std::pair<double, double> Scenario::dirichlet_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t n = domain.size();
  for (const auto& bc : bcs) {
    if (bc.kind != BcKind::dirichlet) continue;
    if (bc.tag >= 1 && static_cast<std::size_t>(bc.tag) <= n) {
      for (Point2 p : {domain[bc.tag - 1], domain[bc.tag % n]}) {
        lo = std::min(lo, bc.value_at(p));
        hi = std::max(hi, bc.value_at(p));
      }
    } else {
      lo = std::min(lo, bc.value);
      hi = std::max(hi, bc.value);
    }
  }
  return {lo, hi};
}

void Scenario::validate() const {
  if (domain.size() < 3) scenario_error("domain polygon needs at least 3 vertices");
  for (Point2 p : domain) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) scenario_error("non-finite domain vertex");
  }
  const double area = domain_area();
  if (!(area > 0.0)) scenario_error("domain polygon must be counter-clockwise with positive area");

  if (regions.empty()) scenario_error("scenario has no permeability regions");
  double region_area = 0.0;
  for (const Region& r : regions) {
    if (!r.K.is_spd()) scenario_error("region permeability tensor is not symmetric positive definite");
    if (r.polygon.size() < 3) scenario_error("region polygon needs at least 3 vertices");
    region_area += std::abs(geometry::signed_area(r.polygon));
  }
  if (std::abs(region_area - area) > 1e-9 * area) {
    scenario_error("regions do not partition the domain (area mismatch)");
  }

  const double tol = tolerance();
  for (std::size_t i = 0; i < network.size(); ++i) {
    const auto& f = network[i];
    const std::string id = "fracture " + std::to_string(i);
    if (!(f.aperture > 0.0)) scenario_error(id + " has non-positive aperture");
    if (!(f.k_n > 0.0) || !(f.k_t > 0.0)) scenario_error(id + " has non-positive permeability");
    if (!(f.geometry.length() > tol)) scenario_error(id + " has zero length");
    for (Point2 p : {f.geometry.a, f.geometry.b}) {
      if (!geometry::point_in_polygon(p, domain, 10.0 * tol)) scenario_error(id + " leaves the domain");
    }
  }

  std::set<int> seen;
  bool any_dirichlet = false;
  for (const auto& bc : bcs) {
    if (!seen.insert(bc.tag).second) {
      scenario_error("boundary tag " + std::to_string(bc.tag) + " has more than one condition");
    }
    any_dirichlet = any_dirichlet || bc.kind == BcKind::dirichlet;
  }
  for (std::size_t e = 1; e <= domain.size(); ++e) {
    if (!seen.contains(static_cast<int>(e))) {
      scenario_error("boundary edge " + std::to_string(e) + " has no boundary condition");
    }
  }
  if (!any_dirichlet) scenario_error("scenario needs at least one Dirichlet boundary");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Point2 point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) scenario_error("point must be an [x, y] array");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

std::vector<Point2> polygon_from(const json& j) {
  if (!j.is_array()) scenario_error("polygon must be an array of points");
  std::vector<Point2> out;
  for (const auto& p : j) out.push_back(point_from(p));
  return out;
}

json point_to(Point2 p) { return json::array({p.x, p.y}); }

json polygon_to(const std::vector<Point2>& poly) {
  json arr = json::array();
  for (Point2 p : poly) arr.push_back(point_to(p));
  return arr;
}

Tensor2 tensor_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || j[0].size() != 2 || j[1].size() != 2) {
    scenario_error("K must be a 2x2 array");
  }
  const double xy = j[0][1].get<double>();
  if (xy != j[1][0].get<double>()) scenario_error("K is not symmetric");
  return {j[0][0].get<double>(), xy, j[1][1].get<double>()};
}

}  // namespace

std::vector<Segment2> read_fracture_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open fracture geometry file " + path.string());
  std::vector<Segment2> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v[4];
    int n = 0;
    while (n < 4 && ls >> v[n]) ++n;
    if (n == 0 && ls.eof()) continue;
    std::string rest;
    if (n != 4 || (ls >> rest)) {
      throw Error(ErrorCode::scenario, "fracture geometry file " + path.string() + " line " +
                                           std::to_string(lineno) + ": expected 'xA yA xB yB'");
    }
    out.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  return out;
}

void use_fracture_file(Scenario& s, const std::filesystem::path& path) {
  if (!s.fracture_file) scenario_error("scenario has no fracture file entry to replace");
  auto& ref = *s.fracture_file;
  s.network.fractures.resize(ref.first_index);
  for (const auto& seg : read_fracture_geometry(path)) {
    s.network.fractures.push_back({seg, ref.aperture, ref.k_n, ref.k_t});
  }
  ref.path = path.string();
  ref.resolved = true;
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir,
                        FractureFilePolicy policy) {
  Scenario s;
  try {
    s.name = doc.value("name", std::string{});
    const std::string field = doc.value("field", std::string("pressure"));
    if (field == "pressure") {
      s.field = FieldKind::pressure;
    } else if (field == "head") {
      s.field = FieldKind::head;
    } else {
      scenario_error("field must be 'pressure' or 'head'");
    }
    s.domain = polygon_from(doc.at("domain"));
    for (const auto& r : doc.at("regions")) {
      s.regions.push_back({polygon_from(r.at("polygon")), tensor_from(r.at("K"))});
    }
    if (doc.contains("fractures")) {
      for (const auto& f : doc.at("fractures")) {
        s.network.fractures.push_back({{point_from(f.at("a")), point_from(f.at("b"))},
                                       f.at("aperture").get<double>(),
                                       f.at("k_n").get<double>(),
                                       f.at("k_t").get<double>()});
      }
    }
    if (doc.contains("fracture_file")) {
      const auto& ff = doc.at("fracture_file");
      FractureFileRef ref{ff.at("path").get<std::string>(), ff.at("aperture").get<double>(),
                          ff.at("k_n").get<double>(), ff.at("k_t").get<double>(), false,
                          s.network.size()};
      std::filesystem::path p = ref.path;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      if (!std::filesystem::exists(p) && std::filesystem::path(ref.path).is_relative()) {
        p = data_directory() / ref.path;
      }
      if (std::filesystem::exists(p)) {
        for (const auto& seg : read_fracture_geometry(p)) {
          s.network.fractures.push_back({seg, ref.aperture, ref.k_n, ref.k_t});
        }
        ref.resolved = true;
      } else if (policy == FractureFilePolicy::require) {
        scenario_error("fracture geometry file '" + ref.path + "' not found");
      }
      s.fracture_file = ref;
    }
    for (const auto& b : doc.at("bcs")) {
      BoundaryCondition bc;
      bc.tag = b.at("tag").get<int>();
      const std::string kind = b.at("kind").get<std::string>();
      if (kind == "dirichlet") {
        bc.kind = BcKind::dirichlet;
      } else if (kind == "neumann") {
        bc.kind = BcKind::neumann;
      } else {
        scenario_error("bc kind must be 'dirichlet' or 'neumann'");
      }
      if (b.contains("linear")) {
        const auto& l = b.at("linear");
        bc.linear = LinearFunction{l.at("a").get<double>(), l.at("b").get<double>(),
                                   l.at("c").get<double>()};
      } else {
        bc.value = b.at("value").get<double>();
      }
      s.bcs.push_back(bc);
    }
    s.source = doc.value("source", 0.0);
  } catch (const json::exception& e) {
    scenario_error(std::string("scenario schema violation: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, FractureFilePolicy policy) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    scenario_error("scenario file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_scenario(doc, path.parent_path(), policy);
}

json to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["field"] = s.field == FieldKind::head ? "head" : "pressure";
  doc["domain"] = polygon_to(s.domain);
  doc["regions"] = json::array();
  for (const Region& r : s.regions) {
    doc["regions"].push_back(
        {{"polygon", polygon_to(r.polygon)},
         {"K", json::array({json::array({r.K.xx, r.K.xy}), json::array({r.K.xy, r.K.yy})})}});
  }
  doc["fractures"] = json::array();
  const std::size_t inline_count = s.fracture_file ? s.fracture_file->first_index : s.network.size();
  for (std::size_t i = 0; i < inline_count; ++i) {
    const auto& f = s.network[i];
    doc["fractures"].push_back({{"a", point_to(f.geometry.a)},
                                {"b", point_to(f.geometry.b)},
                                {"aperture", f.aperture},
                                {"k_n", f.k_n},
                                {"k_t", f.k_t}});
  }
  if (s.fracture_file) {
    doc["fracture_file"] = {{"path", s.fracture_file->path},
                            {"aperture", s.fracture_file->aperture},
                            {"k_n", s.fracture_file->k_n},
                            {"k_t", s.fracture_file->k_t}};
  }
  doc["bcs"] = json::array();
  for (const auto& bc : s.bcs) {
    json b{{"tag", bc.tag}, {"kind", bc.kind == BcKind::dirichlet ? "dirichlet" : "neumann"}};
    if (bc.linear) {
      b["linear"] = {{"a", bc.linear->a}, {"b", bc.linear->b}, {"c", bc.linear->c}};
    } else {
      b["value"] = bc.value;
    }
    doc["bcs"].push_back(b);
  }
  doc["source"] = s.source;
  return doc;
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write scenario file " + path.string());
  out << to_json(s).dump(2) << '\n';
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("FRACKBENCH_DATA"); env != nullptr && *env != '\0') {
    return env;
  }
  return FRACKBENCH_DEFAULT_DATA_DIR;
}

// ---------------------------------------------------------------------------
// Built-in benchmarks

const std::map<std::string, Point2>& hydrocoin_points() {
  static const std::map<std::string, Point2> points{
      {"1", {0.0, 150.0}},
      {"2'", {394.285714286, 100.714285714}},
      {"3'", {400.0, 100.0}},
      {"4'", {404.444444444, 100.555555556}},
      {"5", {800.0, 150.0}},
      {"6'", {1192.66666667, 100.916666667}},
      {"7'", {1200.0, 100.0}},
      {"8'", {1207.6744186, 100.959302326}},
      {"9", {1600.0, 150.0}},
      {"10", {1600.0, -1000.0}},
      {"11", {1505.0, -1000.0}},
      {"12", {1495.0, -1000.0}},
      {"13", {1007.5, -1000.0}},
      {"14", {992.5, -1000.0}},
      {"15", {0.0, -1000.0}},
      {"16", {1071.34615385, -566.346153846}},
      {"17", {1084.03846154, -579.038461538}},
      {"18", {1082.5, -587.5}},
      {"19", {1069.80769231, -574.807692308}},
  };
  return points;
}

namespace {

std::vector<Point2> unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

Scenario benchmark1() {
  const auto& p = hydrocoin_points();
  Scenario s;
  s.name = "benchmark1";
  s.field = FieldKind::head;
  // The hybrid-dimensional domain drops nodes 2', 4', 6', 8', which are collinear with
  // their neighbours on the top surface.
  s.domain = {p.at("15"), p.at("10"), p.at("9"), p.at("7'"), p.at("5"), p.at("3'"), p.at("1")};
  s.regions.push_back({s.domain, Tensor2::isotropic(1e-8)});

  // Fracture zones reduced to centerlines; aperture is the perpendicular zone width,
  // averaged over both ends of the zone.
  const auto zone = [&](const char* top, const char* bottom_a, const char* bottom_b,
                        const char* wall1_top, const char* wall1_bottom, const char* wall2_top,
                        const char* wall2_bottom) {
    const Point2 bottom = 0.5 * (p.at(bottom_a) + p.at(bottom_b));
    const Segment2 wall1{p.at(wall1_top), p.at(wall1_bottom)};
    const double width = 0.5 * (geometry::distance_to_line(p.at(wall2_top), wall1) +
                                geometry::distance_to_line(p.at(wall2_bottom), wall1));
    return FractureSegment{{p.at(top), bottom}, width, 1e-6, 1e-6};
  };
  s.network.fractures.push_back(zone("3'", "11", "12", "2'", "12", "4'", "11"));
  s.network.fractures.push_back(zone("7'", "13", "14", "6'", "14", "8'", "13"));

  s.bcs.push_back({1, BcKind::neumann, 0.0, {}});
  s.bcs.push_back({2, BcKind::neumann, 0.0, {}});
  for (int tag = 3; tag <= 6; ++tag) {
    s.bcs.push_back({tag, BcKind::dirichlet, 0.0, LinearFunction{0.0, 1.0, 0.0}});
  }
  s.bcs.push_back({7, BcKind::neumann, 0.0, {}});
  return s;
}

Scenario benchmark2(double k_f, const char* name) {
  Scenario s;
  s.name = name;
  s.domain = unit_square();
  s.regions.push_back({s.domain, Tensor2::isotropic(1.0)});
  const Segment2 lines[] = {
      {{0.0, 0.5}, {1.0, 0.5}},     {{0.5, 0.0}, {0.5, 1.0}},     {{0.5, 0.75}, {1.0, 0.75}},
      {{0.75, 0.5}, {0.75, 1.0}},   {{0.5, 0.625}, {0.75, 0.625}}, {{0.625, 0.5}, {0.625, 0.75}},
  };
  for (const auto& seg : lines) s.network.fractures.push_back({seg, 1e-4, k_f, k_f});
  s.bcs = {{1, BcKind::neumann, 0.0, {}},
           {2, BcKind::dirichlet, 1.0, {}},
           {3, BcKind::neumann, 0.0, {}},
           {4, BcKind::neumann, -1.0, {}}};
  return s;
}

Scenario benchmark3(bool top_to_bottom) {
  Scenario s;
  s.name = top_to_bottom ? "benchmark3a" : "benchmark3b";
  s.domain = unit_square();
  s.regions.push_back({s.domain, Tensor2::isotropic(1.0)});
  const double coords[10][4] = {
      {0.0500, 0.4160, 0.2200, 0.0624}, {0.0500, 0.2750, 0.2500, 0.1350},
      {0.1500, 0.6300, 0.4500, 0.0900}, {0.1500, 0.9167, 0.4000, 0.5000},
      {0.6500, 0.8333, 0.8500, 0.1667}, {0.7000, 0.2350, 0.8500, 0.1675},
      {0.6000, 0.3800, 0.8500, 0.2675}, {0.3500, 0.9714, 0.8000, 0.7143},
      {0.7500, 0.9574, 0.9500, 0.8155}, {0.1500, 0.8363, 0.4000, 0.9727},
  };
  for (int i = 0; i < 10; ++i) {
    const double k = (i == 3 || i == 4) ? 1e-4 : 1e4;
    s.network.fractures.push_back(
        {{{coords[i][0], coords[i][1]}, {coords[i][2], coords[i][3]}}, 1e-4, k, k});
  }
  if (top_to_bottom) {
    s.bcs = {{1, BcKind::dirichlet, 0.0, {}},
             {2, BcKind::neumann, 0.0, {}},
             {3, BcKind::dirichlet, 1.0, {}},
             {4, BcKind::neumann, 0.0, {}}};
  } else {
    s.bcs = {{1, BcKind::neumann, 0.0, {}},
             {2, BcKind::dirichlet, 0.0, {}},
             {3, BcKind::neumann, 0.0, {}},
             {4, BcKind::dirichlet, 1.0, {}}};
  }
  return s;
}

Scenario benchmark4(const std::optional<std::filesystem::path>& geometry_file) {
  Scenario s;
  s.name = "benchmark4";
  s.domain = {{0, 0}, {700, 0}, {700, 600}, {0, 600}};
  s.regions.push_back({s.domain, Tensor2::isotropic(1e-14)});
  const std::filesystem::path path =
      geometry_file.value_or(data_directory() / "benchmark4_fractures.txt");
  if (!std::filesystem::exists(path)) {
    scenario_error("benchmark 4 needs its fracture geometry file (" + path.string() + ")");
  }
  s.fracture_file = FractureFileRef{path.string(), 1e-2, 1e-8, 1e-8, true, 0};
  for (const auto& seg : read_fracture_geometry(path)) {
    s.network.fractures.push_back({seg, 1e-2, 1e-8, 1e-8});
  }
  s.bcs = {{1, BcKind::neumann, 0.0, {}},
           {2, BcKind::dirichlet, 0.0, {}},
           {3, BcKind::neumann, 0.0, {}},
           {4, BcKind::dirichlet, 1013250.0, {}}};
  return s;
}

}  // namespace

Scenario builtin_benchmark(std::string_view id,
                           const std::optional<std::filesystem::path>& geometry_file) {
  Scenario s;
  if (id == "1") {
    s = benchmark1();
  } else if (id == "2a") {
    s = benchmark2(1e4, "benchmark2a");
  } else if (id == "2b") {
    s = benchmark2(1e-4, "benchmark2b");
  } else if (id == "3a") {
    s = benchmark3(true);
  } else if (id == "3b") {
    s = benchmark3(false);
  } else if (id == "4") {
    s = benchmark4(geometry_file);
  } else {
    throw Error(ErrorCode::config, "unknown benchmark id '" + std::string(id) + "'");
  }
  s.validate();
  return s;
}

}  // namespace frackbench::scenario
