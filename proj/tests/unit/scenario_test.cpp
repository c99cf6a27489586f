#include "frackbench/ccdfm.hpp"
#include "frackbench/error.hpp"
#include "frackbench/scenario.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace {

using namespace frackbench::scenario;
using frackbench::Error;
using frackbench::ErrorCode;
namespace ft = frackbench::testing;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io;
}

Scenario b4_with_synthetic_geometry() {
  Scenario s = load_scenario(ft::source_data("benchmarks/benchmark4.json"),
                             FractureFilePolicy::allow_missing);
  use_fracture_file(s, ft::test_data("b4_synthetic_fractures.txt"));
  s.validate();
  return s;
}

TEST(ShippedScenarios, Benchmark3HasTwoBlockingFractures) {
  for (const char* name : {"benchmarks/benchmark3a.json", "benchmarks/benchmark3b.json"}) {
    const Scenario s = load_scenario(ft::source_data(name));
    ASSERT_EQ(s.network.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
      const double k = (i == 3 || i == 4) ? 1e-4 : 1e4;
      EXPECT_EQ(s.network[i].k_t, k) << "fracture " << i + 1;
      EXPECT_EQ(s.network[i].k_n, k) << "fracture " << i + 1;
    }
  }
}

TEST(ShippedScenarios, Benchmark4Parameters) {
  const Scenario s = b4_with_synthetic_geometry();
  EXPECT_EQ(s.domain.size(), 4u);
  EXPECT_EQ(s.domain[2].x, 700.0);
  EXPECT_EQ(s.domain[2].y, 600.0);
  const Tensor2 k = s.permeability_at({350, 300});
  EXPECT_EQ(k.xx, 1e-14);
  EXPECT_EQ(k.yy, 1e-14);
  EXPECT_EQ(k.xy, 0.0);
  ASSERT_EQ(s.network.size(), 64u);
  for (const auto& f : s.network.fractures) {
    EXPECT_EQ(f.aperture, 1e-2);
    EXPECT_EQ(f.k_t, 1e-8);
    EXPECT_EQ(f.k_n, 1e-8);
  }
  const int left = s.domain_edge_tag({{0, 0}, {0, 600}});
  const int right = s.domain_edge_tag({{700, 0}, {700, 600}});
  EXPECT_EQ(s.bc_for_tag(left)->kind, BcKind::dirichlet);
  EXPECT_EQ(s.bc_for_tag(left)->value, 1013250.0);
  EXPECT_EQ(s.bc_for_tag(right)->kind, BcKind::dirichlet);
  EXPECT_EQ(s.bc_for_tag(right)->value, 0.0);
}

TEST(ShippedScenarios, Benchmark4WithoutGeometryFileFails) {
  const auto missing = ft::test_data("no_such_fractures.txt");
  EXPECT_EQ(code_of([&] { builtin_benchmark("4", missing); }), ErrorCode::scenario);
  EXPECT_EQ(code_of([&] { load_scenario(ft::source_data("benchmarks/benchmark4.json")); }),
            ErrorCode::scenario);
}

TEST(ShippedScenarios, EmptyNetworkIsValid) {
  Scenario s = ft::channel_scenario();
  EXPECT_NO_THROW(s.validate());
  EXPECT_TRUE(s.network.empty());
  EXPECT_TRUE(s.all_neumann_zero());
}

TEST(Builtin, Benchmark3FirstFractureEndpoints) {
  const Scenario s = builtin_benchmark("3a");
  EXPECT_EQ(s.network[0].geometry.a.x, 0.05);
  EXPECT_EQ(s.network[0].geometry.a.y, 0.416);
  EXPECT_EQ(s.network[0].geometry.b.x, 0.22);
  EXPECT_EQ(s.network[0].geometry.b.y, 0.0624);
}

TEST(Builtin, HydrocoinNode16) {
  const auto& pts = hydrocoin_points();
  ASSERT_TRUE(pts.count("16"));
  EXPECT_NEAR(pts.at("16").x, 1071.34615385, 1e-8);
  EXPECT_NEAR(pts.at("16").y, -566.346153846, 1e-8);
}

TEST(Builtin, Benchmark2VariantsDifferOnlyInFracturePermeability) {
  const Scenario a = builtin_benchmark("2a");
  const Scenario b = builtin_benchmark("2b");
  auto ja = to_json(a);
  auto jb = to_json(b);
  ASSERT_EQ(ja["fractures"].size(), jb["fractures"].size());
  bool differs = false;
  for (std::size_t i = 0; i < ja["fractures"].size(); ++i) {
    differs |= ja["fractures"][i]["k_t"] != jb["fractures"][i]["k_t"];
    for (auto* j : {&ja, &jb}) {
      (*j)["fractures"][i].erase("k_t");
      (*j)["fractures"][i].erase("k_n");
    }
  }
  ja.erase("name");
  jb.erase("name");
  EXPECT_TRUE(differs);
  EXPECT_EQ(ja, jb);
}

TEST(Builtin, ShippedFilesMatchBuiltins) {
  for (const char* id : {"1", "2a", "2b", "3a", "3b"}) {
    SCOPED_TRACE(id);
    const Scenario shipped =
        load_scenario(ft::source_data(std::string("benchmarks/benchmark") + id + ".json"));
    EXPECT_EQ(to_json(shipped), to_json(builtin_benchmark(id)));
  }
}

TEST(Builtin, UnknownIdIsAConfigError) {
  EXPECT_EQ(code_of([] { builtin_benchmark("7"); }), ErrorCode::config);
}

TEST(RoundTrip, ShippedScenariosReserializeIdentically) {
  for (const char* name : {"benchmark1", "benchmark2a", "benchmark2b", "benchmark3a",
                           "benchmark3b", "benchmark4"}) {
    SCOPED_TRACE(name);
    const auto path = ft::source_data(std::string("benchmarks/") + name + ".json");
    std::ifstream in(path);
    const auto original = nlohmann::json::parse(in);
    const Scenario s = parse_scenario(original, path.parent_path(), FractureFilePolicy::allow_missing);
    if (s.network.size() > 0 || !s.fracture_file) s.validate();
    const auto first = to_json(s);
    EXPECT_EQ(first, original);
    const Scenario again = parse_scenario(first, path.parent_path(), FractureFilePolicy::allow_missing);
    const auto second = to_json(again);
    // nlohmann prints doubles with 17 significant digits.
    EXPECT_EQ(first.dump(), second.dump());
  }
}

TEST(Validation, ViolatedInvariantsAreScenarioErrors) {
  {
    Scenario s = ft::channel_scenario();
    s.regions[0].K = Tensor2{1.0, 2.0, 1.0};
    EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::scenario);
  }
  {
    Scenario s = ft::channel_scenario();
    s.bcs.pop_back();
    EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::scenario);
  }
  {
    Scenario s = ft::channel_scenario();
    for (auto& bc : s.bcs) bc.kind = BcKind::neumann;
    EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::scenario);
  }
  {
    Scenario s = ft::channel_scenario();
    s.network.fractures.push_back(ft::fracture({0.5, 0.5}, {1.5, 0.5}));
    EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::scenario);
  }
  {
    Scenario s = ft::channel_scenario();
    s.network.fractures.push_back(ft::fracture({0.2, 0.5}, {0.8, 0.5}, 0.0));
    EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::scenario);
  }
  {
    Scenario s = ft::channel_scenario();
    std::reverse(s.domain.begin(), s.domain.end());
    EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::scenario);
  }
}

TEST(Validation, MalformedJsonFields) {
  auto doc = to_json(ft::channel_scenario());
  doc["bcs"][0]["kind"] = "robin";
  EXPECT_EQ(code_of([&] { parse_scenario(doc); }), ErrorCode::scenario);
  doc = to_json(ft::channel_scenario());
  doc["regions"][0]["K"] = {{1.0, 0.5}, {0.0, 1.0}};
  EXPECT_EQ(code_of([&] { parse_scenario(doc); }), ErrorCode::scenario);
}

TEST(FractureFile, ParsesWhitespaceAndCommaSeparatedLines) {
  const auto path = std::filesystem::temp_directory_path() / "frackbench_fractures_test.txt";
  {
    std::ofstream out(path);
    out << "# comment\n1 2 3 4\n5,6,7,8\n\n";
  }
  const auto segs = read_fracture_geometry(path);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[1].a.x, 5.0);
  EXPECT_EQ(segs[1].b.y, 8.0);
  {
    std::ofstream out(path);
    out << "1 2 3\n";
  }
  EXPECT_EQ(code_of([&] { read_fracture_geometry(path); }), ErrorCode::scenario);
  std::filesystem::remove(path);
}

TEST(Queries, PermeabilityEdgeTagsAndDirichletRange) {
  const Scenario s = builtin_benchmark("1");
  const auto [lo, hi] = s.dirichlet_range();
  EXPECT_NEAR(lo, 100.0, 1e-9);
  EXPECT_NEAR(hi, 150.0, 1e-9);
  const Scenario c = ft::channel_scenario(3.0, -2.0);
  EXPECT_EQ(c.dirichlet_range(), std::make_pair(-2.0, 3.0));
  EXPECT_EQ(c.domain_edge_tag({{0.2, 0.0}, {0.4, 0.0}}), 1);
  EXPECT_EQ(c.domain_edge_tag({{0.0, 0.4}, {0.0, 0.2}}), 4);
  EXPECT_EQ(c.domain_edge_tag({{0.2, 0.2}, {0.4, 0.2}}), 0);
  EXPECT_NEAR(c.domain_area(), 1.0, 1e-15);
}

TEST(Linearity, ScalingDirichletDataScalesThePressure) {
  Scenario s = builtin_benchmark("3a");
  auto mesh = ft::share(frackbench::mesh::read_mesh(ft::source_data("meshes/b3_tri.fvmesh")));
  frackbench::ccdfm::Options options;
  options.settings.compute_stats = false;
  const auto base = frackbench::ccdfm::assemble_and_solve(s, mesh, options);
  const double c = 7.25;
  for (auto& bc : s.bcs) bc.value *= c;
  const auto scaled = frackbench::ccdfm::assemble_and_solve(s, mesh, options);
  ASSERT_EQ(base.matrix_pressure.size(), scaled.matrix_pressure.size());
  for (std::size_t i = 0; i < base.matrix_pressure.size(); ++i) {
    EXPECT_NEAR(scaled.matrix_pressure[i], c * base.matrix_pressure[i], 1e-10 * c);
  }
  for (std::size_t i = 0; i < base.fracture_pressure.size(); ++i) {
    EXPECT_NEAR(scaled.fracture_pressure[i], c * base.fracture_pressure[i], 1e-10 * c);
  }
  auto argmax = [](const std::vector<double>& v) {
    return std::max_element(v.begin(), v.end()) - v.begin();
  };
  auto argmin = [](const std::vector<double>& v) {
    return std::min_element(v.begin(), v.end()) - v.begin();
  };
  EXPECT_EQ(argmax(base.matrix_pressure), argmax(scaled.matrix_pressure));
  EXPECT_EQ(argmin(base.matrix_pressure), argmin(scaled.matrix_pressure));
}

}  // namespace
