#pragma once

// Small scenario and path helpers shared by the unit and acceptance tests.

#include "frackbench/mesh.hpp"
#include "frackbench/scenario.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace frackbench::testing {

inline std::filesystem::path test_data(const std::string& name) {
  return std::filesystem::path(FRACKBENCH_TEST_DATA_DIR) / name;
}

inline std::filesystem::path source_data(const std::string& name) {
  return std::filesystem::path(FRACKBENCH_SOURCE_DATA_DIR) / name;
}

inline std::shared_ptr<const mesh::Mesh> share(mesh::Mesh m) {
  return std::make_shared<const mesh::Mesh>(std::move(m));
}

/// Rectangle with every edge Dirichlet at p = a x + b y + c and uniform K.
inline scenario::Scenario linear_patch_scenario(double a, double b, double c,
                                                scenario::Tensor2 k = {},
                                                double width = 1.0, double height = 1.0) {
  scenario::Scenario s;
  s.name = "patch";
  s.domain = {{0, 0}, {width, 0}, {width, height}, {0, height}};
  s.regions.push_back({s.domain, k});
  for (int tag = 1; tag <= 4; ++tag) {
    scenario::BoundaryCondition bc;
    bc.tag = tag;
    bc.kind = scenario::BcKind::dirichlet;
    bc.linear = scenario::LinearFunction{a, b, c};
    s.bcs.push_back(bc);
  }
  return s;
}

/// Unit square, left Dirichlet `left`, right Dirichlet `right`, top and bottom no-flow.
inline scenario::Scenario channel_scenario(double left = 1.0, double right = 0.0) {
  scenario::Scenario s;
  s.name = "channel";
  s.domain = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  s.regions.push_back({s.domain, scenario::Tensor2{}});
  s.bcs.push_back({1, scenario::BcKind::neumann, 0.0, {}});
  s.bcs.push_back({2, scenario::BcKind::dirichlet, right, {}});
  s.bcs.push_back({3, scenario::BcKind::neumann, 0.0, {}});
  s.bcs.push_back({4, scenario::BcKind::dirichlet, left, {}});
  return s;
}

inline scenario::FractureSegment fracture(geometry::Point2 a, geometry::Point2 b,
                                          double aperture = 1e-4, double k = 1e4) {
  return {{a, b}, aperture, k, k};
}

}  // namespace frackbench::testing
