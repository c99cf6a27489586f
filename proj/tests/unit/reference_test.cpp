#include "frackbench/error.hpp"
#include "frackbench/postproc.hpp"
#include "frackbench/reference.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace {

using namespace frackbench::reference;
using frackbench::Error;
using frackbench::ErrorCode;
namespace ft = frackbench::testing;
namespace fm = frackbench::mesh;
namespace fs = frackbench::scenario;

frackbench::flow::SolveSettings no_stats() {
  frackbench::flow::SolveSettings s;
  s.compute_stats = false;
  return s;
}

std::set<double> x_lines(const fm::Mesh& m) {
  std::set<double> xs;
  for (const auto& v : m.vertices()) xs.insert(v.x);
  return xs;
}

TEST(GradedLines, UniformWhenTheCapBinds) {
  const auto lines = graded_lines({{0.0, 0.1}, {1.0, 0.1}}, 1.3, 0.1);
  ASSERT_EQ(lines.size(), 11u);
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_NEAR(lines[i] - lines[i - 1], 0.1, 1e-12);
}

TEST(GradedLines, GrowsAwayFromFineBreakpoints) {
  const auto lines = graded_lines({{0.0, 0.05}, {0.5, 1e-4}, {1.0, 0.05}}, 1.3, 0.05);
  EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end()));
  EXPECT_EQ(lines.front(), 0.0);
  EXPECT_EQ(lines.back(), 1.0);
  const auto mid = std::find(lines.begin(), lines.end(), 0.5);
  ASSERT_NE(mid, lines.end());
  EXPECT_NEAR(*(mid + 1) - *mid, 1e-4, 1e-15);
  EXPECT_NEAR(*mid - *(mid - 1), 1e-4, 1e-15);
  EXPECT_NEAR(*(mid + 2) - *(mid + 1), 1.3e-4, 1e-15);
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_LE(lines[i] - lines[i - 1], 1.5 * 0.05);
}

TEST(GradedLines, RejectsBadInput) {
  EXPECT_THROW(graded_lines({{0.0, 0.1}}, 1.3, 0.1), Error);
  EXPECT_THROW(graded_lines({{0.0, 0.1}, {1.0, 0.1}}, 0.5, 0.1), Error);
}

TEST(Grid, Benchmark2StripsAreResolved) {
  const auto s = fs::builtin_benchmark("2a");
  const auto grid = build_equidimensional_grid(s, {});
  const auto xs = x_lines(grid);
  EXPECT_TRUE(xs.count(0.5 - 5e-5));
  EXPECT_TRUE(xs.count(0.5 + 5e-5));
  const auto inside = std::count_if(xs.begin(), xs.end(), [](double x) {
    return x > 0.5 - 5e-5 + 1e-12 && x < 0.5 + 5e-5 - 1e-12;
  });
  EXPECT_EQ(inside, 9);  // 10 cells across
  EXPECT_GE(grid.num_cells(), 100000u);
}

TEST(Grid, NoFracturesGivesPlainGrid) {
  auto s = ft::channel_scenario();
  GridOptions options;
  options.max_cell_size = 0.125;
  const auto grid = build_equidimensional_grid(s, options);
  EXPECT_EQ(grid.num_cells(), 64u);
  EXPECT_NEAR(grid.total_area(), 1.0, 1e-12);
}

TEST(Grid, SingleCellStripsStillConform) {
  auto s = ft::channel_scenario();
  s.network.fractures.push_back(ft::fracture({0.5, 0.0}, {0.5, 1.0}));
  s.network.fractures.push_back(ft::fracture({0.0, 0.3}, {0.5, 0.3}));
  GridOptions options;
  options.cells_across = 1;
  const auto grid = build_equidimensional_grid(s, options);
  const auto xs = x_lines(grid);
  const auto inside = std::count_if(xs.begin(), xs.end(), [](double x) {
    return x > 0.5 - 5e-5 + 1e-12 && x < 0.5 + 5e-5 - 1e-12;
  });
  // Only the line through the abutting fracture's end splits the strip.
  EXPECT_EQ(inside, 1);
  EXPECT_TRUE(xs.count(0.5));
  EXPECT_TRUE(xs.count(0.5 - 5e-5));
  EXPECT_TRUE(xs.count(0.5 + 5e-5));
  std::set<double> ys;
  for (const auto& v : grid.vertices()) ys.insert(v.y);
  const auto across = std::count_if(ys.begin(), ys.end(), [](double y) {
    return y > 0.3 - 5e-5 + 1e-12 && y < 0.3 + 5e-5 - 1e-12;
  });
  EXPECT_EQ(across, 0);
  EXPECT_NEAR(grid.total_area(), 1.0, 1e-12);
}

TEST(Grid, SlantedFracturesAreRejected) {
  try {
    build_equidimensional_grid(fs::builtin_benchmark("3a"), {});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::scenario);
  }
}

TEST(Grid, StripVolumeEqualsApertureTimesLength) {
  auto s = ft::channel_scenario();
  s.network.fractures.push_back(ft::fracture({0.2, 0.3}, {0.7, 0.3}, 2e-3));
  s.network.fractures.push_back(ft::fracture({0.55, 0.45}, {0.55, 0.95}, 1e-3));
  GridOptions options;
  options.cells_across = 4;
  const auto grid = build_equidimensional_grid(s, options);
  std::vector<int> strip_of;
  const auto k = strip_permeability(s, grid, &strip_of);
  ASSERT_EQ(k.size(), grid.num_cells());
  std::vector<double> volume(2, 0.0);
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    if (strip_of[c] >= 0) volume[strip_of[c]] += grid.cell_area(c);
  }
  EXPECT_NEAR(volume[0], 2e-3 * 0.5, 1e-12 * 1e-3);
  EXPECT_NEAR(volume[1], 1e-3 * 0.5, 1e-12 * 5e-4);
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    if (strip_of[c] == 0) {
      EXPECT_EQ(k[c].xx, 1e4);
      EXPECT_EQ(k[c].yy, 1e4);
    }
  }
}

TEST(Solve, PatchTest) {
  auto s = ft::linear_patch_scenario(2.0, -1.0, 0.5);
  GridOptions options;
  options.max_cell_size = 0.1;
  auto grid = ft::share(build_equidimensional_grid(s, options));
  const auto f = solve_reference(s, grid, no_stats());
  for (std::size_t c = 0; c < grid->num_cells(); ++c) {
    const auto x = grid->cell_centroid(c);
    EXPECT_NEAR(f.matrix_pressure[c], 2.0 * x.x - x.y + 0.5, 1e-12);
  }
}

TEST(Solve, BlockingStripsShowADiscontinuity) {
  const auto s = fs::builtin_benchmark("2b");
  GridOptions options;
  options.cells_across = 4;
  auto grid = ft::share(build_equidimensional_grid(s, options));
  const auto f = solve_reference(s, grid, no_stats());
  EXPECT_LE(f.max_relative_conservation_residual(), 1e-10);
  EXPECT_LE(f.relative_global_imbalance(), 1e-10);
  const auto [lo, hi] = std::minmax_element(f.matrix_pressure.begin(), f.matrix_pressure.end());
  const frackbench::postproc::CellLocator locator(*grid);
  const auto left = locator.locate({0.5 - 2e-4, 0.3});
  const auto right = locator.locate({0.5 + 2e-4, 0.3});
  ASSERT_TRUE(left && right);
  EXPECT_GT(std::abs(f.matrix_pressure[*left] - f.matrix_pressure[*right]), 0.1 * (*hi - *lo));
}

TEST(Refine, HalvesEveryCell) {
  const auto grid = fm::build_tensor_mesh(std::vector<double>{0, 0.3, 1},
                                          std::vector<double>{0, 0.5, 0.6, 1});
  const auto fine = refine_tensor_grid(grid);
  EXPECT_EQ(fine.num_cells(), 4 * grid.num_cells());
  EXPECT_NEAR(fine.total_area(), 1.0, 1e-15);
  EXPECT_TRUE(x_lines(fine).count(0.15));
}

TEST(FieldFile, RoundTripIsExact) {
  const auto s = fs::builtin_benchmark("2a");
  GridOptions options;
  options.cells_across = 1;
  options.max_cell_size = 1.0 / 16;
  auto grid = ft::share(build_equidimensional_grid(s, options));
  const auto field = to_reference_field(solve_reference(s, grid, no_stats()));
  std::stringstream io;
  write_reference_field(io, field);
  const auto back = read_reference_field(io);
  EXPECT_EQ(back.cell_pressures, field.cell_pressures);
  EXPECT_EQ(back.mesh->num_cells(), field.mesh->num_cells());
  EXPECT_EQ(back.mesh->vertices(), field.mesh->vertices());
  EXPECT_EQ(back.metadata, field.metadata);
  EXPECT_FALSE(back.is_hybrid());
  EXPECT_DOUBLE_EQ(back.pressure_range(), field.pressure_range());
}

TEST(FieldFile, HybridFieldKeepsFractureCells) {
  ReferenceField field;
  field.mesh = ft::share(fm::build_structured_quads({}, 2, 2));
  field.cell_pressures = {1, 2, 3, 4};
  field.fracture_cells.push_back({0, {{0, 0.5}, {0.5, 0.5}}, 1e-4, 2});
  field.fracture_pressures = {2.5};
  std::stringstream io;
  write_reference_field(io, field);
  const auto back = read_reference_field(io);
  ASSERT_TRUE(back.is_hybrid());
  EXPECT_EQ(back.fracture_pressures, field.fracture_pressures);
  EXPECT_EQ(back.fracture_cells[0].segment.b.x, 0.5);
  EXPECT_EQ(back.fracture_cells[0].aperture, 1e-4);
  EXPECT_DOUBLE_EQ(back.pressure_range(), 3.0);
}

TEST(FieldFile, MalformedInputIsAnIoError) {
  std::istringstream in("fvmesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 2\n");
  try {
    read_reference_field(in);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
}

}  // namespace
