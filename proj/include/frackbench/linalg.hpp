#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace frackbench::linalg {

using Index = std::size_t;

/// Square matrix in compressed row storage, columns sorted within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index n, std::vector<Index> row_ptr, std::vector<Index> cols,
               std::vector<double> values);

  [[nodiscard]] Index size() const noexcept { return n_; }
  [[nodiscard]] Index nnz() const noexcept { return values_.size(); }
  [[nodiscard]] const std::vector<Index>& row_ptr() const noexcept { return row_ptr_; }
  [[nodiscard]] const std::vector<Index>& cols() const noexcept { return cols_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

  /// Entry (i, j), zero when not stored.
  [[nodiscard]] double at(Index i, Index j) const;
  [[nodiscard]] std::vector<double> diagonal() const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
  /// Structure and values symmetric to exact bit equality.
  [[nodiscard]] bool is_symmetric() const;

 private:
  Index n_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
};

/// Coordinate-format accumulator. Duplicates are summed in insertion order, so entries
/// added as symmetric pairs produce a bit-exactly symmetric matrix; exact zeros are dropped.
class TripletBuilder {
 public:
  explicit TripletBuilder(Index n) : n_(n) {}
  void add(Index i, Index j, double v);
  /// Adds t to (i,i) and (j,j) and -t to (i,j) and (j,i).
  void add_connection(Index i, Index j, double t);
  [[nodiscard]] SparseMatrix build() const;
  [[nodiscard]] Index size() const noexcept { return n_; }

 private:
  struct Entry {
    Index row;
    Index col;
    double value;
  };
  Index n_;
  std::vector<Entry> entries_;
};

enum class EntityKind { matrix_cell, fracture_cell, intersection_cell };

/// Physical entity behind an unknown.
struct Entity {
  EntityKind kind = EntityKind::matrix_cell;
  Index index = 0;
};

struct SparseSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::vector<Entity> entities;

  [[nodiscard]] Index dimension() const noexcept { return matrix.size(); }
};

/// Sparse LDL^T factorization of an SPD matrix (fill-reducing ordering). Throws
/// Error(solver) naming the row of the first non-positive pivot.
class SpdFactorization {
 public:
  explicit SpdFactorization(const SparseMatrix& a);
  ~SpdFactorization();
  SpdFactorization(SpdFactorization&&) noexcept;
  SpdFactorization& operator=(SpdFactorization&&) noexcept;

  [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class Preconditioner { none, jacobi };

struct CgResult {
  Index iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients, starting from the contents of x. Throws
/// Error(solver) on a non-positive curvature direction.
CgResult conjugate_gradient(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                            double rel_tol, Index max_iterations,
                            Preconditioner preconditioner = Preconditioner::jacobi);

enum class SolveMethod { direct, cg };

struct SolveOptions {
  SolveMethod method = SolveMethod::direct;
  double residual_tolerance = 1e-10;
  double cg_tolerance = 1e-12;
  Index cg_max_iterations = 0;  ///< 0 selects 10 n
  int refinement_steps = 2;     ///< iterative refinement steps after a direct solve
};

struct SolveReport {
  SolveMethod method = SolveMethod::direct;
  bool refined_with_cg = false;
  Index cg_iterations = 0;
  double relative_residual = 0.0;
};

/// Solves the SPD system to relative residual ||Ax-b||/||b|| <= residual_tolerance.
/// The direct path falls back to CG refinement when the factorization residual is too
/// large.
std::vector<double> solve(const SparseSystem& system, const SolveOptions& options = {},
                          SolveReport* report = nullptr);

/// Writes b - A x for the caller's own (exact) form of the operator.
using ExtendedResidual =
    std::function<void(std::span<const long double> x, std::span<long double> r)>;

/// Like solve(), then iterative refinement in extended precision: residuals come from
/// the callback and corrections accumulate in long double until the residual stops
/// shrinking. The report describes the rounded double solution.
std::vector<long double> solve_extended(const SparseSystem& system, const ExtendedResidual& residual,
                                        const SolveOptions& options = {},
                                        SolveReport* report = nullptr);

double relative_residual(const SparseMatrix& a, std::span<const double> x,
                         std::span<const double> b);

struct EigenEstimate {
  double value = 0.0;
  Index iterations = 0;
  bool converged = false;
};

struct MatrixStats {
  Index dimension = 0;
  Index nnz = 0;
  double nnz_density = 0.0;
  double cond2_estimate = 0.0;
  EigenEstimate lambda_max;
  EigenEstimate lambda_min;
  /// True when either eigenvalue iteration stopped before converging; the estimate is
  /// then only a lower bound of the condition number.
  bool lower_bound = false;
};

struct StatsOptions {
  double relative_tolerance = 1e-4;
  Index max_iterations = 5000;
  unsigned seed = 12345;
};

/// nnz/n^2 and the 2-norm condition number lambda_max/lambda_min of an SPD matrix, from
/// power iteration and inverse power iteration.
MatrixStats matrix_stats(const SparseMatrix& a, const StatsOptions& options = {});

/// MatrixMarket coordinate format ("general", all stored entries, 1-based indices).
void write_matrix_market(std::ostream& out, const SparseMatrix& a);

}  // namespace frackbench::linalg
