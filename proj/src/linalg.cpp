#include "frackbench/linalg.hpp"

#include "frackbench/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace frackbench::linalg {

namespace {

[[noreturn]] void solver_error(const std::string& msg) { throw Error(ErrorCode::solver, msg); }

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

SparseMatrix::SparseMatrix(Index n, std::vector<Index> row_ptr, std::vector<Index> cols,
                           std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
  if (row_ptr_.size() != n_ + 1 || cols_.size() != values_.size() || row_ptr_.back() != cols_.size()) {
    solver_error("inconsistent compressed row storage");
  }
}

double SparseMatrix::at(Index i, Index j) const {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (Index i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (Index i = 0; i < n_; ++i) {
    double s = 0.0;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

bool SparseMatrix::is_symmetric() const {
  for (Index i = 0; i < n_; ++i) {
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const Index j = cols_[k];
      const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j]);
      const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j + 1]);
      const auto it = std::lower_bound(first, last, i);
      if (it == last || *it != i) return false;
      if (values_[static_cast<std::size_t>(it - cols_.begin())] != values_[k]) return false;
    }
  }
  return true;
}

void TripletBuilder::add(Index i, Index j, double v) {
  if (i >= n_ || j >= n_) solver_error("triplet index out of range");
  entries_.push_back({i, j, v});
}

void TripletBuilder::add_connection(Index i, Index j, double t) {
  add(i, i, t);
  add(j, j, t);
  add(i, j, -t);
  add(j, i, -t);
}

SparseMatrix TripletBuilder::build() const {
  std::vector<Index> order(entries_.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [this](Index a, Index b) {
    const Entry& ea = entries_[a];
    const Entry& eb = entries_[b];
    return ea.row != eb.row ? ea.row < eb.row : ea.col < eb.col;
  });
  std::vector<Index> row_ptr(n_ + 1, 0);
  std::vector<Index> cols;
  std::vector<double> values;
  cols.reserve(entries_.size() / 2);
  values.reserve(entries_.size() / 2);
  std::size_t k = 0;
  while (k < order.size()) {
    const Entry& first = entries_[order[k]];
    double sum = 0.0;
    std::size_t m = k;
    while (m < order.size() && entries_[order[m]].row == first.row &&
           entries_[order[m]].col == first.col) {
      sum += entries_[order[m]].value;
      ++m;
    }
    if (sum != 0.0) {
      cols.push_back(first.col);
      values.push_back(sum);
      ++row_ptr[first.row + 1];
    }
    k = m;
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return SparseMatrix(n_, std::move(row_ptr), std::move(cols), std::move(values));
}

// ---------------------------------------------------------------------------

struct SpdFactorization::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

SpdFactorization::SpdFactorization(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  const Index n = a.size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(a.nnz());
  for (Index i = 0; i < n; ++i) {
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(a.cols()[k]), a.values()[k]);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<int>(n), static_cast<int>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  impl_->ldlt.compute(m);

  // Map the first non-positive pivot back to the original row numbering.
  const auto d = impl_->ldlt.vectorD();
  const auto& perm = impl_->ldlt.permutationP().indices();
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (d[k] > 0.0 && std::isfinite(d[k])) continue;
    Eigen::Index row = k;
    for (Eigen::Index i = 0; i < perm.size(); ++i) {
      if (perm[i] == k) {
        row = i;
        break;
      }
    }
    std::ostringstream msg;
    msg << "matrix is not positive definite: pivot " << d[k] << " at row " << row;
    solver_error(msg.str());
  }
  if (impl_->ldlt.info() != Eigen::Success) solver_error("sparse factorization failed");
}

SpdFactorization::~SpdFactorization() = default;
SpdFactorization::SpdFactorization(SpdFactorization&&) noexcept = default;
SpdFactorization& SpdFactorization::operator=(SpdFactorization&&) noexcept = default;

std::vector<double> SpdFactorization::solve(std::span<const double> b) const {
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd x = impl_->ldlt.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

// ---------------------------------------------------------------------------

CgResult conjugate_gradient(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                            double rel_tol, Index max_iterations, Preconditioner preconditioner) {
  const Index n = a.size();
  std::vector<double> inv_diag(n, 1.0);
  if (preconditioner == Preconditioner::jacobi) {
    const auto d = a.diagonal();
    for (Index i = 0; i < n; ++i) {
      if (!(d[i] > 0.0)) {
        solver_error("jacobi preconditioner: non-positive diagonal at row " + std::to_string(i));
      }
      inv_diag[i] = 1.0 / d[i];
    }
  }
  CgResult result;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(x, r);
  for (Index i = 0; i < n; ++i) r[i] = b[i] - r[i];
  for (Index i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  result.relative_residual = norm2(r) / bnorm;
  while (result.relative_residual > rel_tol && result.iterations < max_iterations) {
    a.multiply(p, q);
    const double curvature = dot(p, q);
    if (!(curvature > 0.0)) {
      std::ostringstream msg;
      msg << "conjugate gradients broke down: non-positive curvature p^T A p = " << curvature
          << " at iteration " << result.iterations;
      solver_error(msg.str());
    }
    const double alpha = rz / curvature;
    for (Index i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    for (Index i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (Index i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++result.iterations;
    result.relative_residual = norm2(r) / bnorm;
  }
  // Report the true residual rather than the recursively updated one.
  a.multiply(x, q);
  for (Index i = 0; i < n; ++i) q[i] = b[i] - q[i];
  result.relative_residual = norm2(q) / bnorm;
  result.converged = result.relative_residual <= rel_tol;
  return result;
}

std::vector<long double> solve_extended(const SparseSystem& system, const ExtendedResidual& residual,
                                        const SolveOptions& options, SolveReport* report) {
  const auto& a = system.matrix;
  const Index n = a.size();
  if (system.rhs.size() != n) solver_error("rhs size does not match matrix dimension");
  SolveReport rep;
  rep.method = options.method;
  std::vector<long double> x(n, 0.0L);
  if (n == 0) {
    if (report) *report = rep;
    return x;
  }
  const Index max_it = options.cg_max_iterations == 0 ? 10 * n : options.cg_max_iterations;
  std::optional<SpdFactorization> factor;
  if (options.method == SolveMethod::direct) factor.emplace(a);
  const auto correction = [&](std::span<const double> r) {
    if (factor) return factor->solve(r);
    std::vector<double> dx(n, 0.0);
    const auto cg = conjugate_gradient(a, r, dx, options.cg_tolerance, max_it);
    rep.cg_iterations += cg.iterations;
    return dx;
  };

  std::vector<long double> r(n);
  std::vector<double> rd(n);
  std::vector<long double> best = x;
  long double best_norm = std::numeric_limits<long double>::infinity();
  const int max_steps = std::max(options.refinement_steps, 8);
  for (int step = 0; step <= max_steps; ++step) {
    residual(x, r);
    long double norm = 0.0L;
    for (Index i = 0; i < n; ++i) norm += r[i] * r[i];
    norm = std::sqrt(norm);
    const bool stalled = !(norm < 0.5L * best_norm);
    if (norm < best_norm) {
      best = x;
      best_norm = norm;
    }
    if (norm == 0.0L || step == max_steps || (stalled && step > options.refinement_steps)) break;
    for (Index i = 0; i < n; ++i) rd[i] = static_cast<double>(r[i]);
    const auto dx = correction(rd);
    for (Index i = 0; i < n; ++i) x[i] += dx[i];
  }
  x = std::move(best);

  std::vector<double> xd(x.begin(), x.end());
  rep.relative_residual = relative_residual(a, xd, system.rhs);
  if (rep.relative_residual > options.residual_tolerance && factor) {
    const auto cg = conjugate_gradient(a, system.rhs, xd, options.cg_tolerance, max_it);
    rep.refined_with_cg = true;
    rep.cg_iterations += cg.iterations;
    rep.relative_residual = cg.relative_residual;
    x.assign(xd.begin(), xd.end());
  }
  if (report) *report = rep;
  if (!(rep.relative_residual <= options.residual_tolerance)) {
    std::ostringstream msg;
    msg << "linear solve did not reach the residual tolerance: " << rep.relative_residual;
    solver_error(msg.str());
  }
  return x;
}

double relative_residual(const SparseMatrix& a, std::span<const double> x,
                         std::span<const double> b) {
  std::vector<double> r = a.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double bnorm = norm2(b);
  return bnorm == 0.0 ? norm2(r) : norm2(r) / bnorm;
}

std::vector<double> solve(const SparseSystem& system, const SolveOptions& options,
                          SolveReport* report) {
  const auto& a = system.matrix;
  const Index n = a.size();
  if (system.rhs.size() != n) solver_error("rhs size does not match matrix dimension");
  const Index max_it = options.cg_max_iterations == 0 ? 10 * n : options.cg_max_iterations;
  SolveReport rep;
  rep.method = options.method;
  std::vector<double> x(n, 0.0);
  if (n == 0) {
    if (report) *report = rep;
    return x;
  }

  if (options.method == SolveMethod::direct) {
    const SpdFactorization factor(a);
    x = factor.solve(system.rhs);
    // A few steps of iterative refinement with the same factors.
    std::vector<double> r(n);
    for (int step = 0; step < options.refinement_steps; ++step) {
      a.multiply(x, r);
      for (Index i = 0; i < n; ++i) r[i] = system.rhs[i] - r[i];
      const auto dx = factor.solve(r);
      for (Index i = 0; i < n; ++i) x[i] += dx[i];
    }
    rep.relative_residual = relative_residual(a, x, system.rhs);
    if (rep.relative_residual > options.residual_tolerance) {
      const auto cg = conjugate_gradient(a, system.rhs, x, options.cg_tolerance, max_it);
      rep.refined_with_cg = true;
      rep.cg_iterations = cg.iterations;
      rep.relative_residual = cg.relative_residual;
    }
  } else {
    const auto cg = conjugate_gradient(a, system.rhs, x, options.cg_tolerance, max_it);
    rep.cg_iterations = cg.iterations;
    rep.relative_residual = cg.relative_residual;
  }
  if (report) *report = rep;
  if (!(rep.relative_residual <= options.residual_tolerance)) {
    std::ostringstream msg;
    msg << "linear solve did not reach the residual tolerance: " << rep.relative_residual;
    solver_error(msg.str());
  }
  return x;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Apply>
EigenEstimate rayleigh_iteration(Index n, Apply&& apply, const StatsOptions& options) {
  std::mt19937 rng(options.seed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  std::vector<double> v(n), w(n);
  for (auto& x : v) x = dist(rng);
  double nv = norm2(v);
  for (auto& x : v) x /= nv;

  EigenEstimate est;
  double previous = 0.0;
  for (Index it = 1; it <= options.max_iterations; ++it) {
    apply(v, w);
    const double rq = dot(v, w);
    est.value = rq;
    est.iterations = it;
    if (it > 1 && std::abs(rq - previous) <= options.relative_tolerance * std::abs(rq)) {
      est.converged = true;
      break;
    }
    previous = rq;
    const double nw = norm2(w);
    if (nw == 0.0) break;
    for (Index i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  return est;
}

}  // namespace

MatrixStats matrix_stats(const SparseMatrix& a, const StatsOptions& options) {
  MatrixStats stats;
  const Index n = a.size();
  stats.dimension = n;
  stats.nnz = a.nnz();
  if (n == 0) return stats;
  stats.nnz_density = static_cast<double>(a.nnz()) / (static_cast<double>(n) * static_cast<double>(n));

  stats.lambda_max = rayleigh_iteration(
      n, [&](std::span<const double> v, std::span<double> w) { a.multiply(v, w); }, options);

  const SpdFactorization factor(a);
  const EigenEstimate inv = rayleigh_iteration(
      n,
      [&](std::span<const double> v, std::span<double> w) {
        const auto x = factor.solve(v);
        std::copy(x.begin(), x.end(), w.begin());
      },
      options);
  stats.lambda_min = inv;
  stats.lambda_min.value = 1.0 / inv.value;

  stats.cond2_estimate = stats.lambda_max.value / stats.lambda_min.value;
  stats.lower_bound = !stats.lambda_max.converged || !stats.lambda_min.converged;
  return stats;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  const auto old_precision = out.precision(17);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.size() << ' ' << a.size() << ' ' << a.nnz() << '\n';
  for (Index i = 0; i < a.size(); ++i) {
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      out << i + 1 << ' ' << a.cols()[k] + 1 << ' ' << a.values()[k] << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace frackbench::linalg
