#pragma once

#include "lsssc/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lsssc {

/// Knobs of the ADMM splitting used for every column problem.
struct SolverOptions {
  int max_iterations = 50000;
  double primal_tol = 1e-10;
  double dual_tol = 1e-10;
  double rho = 1.0;
  /// Support is {j : |c_j| > support_threshold * max(1, ||c||_inf)}.
  double support_threshold = 1e-6;
  /// Iterations between incumbent updates / polish attempts.
  int check_interval = 10;
  /// Try the exact reduced KKT solve on the current support and signs.
  bool polish = true;
  /// Random (z, u) start instead of zeros.
  std::optional<std::uint64_t> init_seed;

  void validate() const;
};

/// Solves min ||c||_1 + (lambda/2)||x - A c||^2 and recovers nu = lambda e.
/// Throws InvalidParameter for lambda <= 0 or an empty A, NonConvergence when
/// the iteration budget runs out.
ColumnSolution solve_column(const Vector& x, const Matrix& A, double lambda,
                            const SolverOptions& opts = {});

/// Same as solve_column but with a precomputed Gram matrix A^T A and A^T x.
ColumnSolution solve_column_gram(const Vector& x, const Matrix& A, const Matrix& gram,
                                 const Vector& atx, double lambda, const SolverOptions& opts = {});

/// {j : |c_j| > rel * max(1, ||c||_inf)}.
std::vector<Index> support_of(const Vector& c, double rel);

struct LssscSolution {
  /// N x N, column i holds the representation of x_i, zero diagonal.
  Matrix C;
  std::vector<ColumnSolution> columns;

  /// Sum of the per-column objectives.
  double objective() const;
};

/// All N column problems P(x_i, X_{-i}, lambda), run as an OpenMP parallel
/// map sharing one Gram matrix. Per-column failures are rethrown as
/// ColumnError naming the smallest failing index.
LssscSolution solve_lsssc(const DataMatrix& X, double lambda, const SolverOptions& opts = {});

/// Reference implementation: one column at a time, each with its own
/// materialized X_{-i}. Kept for testing the parallel kernel.
LssscSolution solve_lsssc_serial(const DataMatrix& X, double lambda,
                                 const SolverOptions& opts = {});

/// ||C||_1 + (lambda/2)||XC - X||_F^2 evaluated directly.
double lsssc_objective(const Matrix& X, const Matrix& C, double lambda);

/// X with column i removed.
Matrix drop_column(const Matrix& X, Index i);

/// nu / ||nu||_2 for the solution of P(x, A, lambda). Throws DegenerateDual
/// when nu = 0.
Vector dual_direction(const Vector& x, const Matrix& A, double lambda,
                      const SolverOptions& opts = {});
Vector dual_direction(const ColumnSolution& solution);

struct NoiselessL1Solution {
  Vector c;
  /// Dual optimum of max <y,nu> s.t. ||B^T nu||_inf <= 1, lying in span(B).
  Vector nu;
  double l1_norm = 0.0;
};

/// min ||c||_1 s.t. B c = y, by simplex in span(B) coordinates.
/// Throws Infeasible when y is not in span(B).
NoiselessL1Solution solve_noiseless_l1(const Vector& y, const Matrix& B);

namespace detail {

struct LpResult {
  Vector x;
  Vector dual;
  double objective = 0.0;
};

/// min c^T x s.t. A x = b, x >= 0, A of full row rank. Two-phase tableau
/// simplex with Bland's rule.
LpResult simplex(const Matrix& A, const Vector& b, const Vector& cost);

}  // namespace detail

}  // namespace lsssc
