#include "lsssc/solver.hpp"

#include "lsssc/errors.hpp"
#include "lsssc/rng.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>

namespace lsssc {

void SolverOptions::validate() const {
  if (max_iterations < 1) throw InvalidParameter("max_iterations must be >= 1");
  if (!(primal_tol > 0.0) || !(dual_tol > 0.0)) throw InvalidParameter("tolerances must be > 0");
  if (!(rho > 0.0)) throw InvalidParameter("penalty rho must be > 0");
  if (!(support_threshold > 0.0)) throw InvalidParameter("support threshold must be > 0");
  if (check_interval < 1) throw InvalidParameter("check_interval must be >= 1");
}

std::vector<Index> support_of(const Vector& c, double rel) {
  std::vector<Index> s;
  if (c.size() == 0) return s;
  const double cutoff = rel * std::max(1.0, c.cwiseAbs().maxCoeff());
  for (Index j = 0; j < c.size(); ++j) {
    if (std::abs(c(j)) > cutoff) s.push_back(j);
  }
  return s;
}

namespace {

// Off-support dual slack accepted from the reduced KKT solve.
constexpr double kPolishSlack = 1e-10;

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

struct Polished {
  bool ok = false;
  Vector c;
};

// Relative size below which an entry of z is treated as splitting dust.
constexpr double kDust = 1e-6;

// Accepts c only if it satisfies the full KKT system to polish precision.
bool satisfies_kkt(const Vector& c, const Matrix& gram, const Vector& atx, double lambda) {
  const Vector grad = lambda * (atx - gram * c);
  for (Index j = 0; j < c.size(); ++j) {
    if (c(j) != 0.0) {
      if (std::abs(grad(j) - (c(j) > 0.0 ? 1.0 : -1.0)) > 1e-9) return false;
    } else if (std::abs(grad(j)) > 1.0 + kPolishSlack) {
      return false;
    }
  }
  return true;
}

// Exact solve of the KKT system with support S and the given signs. Entries
// whose sign flips are dropped and the system is solved again.
Polished polish_on(std::vector<Index> S, const Vector& sign_of, const Matrix& gram,
                   const Vector& atx, double lambda) {
  const Index k = gram.rows();
  Polished out;
  while (true) {
    out.c = Vector::Zero(k);
    const Index s = static_cast<Index>(S.size());
    if (s > 0) {
      Matrix H(s, s);
      Vector rhs(s);
      for (Index a = 0; a < s; ++a) {
        rhs(a) = lambda * atx(S[a]) - sign_of(S[a]);
        for (Index b = 0; b < s; ++b) H(a, b) = lambda * gram(S[a], S[b]);
      }
      Eigen::LLT<Matrix> llt(H);
      Vector cs = llt.info() == Eigen::Success ? Vector(llt.solve(rhs))
                                                : Vector(H.completeOrthogonalDecomposition().solve(rhs));
      if (!cs.allFinite()) return out;
      std::vector<Index> kept;
      for (Index a = 0; a < s; ++a) {
        if (cs(a) * sign_of(S[a]) > 0.0) kept.push_back(S[a]);
      }
      if (kept.size() < S.size()) {
        S = std::move(kept);
        continue;
      }
      for (Index a = 0; a < s; ++a) out.c(S[a]) = cs(a);
    }
    out.ok = satisfies_kkt(out.c, gram, atx, lambda);
    return out;
  }
}

// Polish on the support and signs of z, then on z without its dust.
Polished try_polish(const Vector& z, const Matrix& gram, const Vector& atx, double lambda) {
  const Index k = z.size();
  Vector sign_of(k);
  for (Index j = 0; j < k; ++j) sign_of(j) = z(j) > 0.0 ? 1.0 : (z(j) < 0.0 ? -1.0 : 0.0);
  std::vector<Index> S;
  std::vector<Index> trimmed;
  const double cutoff = kDust * z.cwiseAbs().maxCoeff();
  for (Index j = 0; j < k; ++j) {
    if (z(j) != 0.0) S.push_back(j);
    if (std::abs(z(j)) > cutoff) trimmed.push_back(j);
  }
  Polished p = polish_on(S, sign_of, gram, atx, lambda);
  if (p.ok || trimmed.size() == S.size()) return p;
  return polish_on(trimmed, sign_of, gram, atx, lambda);
}

double objective_of(const Vector& x, const Matrix& A, const Vector& c, double lambda) {
  const Vector e = x - A * c;
  return c.lpNorm<1>() + 0.5 * lambda * e.squaredNorm();
}

ColumnSolution finish(const Vector& x, const Matrix& A, Vector c, double lambda,
                      const SolverOptions& opts) {
  ColumnSolution sol;
  sol.lambda = lambda;
  sol.e = x - A * c;
  sol.nu = lambda * sol.e;
  sol.objective = c.lpNorm<1>() + 0.5 * lambda * sol.e.squaredNorm();
  sol.support = support_of(c, opts.support_threshold);
  sol.c = std::move(c);
  return sol;
}

}  // namespace

ColumnSolution solve_column_gram(const Vector& x, const Matrix& A, const Matrix& gram,
                                 const Vector& atx, double lambda, const SolverOptions& opts) {
  opts.validate();
  if (!(lambda > 0.0)) throw InvalidParameter("lambda must be > 0, got " + std::to_string(lambda));
  if (A.cols() < 1) throw InvalidParameter("dictionary A needs at least one column");
  if (A.rows() != x.size()) throw DimensionMismatch("x and A disagree on the ambient dimension");
  const Index k = A.cols();

  if (x.isZero(0.0)) {
    ColumnSolution sol = finish(x, A, Vector::Zero(k), lambda, opts);
    sol.degenerate_dual = true;
    sol.polished = true;
    sol.objective_trace.push_back(0.0);
    return sol;
  }

  const double rho = opts.rho;
  Matrix M = lambda * gram;
  M.diagonal().array() += rho;
  const Eigen::LLT<Matrix> llt(M);
  const Vector lb = lambda * atx;

  Vector z = Vector::Zero(k);
  Vector u = Vector::Zero(k);
  if (opts.init_seed) {
    Engine rng = make_stream(*opts.init_seed, Stream::SolverInit, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index j = 0; j < k; ++j) z(j) = normal(rng);
    for (Index j = 0; j < k; ++j) u(j) = normal(rng) / (lambda + 1.0);
  }

  Vector best = Vector::Zero(k);
  double best_obj = objective_of(x, A, best, lambda);
  std::vector<double> trace{best_obj};
  Vector c(k), z_old(k);
  double rp = std::numeric_limits<double>::infinity();
  double rd = rp;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= opts.max_iterations; ++it) {
    c = llt.solve(lb + rho * (z - u));
    z_old = z;
    for (Index j = 0; j < k; ++j) z(j) = soft(c(j) + u(j), 1.0 / rho);
    u += c - z;
    rp = (c - z).lpNorm<Eigen::Infinity>();
    rd = rho * (z - z_old).lpNorm<Eigen::Infinity>();
    converged = rp <= opts.primal_tol && rd <= opts.dual_tol;
    if (it % opts.check_interval == 0 || converged) {
      const double obj = objective_of(x, A, z, lambda);
      if (obj < best_obj) {
        best_obj = obj;
        best = z;
      }
      trace.push_back(best_obj);
      if (opts.polish) {
        Polished p = try_polish(z, gram, atx, lambda);
        if (p.ok) {
          ColumnSolution sol = finish(x, A, std::move(p.c), lambda, opts);
          sol.iterations = it;
          sol.polished = true;
          trace.push_back(std::min(sol.objective, best_obj));
          sol.objective_trace = std::move(trace);
          return sol;
        }
      }
    }
    if (converged) break;
  }
  if (!converged) {
    throw NonConvergence("ADMM did not converge in " + std::to_string(opts.max_iterations) +
                             " iterations (primal residual " + std::to_string(rp) +
                             ", dual residual " + std::to_string(rd) + ")",
                         rp, rd, opts.max_iterations);
  }
  ColumnSolution sol = finish(x, A, std::move(best), lambda, opts);
  sol.iterations = it;
  sol.objective_trace = std::move(trace);
  return sol;
}

ColumnSolution solve_column(const Vector& x, const Matrix& A, double lambda,
                            const SolverOptions& opts) {
  if (A.rows() != x.size()) throw DimensionMismatch("x and A disagree on the ambient dimension");
  const Matrix gram = A.transpose() * A;
  const Vector atx = A.transpose() * x;
  return solve_column_gram(x, A, gram, atx, lambda, opts);
}

double LssscSolution::objective() const {
  double total = 0.0;
  for (const ColumnSolution& col : columns) total += col.objective;
  return total;
}

Matrix drop_column(const Matrix& X, Index i) {
  Matrix out(X.rows(), X.cols() - 1);
  if (i > 0) out.leftCols(i) = X.leftCols(i);
  if (i + 1 < X.cols()) out.rightCols(X.cols() - i - 1) = X.rightCols(X.cols() - i - 1);
  return out;
}

namespace {

void scatter_column(Matrix& C, Index i, const Vector& c) {
  for (Index j = 0; j < c.size(); ++j) C(j < i ? j : j + 1, i) = c(j);
}

}  // namespace

LssscSolution solve_lsssc(const DataMatrix& X, double lambda, const SolverOptions& opts) {
  opts.validate();
  if (!(lambda > 0.0)) throw InvalidParameter("lambda must be > 0");
  const Matrix& V = X.values();
  const Index N = V.cols();
  const Matrix gram_full = V.transpose() * V;
  LssscSolution out;
  out.C = Matrix::Zero(N, N);
  out.columns.resize(static_cast<std::size_t>(N));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(N));

#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < N; ++i) {
    try {
      std::vector<Index> idx;
      idx.reserve(static_cast<std::size_t>(N - 1));
      for (Index j = 0; j < N; ++j)
        if (j != i) idx.push_back(j);
      const Matrix A = V(Eigen::all, idx);
      const Matrix G = gram_full(idx, idx);
      const Vector atx = gram_full(idx, i);
      out.columns[i] = solve_column_gram(V.col(i), A, G, atx, lambda, opts);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (Index i = 0; i < N; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& ex) {
      throw ColumnError(i, ex.what());
    }
  }
  for (Index i = 0; i < N; ++i) scatter_column(out.C, i, out.columns[i].c);
  return out;
}

LssscSolution solve_lsssc_serial(const DataMatrix& X, double lambda, const SolverOptions& opts) {
  const Matrix& V = X.values();
  const Index N = V.cols();
  LssscSolution out;
  out.C = Matrix::Zero(N, N);
  for (Index i = 0; i < N; ++i) {
    try {
      out.columns.push_back(solve_column(V.col(i), drop_column(V, i), lambda, opts));
    } catch (const std::exception& ex) {
      throw ColumnError(i, ex.what());
    }
    scatter_column(out.C, i, out.columns.back().c);
  }
  return out;
}

double lsssc_objective(const Matrix& X, const Matrix& C, double lambda) {
  const Matrix R = X * C - X;
  return C.cwiseAbs().sum() + 0.5 * lambda * R.squaredNorm();
}

Vector dual_direction(const ColumnSolution& solution) {
  const double norm = solution.nu.norm();
  if (solution.degenerate_dual || norm == 0.0) {
    throw DegenerateDual("dual variable is zero; no dual direction");
  }
  return solution.nu / norm;
}

Vector dual_direction(const Vector& x, const Matrix& A, double lambda, const SolverOptions& opts) {
  return dual_direction(solve_column(x, A, lambda, opts));
}

}  // namespace lsssc
