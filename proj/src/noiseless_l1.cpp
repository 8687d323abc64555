#include "lsssc/errors.hpp"
#include "lsssc/solver.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace lsssc {
namespace detail {

namespace {

constexpr double kPivotEps = 1e-11;

class Tableau {
 public:
  Tableau(const Matrix& A, const Vector& b) : m_(A.rows()), n_(A.cols()) {
    T_ = Matrix::Zero(m_ + 1, n_ + m_ + 1);
    T_.topLeftCorner(m_, n_) = A;
    T_.block(0, n_, m_, m_).setIdentity();
    T_.col(n_ + m_).head(m_) = b;
    basis_.resize(static_cast<std::size_t>(m_));
    for (Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  Index rows() const { return m_; }
  Index vars() const { return n_; }
  Index rhs_col() const { return n_ + m_; }
  const std::vector<Index>& basis() const { return basis_; }
  double value(Index row) const { return T_(row, rhs_col()); }

  // Reduced-cost row for the given cost over all n + m columns.
  void price(const Vector& cost) {
    T_.row(m_).setZero();
    for (Index j = 0; j < n_ + m_; ++j) T_(m_, j) = cost(j);
    for (Index i = 0; i < m_; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) T_.row(m_) -= cb * T_.row(i);
    }
  }

  // Runs Bland's rule over columns [0, allowed). Returns false if unbounded.
  bool optimize(Index allowed) {
    for (int guard = 0; guard < 100000; ++guard) {
      Index enter = -1;
      for (Index j = 0; j < allowed; ++j) {
        if (T_(m_, j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        const double a = T_(i, enter);
        if (a > kPivotEps) {
          const double ratio = T_(i, rhs_col()) / a;
          if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw Error("simplex exceeded its pivot budget");
  }

  void pivot(Index row, Index col) {
    T_.row(row) /= T_(row, col);
    for (Index i = 0; i <= m_; ++i) {
      if (i != row && T_(i, col) != 0.0) T_.row(i) -= T_(i, col) * T_.row(row);
    }
    basis_[row] = col;
  }

  double entry(Index row, Index col) const { return T_(row, col); }
  double objective_value() const { return -T_(m_, rhs_col()); }

 private:
  Index m_;
  Index n_;
  Matrix T_;
  std::vector<Index> basis_;
};

}  // namespace

LpResult simplex(const Matrix& A_in, const Vector& b_in, const Vector& cost) {
  const Index m = A_in.rows();
  const Index n = A_in.cols();
  Matrix A = A_in;
  Vector b = b_in;
  Vector flip = Vector::Ones(m);
  for (Index i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      A.row(i) *= -1.0;
      b(i) *= -1.0;
      flip(i) = -1.0;
    }
  }
  Tableau tab(A, b);

  // Phase 1: drive the artificials to zero.
  Vector phase1 = Vector::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.price(phase1);
  tab.optimize(n + m);
  if (tab.objective_value() > 1e-9 * std::max(1.0, b.lpNorm<1>())) {
    throw Infeasible("linear program is infeasible");
  }
  for (Index i = 0; i < m; ++i) {
    if (tab.basis()[i] < n) continue;
    Index col = -1;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(tab.entry(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col < 0) throw Error("linear program has redundant equality rows");
    tab.pivot(i, col);
  }

  // Phase 2 on the original cost; artificials may not re-enter.
  Vector phase2 = Vector::Zero(n + m);
  phase2.head(n) = cost;
  tab.price(phase2);
  if (!tab.optimize(n)) throw Error("linear program is unbounded");

  LpResult out;
  out.x = Vector::Zero(n);
  Matrix B(m, m);
  Vector cb(m);
  for (Index i = 0; i < m; ++i) {
    const Index j = tab.basis()[i];
    out.x(j) = std::max(0.0, tab.value(i));
    B.col(i) = A.col(j);
    cb(i) = cost(j);
  }
  out.dual = B.transpose().fullPivLu().solve(cb);
  out.dual = out.dual.cwiseProduct(flip);
  out.objective = cost.dot(out.x);
  return out;
}

}  // namespace detail

NoiselessL1Solution solve_noiseless_l1(const Vector& y, const Matrix& B) {
  if (B.cols() < 1) throw InvalidParameter("B needs at least one column");
  if (B.rows() != y.size()) throw DimensionMismatch("y and B disagree on the ambient dimension");
  const Index k = B.cols();
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * std::max(1.0, smax)) ++rank;

  NoiselessL1Solution out;
  if (rank == 0) {
    if (y.norm() > 1e-10) throw Infeasible("y is not in span(B) (B is zero)");
    out.c = Vector::Zero(k);
    out.nu = Vector::Zero(y.size());
    return out;
  }
  const Matrix Q = svd.matrixU().leftCols(rank);
  const Vector yq = Q.transpose() * y;
  const double off = (y - Q * yq).norm();
  if (off > 1e-10 * std::max(1.0, y.norm())) {
    throw Infeasible("y is " + std::to_string(off) + " away from span(B)");
  }
  const Matrix Bq = Q.transpose() * B;
  Matrix A(rank, 2 * k);
  A << Bq, -Bq;
  const detail::LpResult lp = detail::simplex(A, yq, Vector::Ones(2 * k));
  out.c = lp.x.head(k) - lp.x.tail(k);
  out.nu = Q * lp.dual;
  out.l1_norm = out.c.lpNorm<1>();
  return out;
}

}  // namespace lsssc
