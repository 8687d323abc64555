#pragma once

#include <stdexcept>
#include <string>

namespace lsssc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateDual : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class DegenerateGraph : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when the splitting method exhausts its iteration budget.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double primal_residual,
                 double dual_residual, int iterations)
      : Error(what),
        primal_residual_(primal_residual),
        dual_residual_(dual_residual),
        iterations_(iterations) {}

  double primal_residual() const noexcept { return primal_residual_; }
  double dual_residual() const noexcept { return dual_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double primal_residual_;
  double dual_residual_;
  int iterations_;
};

/// Wraps a per-column failure with the index of the column that failed.
class ColumnError : public Error {
 public:
  ColumnError(long column, const std::string& what)
      : Error("column " + std::to_string(column) + ": " + what), column_(column) {}
  long column() const noexcept { return column_; }

 private:
  long column_;
};

}  // namespace lsssc
