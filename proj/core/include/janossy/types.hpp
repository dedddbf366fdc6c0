#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace janossy {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// A particle location: a floor (class) index and a node index, both 0-based.
struct Site {
  int floor = 0;
  int node = 0;

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed shapes, out-of-range indices, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is singular or too badly conditioned.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::string matrix, double condition, const std::string& detail = {});

  const std::string& matrix() const noexcept { return matrix_; }
  /// 2-norm condition estimate (infinity when exactly singular).
  double condition() const noexcept { return condition_; }

 private:
  std::string matrix_;
  double condition_;
};

/// Brute-force enumeration would exceed its configuration budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(double required, double budget);

  double required() const noexcept { return required_; }
  double budget() const noexcept { return budget_; }

 private:
  double required_;
  double budget_;
};

}  // namespace janossy
