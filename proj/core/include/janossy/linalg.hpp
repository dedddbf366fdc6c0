#pragma once

#include <cmath>
#include <limits>

#include "janossy/types.hpp"

namespace janossy {

/// Determinant held as phase * exp(log_abs) so large products neither
/// underflow nor overflow before the caller decides to exponentiate.
struct LogDeterminant {
  Complex phase{1.0, 0.0};
  double log_abs = 0.0;

  bool is_zero() const { return log_abs == -std::numeric_limits<double>::infinity(); }
  Complex value() const { return is_zero() ? Complex{} : phase * std::exp(log_abs); }
};

/// LU with partial pivoting; log|det| accumulated pivot by pivot.
LogDeterminant log_determinant(const CMatrix& m);

/// det(m) through log_determinant. The 0x0 determinant is 1.
Complex determinant(const CMatrix& m);

/// Cofactor expansion for n <= 3, LU otherwise.
Complex small_determinant(const CMatrix& m);

/// Ratio of the extreme singular values; 1 for empty matrices and +inf when
/// the smallest singular value is exactly zero.
double condition_number(const CMatrix& m);

/// Throws SingularMatrixError naming `what` if cond(m) exceeds `max_condition`.
/// Returns the computed condition number.
double require_conditioned(const CMatrix& m, double max_condition, const std::string& what);

}  // namespace janossy
