#include "janossy/linalg.hpp"

#include <sstream>

namespace janossy {

SingularMatrixError::SingularMatrixError(std::string matrix, double condition,
                                         const std::string& detail)
    : Error([&] {
        std::ostringstream os;
        os << "matrix " << matrix << " is singular or ill-conditioned (condition estimate "
           << condition << ")";
        if (!detail.empty()) os << ": " << detail;
        return os.str();
      }()),
      matrix_(std::move(matrix)),
      condition_(condition) {}

BudgetExceeded::BudgetExceeded(double required, double budget)
    : Error([&] {
        std::ostringstream os;
        os << "enumeration needs " << required << " configurations, budget is " << budget;
        return os.str();
      }()),
      required_(required),
      budget_(budget) {}

LogDeterminant log_determinant(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("determinant of a non-square matrix");
  LogDeterminant out;
  if (m.rows() == 0) return out;

  Eigen::PartialPivLU<CMatrix> lu(m);
  const CMatrix& packed = lu.matrixLU();
  out.phase = Complex(lu.permutationP().determinant(), 0.0);
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const Complex pivot = packed(i, i);
    const double mag = std::abs(pivot);
    if (mag == 0.0) {
      out.phase = Complex{};
      out.log_abs = -std::numeric_limits<double>::infinity();
      return out;
    }
    out.phase *= pivot / mag;
    out.log_abs += std::log(mag);
  }
  return out;
}

Complex determinant(const CMatrix& m) { return log_determinant(m).value(); }

Complex small_determinant(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("determinant of a non-square matrix");
  switch (m.rows()) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return determinant(m);
  }
}

double condition_number(const CMatrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smin == 0.0 || !std::isfinite(smax)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

double require_conditioned(const CMatrix& m, double max_condition, const std::string& what) {
  const double cond = condition_number(m);
  if (!(cond <= max_condition)) {
    std::ostringstream os;
    os << "threshold " << max_condition;
    throw SingularMatrixError(what, cond, os.str());
  }
  return cond;
}

}  // namespace janossy
