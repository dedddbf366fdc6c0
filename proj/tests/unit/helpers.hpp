#pragma once

#include <initializer_list>
#include <vector>

#include "janossy/chain_ensemble.hpp"

namespace testing {

using janossy::CMatrix;
using janossy::CVector;

inline CVector vec(std::initializer_list<double> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline janossy::DiscretizedSpace unit_space(int nodes) {
  std::vector<double> pts, ms;
  for (int i = 0; i < nodes; ++i) {
    pts.push_back(i);
    ms.push_back(1.0);
  }
  return janossy::DiscretizedSpace::discrete(pts, ms);
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
