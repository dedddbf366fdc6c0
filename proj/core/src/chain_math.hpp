#pragma once

// Chain convolutions, Gram matrices and kernel blocks in a chosen working
// precision. Results are rounded back to double by the callers.

#include <complex>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include "janossy/chain_ensemble.hpp"

namespace janossy::detail {

using XComplex = std::complex<long double>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
class ChainMath {
 public:
  ChainMath(const ChainEnsemble& e, const FloorWeights& weights) : floors_(e.floors()) {
    const auto p = e.nodes();
    const ExtendedData* x = nullptr;
    if constexpr (std::is_same_v<S, XComplex>) {
      if (e.extended_data()) x = &*e.extended_data();
    }
    auto link = [&](int l) -> Mat<S> {
      if (x) return x->links[static_cast<std::size_t>(l)].template cast<S>();
      return e.link(l).cast<S>();
    };
    f_ = x ? Mat<S>(x->f.template cast<S>()) : Mat<S>(e.f_matrix().cast<S>());
    phi_ = x ? Mat<S>(x->phi.template cast<S>()) : Mat<S>(e.phi_matrix().cast<S>());
    for (int l = 0; l < floors_; ++l) w_.push_back(weights[l].cast<S>());
    zero_ = Mat<S>::Zero(p, p);
    table_.assign(static_cast<std::size_t>(floors_ * floors_), Mat<S>());
    for (int l = 0; l < floors_; ++l) {
      for (int m = l + 1; m < floors_; ++m) {
        auto& slot = table_[index(l, m)];
        if (m == l + 1) {
          slot = link(l);
        } else {
          slot = table_[index(l, m - 1)] * w_[static_cast<std::size_t>(m - 1)].asDiagonal() *
                 link(m - 1);
        }
      }
    }
  }

  /// g_{l,m} under the weights; zero when m <= l.
  const Mat<S>& conv(int l, int m) const { return m <= l ? zero_ : table_[index(l, m)]; }

  /// Columns (f_j * g_{0,m}).
  Mat<S> left(int m) const {
    if (m == 0) return f_;
    return conv(0, m).transpose() * (w_.front().asDiagonal() * f_);
  }

  /// Columns (g_{l,M-1} * phi_i).
  Mat<S> right(int l) const {
    const int last = floors_ - 1;
    if (l == last) return phi_;
    return conv(l, last) * (w_.back().asDiagonal() * phi_);
  }

  Mat<S> gram() const { return left(floors_ - 1).transpose() * (w_.back().asDiagonal() * phi_); }

  /// det(A) as phase and log|det| in working precision.
  std::pair<Complex, double> gram_log_det() const {
    const Eigen::PartialPivLU<Mat<S>> lu(gram());
    const Mat<S>& u = lu.matrixLU();
    S phase(lu.permutationP().determinant());
    typename S::value_type log_abs = 0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const auto a = std::abs(u(i, i));
      if (a == 0) return {Complex{}, -std::numeric_limits<double>::infinity()};
      phase *= u(i, i) / a;
      log_abs += std::log(a);
    }
    return {Complex(phase), static_cast<double>(log_abs)};
  }

  /// Blocks K(l, .; m, .) = a_l A^-1 b_m - g_{l,m}, rounded to double.
  std::vector<CMatrix> kernel_blocks() const {
    const Eigen::PartialPivLU<Mat<S>> lu(gram());
    std::vector<Mat<S>> a, xb;
    for (int l = 0; l < floors_; ++l) {
      a.push_back(right(l));
      xb.push_back(lu.solve(left(l).transpose()));
    }
    std::vector<CMatrix> blocks(static_cast<std::size_t>(floors_ * floors_));
    for (int l = 0; l < floors_; ++l) {
      for (int m = 0; m < floors_; ++m) {
        const Mat<S> b = a[static_cast<std::size_t>(l)] * xb[static_cast<std::size_t>(m)] - conv(l, m);
        blocks[index(l, m)] = b.template cast<Complex>();
      }
    }
    return blocks;
  }

 private:
  std::size_t index(int l, int m) const { return static_cast<std::size_t>(l * floors_ + m); }

  int floors_;
  Mat<S> f_, phi_, zero_;
  std::vector<Eigen::Matrix<S, Eigen::Dynamic, 1>> w_;
  std::vector<Mat<S>> table_;
};

/// Calls fn(ChainMath<S>) with S chosen by the ensemble's precision policy.
template <class Fn>
auto with_chain_math(const ChainEnsemble& e, const FloorWeights& weights, Fn&& fn) {
  if (e.extended_precision()) return fn(ChainMath<XComplex>(e, weights));
  return fn(ChainMath<Complex>(e, weights));
}

template <class S>
CMatrix to_double(const Mat<S>& m) {
  return m.template cast<Complex>();
}

}  // namespace janossy::detail
