#pragma once

#include <span>
#include <string>
#include <vector>

#include "janossy/chain_ensemble.hpp"
#include "janossy/linalg.hpp"
#include "janossy/measure_space.hpp"
#include "janossy/types.hpp"

namespace janossy {

enum class KernelKind { correlation, janossy_explicit, resolvent };

/// An M x M block kernel on M copies of the node set; block (l, m) holds the
/// values K(l, x; m, y) for all node pairs (x, y). Holds the correlation
/// kernel as well as both forms of the Janossy kernel.
class BlockKernel {
 public:
  BlockKernel(ChainEnsemble ensemble, KernelKind kind, std::vector<CMatrix> blocks,
              std::vector<std::string> warnings = {});

  int floors() const { return floors_; }
  Eigen::Index nodes() const { return ensemble_.nodes(); }
  KernelKind kind() const { return kind_; }
  const ChainEnsemble& ensemble() const { return ensemble_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const CMatrix& block(int l, int m) const;
  Complex operator()(const Site& a, const Site& b) const;

  /// The k x k matrix [K(p_i; p_j)].
  CMatrix matrix_at(std::span<const Site> points) const;

 private:
  ChainEnsemble ensemble_;
  KernelKind kind_;
  int floors_;
  std::vector<CMatrix> blocks_;
  std::vector<std::string> warnings_;
};

/// K(l,x; m,y) = -g_{l,m}(x,y) + sum_ij (g_{l,M} * phi_i)(x) (A^-1)_ij (f_j * g_{1,m})(y)
/// with every convolution and A taken against `weights`. With full weights
/// this is the correlation kernel; with complement weights it is the explicit
/// Janossy kernel. `gram_name` labels the Gram matrix in condition errors.
BlockKernel chain_kernel(const ChainEnsemble& ensemble, const FloorWeights& weights,
                         KernelKind kind, const std::string& gram_name);

BlockKernel correlation_kernel(const ChainEnsemble& ensemble);

/// det[K(p_i; p_j)]: the correlation function at the given sites. Empty list
/// gives 1; repeated sites give 0.
Complex correlation_function(const BlockKernel& kernel, std::span<const Site> points);

/// The kernel restricted to a window family, as the symmetrized matrix
/// sqrt(w_x) K(l,x; m,y) sqrt(w_y) over window sites in (floor, node) order.
class RestrictedOperator {
 public:
  RestrictedOperator(std::vector<Site> sites, CMatrix matrix, RVector sqrt_weights);

  std::size_t size() const { return sites_.size(); }
  const std::vector<Site>& sites() const { return sites_; }
  const CMatrix& matrix() const { return matrix_; }
  const RVector& sqrt_weights() const { return sqrt_weights_; }

 private:
  std::vector<Site> sites_;
  CMatrix matrix_;
  RVector sqrt_weights_;
};

RestrictedOperator restrict_to(const BlockKernel& kernel, const WindowFamily& windows);

/// det(Id - op) through a log-accumulated LU.
Complex fredholm_det(const RestrictedOperator& op);
LogDeterminant fredholm_log_det(const RestrictedOperator& op);

struct ResolventOptions {
  /// Reciprocal condition estimates of Id - K_I below this are a hard error.
  double hard_rcond = 1e-12;
  /// Estimates below this (but above hard_rcond) attach a warning.
  double warn_rcond = 1e-6;
};

/// K_I (Id - K_I)^-1 from a single factorization of Id - K_I, unscaled back
/// to kernel values. Blocks are zero outside the windows.
BlockKernel resolvent_kernel(const BlockKernel& kernel, const WindowFamily& windows,
                             ResolventOptions options = {});

enum class DysonMehtaForm {
  /// sum_l int K(k,x;l,y) K(l,y;m,z) = K + (m-k) K + 2(m-k) g_{k,m}
  stated,
  /// sum_l int K(k,x;l,y) K(l,y;m,z) = (1 - (m-k)) K, which follows from
  /// expanding the kernel and using A^-1 A = Id.
  composition,
};

/// |LHS - RHS| of the floor-summed self-composition identity at (k,x; m,z).
double dyson_mehta_check(const BlockKernel& kernel, int k, int m, int x, int z,
                         DysonMehtaForm form = DysonMehtaForm::stated);

}  // namespace janossy
