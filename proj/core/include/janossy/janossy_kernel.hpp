#pragma once

#include <span>
#include <string>
#include <vector>

#include "janossy/chain_ensemble.hpp"
#include "janossy/kernels.hpp"
#include "janossy/measure_space.hpp"

namespace janossy {

/// Janossy kernel L^I of a window family in closed form, together with the
/// normalization const(I) = Pr(every window empty of its class).
struct JanossyKernel {
  /// kind() == janossy_explicit; defined on all nodes, equal to the resolvent
  /// K_I (Id - K_I)^-1 on window sites.
  BlockKernel kernel;
  WindowFamily windows;
  /// const(I) = det(Id - K_I), computed here as det(A^c) / det(A).
  Complex normalization;
  GramMatrix complement_gram;
  double complement_condition = 0.0;
};

/// L^I(l,x; m,y) = -g^c_{l,m}(x,y)
///                 + sum_ij (g^c_{l,M} *_c phi_i)(x) (A^c)^-1_ij (f_j *_c g^c_{1,m})(y),
/// every integration running over the complements I_l^c. Throws
/// SingularMatrixError when A^c fails the ensemble's condition gate (windows
/// that leave fewer than n complement nodes on some floor always do).
JanossyKernel janossy_kernel_explicit(const ChainEnsemble& ensemble, const WindowFamily& windows);

/// const(I) * det[L^I(p_i; p_j)]. Each site must lie in its floor's window.
Complex janossy_density(const JanossyKernel& jk, std::span<const Site> points);

/// Pr(exactly counts[l] class-l particles in I_l for every l): the weighted
/// sum of Janossy densities over window node subsets. Falls back to
/// count_distribution_fredholm when A^c is singular.
double count_probability(const ChainEnsemble& ensemble, const WindowFamily& windows,
                         std::span<const int> counts);
/// Same, reusing an already built kernel.
Complex count_probability(const JanossyKernel& jk, std::span<const int> counts);

/// Joint count law of (#I_1, ..., #I_M) read off the generating function
/// E[prod t_l^{#I_l}] = det(Id - diag(1 - t) K_I), sampled at roots of unity.
/// Entry index is sum_l counts[l] * (n+1)^l.
std::vector<double> count_distribution_fredholm(const ChainEnsemble& ensemble,
                                                const WindowFamily& windows);

struct ExtremePoint {
  double s = 0.0;
  /// Pr(#[s, inf) = j) for j = 0..k.
  std::vector<double> count_probabilities;
  /// Pr(lambda_k >= s).
  double tail = 0.0;
  /// Pr(lambda_k < s).
  double cdf = 0.0;
  std::vector<std::string> warnings;
};

/// Distribution of the k-th largest particle (k is 1-based) on one floor over
/// a grid of thresholds, using the single-floor marginal and the windows
/// [s, inf). Throws InvalidArgument when k is outside 1..n.
std::vector<ExtremePoint> kth_extreme_distribution(const ChainEnsemble& ensemble, int floor, int k,
                                                   std::span<const double> s_grid);

/// One-floor recipe: biorthogonalize {f_i}, {phi_i} against mu restricted to
/// I^c, take sum_i phi~_i(x) f~_i(y), extend to all nodes.
JanossyKernel biorthogonal_janossy_recipe(const ChainEnsemble& ensemble, const Window& window);

}  // namespace janossy
