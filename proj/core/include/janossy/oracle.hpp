#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "janossy/chain_ensemble.hpp"
#include "janossy/measure_space.hpp"

namespace janossy {

struct EnumerationOptions {
  /// Maximum number of ordered configurations P^{M n} to visit.
  double budget = 1e6;
};

/// Every ordered configuration of an ensemble on an exact-discrete space and
/// its probability mass p(x) * prod w. Configuration c stores the node of
/// particle i on floor l as base-P digit number l * n + i of c.
class EnumeratedDistribution {
 public:
  EnumeratedDistribution(ChainEnsemble ensemble, std::vector<Complex> masses,
                         Complex raw_partition);

  const ChainEnsemble& ensemble() const { return ensemble_; }
  std::size_t configurations() const { return masses_.size(); }
  /// Masses normalized by the enumerated partition function.
  const std::vector<Complex>& masses() const { return masses_; }
  /// sum over configurations of the unnormalized density times weights.
  Complex raw_partition() const { return raw_partition_; }
  Complex total_mass() const;

  int coordinate(std::size_t config, int floor, int particle) const;

 private:
  ChainEnsemble ensemble_;
  std::vector<Complex> masses_;
  Complex raw_partition_;
  std::vector<std::size_t> strides_;
};

/// Unnormalized density prod of determinants at one configuration, with
/// coords[l * n + i] the node of particle i on floor l.
Complex configuration_weight(const ChainEnsemble& ensemble, std::span<const int> coords);

/// Throws BudgetExceeded when P^{M n} exceeds the budget and InvalidArgument
/// for non-discrete spaces.
EnumeratedDistribution enumerate_density(const ChainEnsemble& ensemble,
                                         EnumerationOptions options = {});

/// rho at the given sites: prod_l n!/(n-k_l)! times the total mass of
/// configurations whose first k_l floor-l particles sit at the floor-l sites,
/// divided by the weights of those sites.
double brute_correlation(const EnumeratedDistribution& dist, std::span<const Site> points);

/// As brute_correlation, additionally requiring every other floor-l particle
/// to lie outside I_l. Throws InvalidArgument for sites outside their window.
double brute_janossy(const EnumeratedDistribution& dist, const WindowFamily& windows,
                     std::span<const Site> points);

/// Total mass of configurations with exactly counts[l] floor-l particles in I_l.
double brute_count_probability(const EnumeratedDistribution& dist, const WindowFamily& windows,
                               std::span<const int> counts);

/// Pr(#{x_i >= s} = k) for a one-floor ensemble with n <= 3 by direct n-fold
/// summation of the joint density over the space's nodes.
double quad_oracle_m1(const ChainEnsemble& ensemble, double s, int k, double budget = 1e8);

/// (1/n!) sum over ordered n-tuples of det psi_i(x_j) det chi_i(x_j) prod w,
/// the left side of the Heine identity, for families stored as columns.
Complex heine_enumeration(const DiscretizedSpace& space, const CMatrix& psi, const CMatrix& chi,
                          double budget = 1e6);

}  // namespace janossy
