#include "janossy/chain_ensemble.hpp"

#include <cmath>
#include <sstream>

#include "janossy/linalg.hpp"
#include "chain_math.hpp"

namespace janossy {

namespace {

void check_floor(const ChainEnsemble& e, int l, const char* what) {
  if (l < 0 || l >= e.floors()) {
    std::ostringstream os;
    os << what << " floor index " << l << " outside [0, " << e.floors() << ")";
    throw InvalidArgument(os.str());
  }
}

void check_function(const ChainEnsemble& e, int j, const char* what) {
  if (j < 0 || j >= e.particles()) {
    std::ostringstream os;
    os << what << " function index " << j << " outside [0, " << e.particles() << ")";
    throw InvalidArgument(os.str());
  }
}

void check_weights(const ChainEnsemble& e, const FloorWeights& w) {
  if (w.floors() != e.floors()) throw InvalidArgument("floor weights do not match ensemble floors");
  if (w[0].size() != e.nodes()) throw InvalidArgument("floor weights do not match ensemble nodes");
}

}  // namespace

FloorWeights FloorWeights::full(const DiscretizedSpace& space, int floors) {
  if (floors < 1) throw InvalidArgument("floor weights need at least one floor");
  return FloorWeights(std::vector<RVector>(static_cast<std::size_t>(floors), space.weight_vector()));
}

FloorWeights FloorWeights::complement(const WindowFamily& windows) {
  return full(windows.space(), windows.floors()).restricted_all(windows, true);
}

FloorWeights FloorWeights::inside(const WindowFamily& windows) {
  return full(windows.space(), windows.floors()).restricted_all(windows, false);
}

FloorWeights FloorWeights::restricted_all(const WindowFamily& windows, bool use_complement) const {
  FloorWeights out = *this;
  for (int l = 0; l < windows.floors(); ++l) {
    const Window& w = windows[l];
    auto& v = out.weights_[static_cast<std::size_t>(l)];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const bool in = w.contains(static_cast<std::size_t>(i));
      if (in == use_complement) v(i) = 0.0;
    }
  }
  return out;
}

FloorWeights FloorWeights::restricted(int floor, const Window& window) const {
  if (floor < 0 || floor >= floors()) throw InvalidArgument("floor weights: floor out of range");
  FloorWeights out = *this;
  auto& v = out.weights_[static_cast<std::size_t>(floor)];
  if (static_cast<std::size_t>(v.size()) != window.mask().size()) {
    throw InvalidArgument("floor weights: window does not match node count");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!window.contains(static_cast<std::size_t>(i))) v(i) = 0.0;
  }
  return out;
}

ChainEnsemble::ChainEnsemble(DiscretizedSpace space, std::vector<CVector> f,
                             std::vector<CVector> phi, std::vector<CMatrix> links,
                             EnsembleOptions options)
    : ChainEnsemble(std::move(space), std::move(f), std::move(phi), std::move(links), options,
                    std::nullopt) {}

ChainEnsemble::ChainEnsemble(DiscretizedSpace space, std::vector<CVector> f,
                             std::vector<CVector> phi, std::vector<CMatrix> links,
                             EnsembleOptions options, std::optional<ExtendedData> extended) {
  auto d = std::make_shared<Data>(space);
  d->extended = std::move(extended);
  const auto p = static_cast<Eigen::Index>(space.size());
  if (f.empty()) throw InvalidArgument("ensemble needs n >= 1 particles per floor");
  if (f.size() != phi.size()) {
    std::ostringstream os;
    os << "ensemble: " << f.size() << " f functions but " << phi.size() << " phi functions";
    throw InvalidArgument(os.str());
  }
  d->n = static_cast<int>(f.size());
  d->floors = static_cast<int>(links.size()) + 1;
  d->f.resize(p, d->n);
  d->phi.resize(p, d->n);
  for (int j = 0; j < d->n; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    if (f[sj].size() != p || phi[sj].size() != p) {
      throw InvalidArgument("ensemble: f and phi vectors must have one entry per node");
    }
    d->f.col(j) = f[sj];
    d->phi.col(j) = phi[sj];
  }
  for (const auto& g : links) {
    if (g.rows() != p || g.cols() != p) {
      throw InvalidArgument("ensemble: each g_{l,l+1} must be node-count x node-count");
    }
  }
  if (!(options.max_condition > 0.0)) throw InvalidArgument("ensemble: max_condition must be > 0");
  d->links = std::move(links);
  d->options = options;
  d->zero = CMatrix::Zero(p, p);

  d_ = d;

  const auto m = static_cast<std::size_t>(d->floors);
  d->conv.assign(m * m, CMatrix());
  detail::with_chain_math(*this, FloorWeights::full(d->space, d->floors), [&](const auto& math) {
    for (int l = 0; l < d->floors; ++l) {
      for (int k = l + 1; k < d->floors; ++k) {
        d->conv[static_cast<std::size_t>(l) * m + static_cast<std::size_t>(k)] = detail::to_double(math.conv(l, k));
      }
    }
    d->gram = detail::to_double(math.gram());
    return 0;
  });
  d->gram_condition = require_conditioned(d->gram, options.max_condition, "A (Gram)");
}

bool ChainEnsemble::extended_precision() const {
  switch (d_->options.precision) {
    case Precision::standard: return false;
    case Precision::extended: return true;
    case Precision::automatic: break;
  }
  return d_->space.size() <= kExtendedNodeLimit;
}

const CMatrix& ChainEnsemble::convolution(int l, int m) const {
  check_floor(*this, l, "convolution");
  check_floor(*this, m, "convolution");
  if (m <= l) return d_->zero;
  return d_->conv[static_cast<std::size_t>(l * d_->floors + m)];
}

double GramMatrix::condition() const { return condition_number(entries); }

CMatrix chain_convolve(const ChainEnsemble& ensemble, int l, int m, const FloorWeights& weights) {
  check_floor(ensemble, l, "chain_convolve");
  check_floor(ensemble, m, "chain_convolve");
  check_weights(ensemble, weights);
  if (m <= l) return CMatrix::Zero(ensemble.nodes(), ensemble.nodes());
  return detail::with_chain_math(ensemble, weights,
                                 [&](const auto& math) { return detail::to_double(math.conv(l, m)); });
}

CMatrix chain_convolve(const ChainEnsemble& ensemble, int l, int m) {
  return ensemble.convolution(l, m);
}

CMatrix chain_convolve(const ChainEnsemble& ensemble, int l, int m,
                       std::span<const Window> intermediate) {
  check_floor(ensemble, l, "chain_convolve");
  check_floor(ensemble, m, "chain_convolve");
  const std::size_t expected = m > l ? static_cast<std::size_t>(m - l - 1) : 0;
  if (intermediate.size() != expected) {
    std::ostringstream os;
    os << "chain_convolve(" << l << ", " << m << ") needs " << expected
       << " intermediate windows, got " << intermediate.size();
    throw InvalidArgument(os.str());
  }
  auto weights = FloorWeights::full(ensemble.space(), ensemble.floors());
  for (std::size_t i = 0; i < intermediate.size(); ++i) {
    weights = weights.restricted(l + 1 + static_cast<int>(i), intermediate[i]);
  }
  return chain_convolve(ensemble, l, m, weights);
}

CMatrix left_convolutions(const ChainEnsemble& ensemble, int m, const FloorWeights& weights) {
  check_floor(ensemble, m, "left_convolve");
  check_weights(ensemble, weights);
  if (m == 0) return ensemble.f_matrix();
  // (f_j * g)(y) = sum_x f_j(x) w_x g(x, y)
  return detail::with_chain_math(ensemble, weights,
                                 [&](const auto& math) { return detail::to_double(math.left(m)); });
}

CMatrix right_convolutions(const ChainEnsemble& ensemble, int l, const FloorWeights& weights) {
  check_floor(ensemble, l, "right_convolve");
  check_weights(ensemble, weights);
  const int last = ensemble.floors() - 1;
  if (l == last) return ensemble.phi_matrix();
  return detail::with_chain_math(ensemble, weights,
                                 [&](const auto& math) { return detail::to_double(math.right(l)); });
}

CVector left_convolve(const ChainEnsemble& ensemble, int j, int m, const FloorWeights& weights) {
  check_function(ensemble, j, "left_convolve");
  return left_convolutions(ensemble, m, weights).col(j);
}

CVector left_convolve(const ChainEnsemble& ensemble, int j, int m) {
  return left_convolve(ensemble, j, m, FloorWeights::full(ensemble.space(), ensemble.floors()));
}

CVector right_convolve(const ChainEnsemble& ensemble, int s, int l, const FloorWeights& weights) {
  check_function(ensemble, s, "right_convolve");
  return right_convolutions(ensemble, l, weights).col(s);
}

CVector right_convolve(const ChainEnsemble& ensemble, int s, int l) {
  return right_convolve(ensemble, s, l, FloorWeights::full(ensemble.space(), ensemble.floors()));
}

CMatrix gram_entries(const ChainEnsemble& ensemble, const FloorWeights& weights) {
  check_weights(ensemble, weights);
  return detail::with_chain_math(ensemble, weights,
                                 [&](const auto& math) { return detail::to_double(math.gram()); });
}

GramMatrix gram_matrix(const ChainEnsemble& ensemble) {
  return GramMatrix{ensemble.gram(), GramVariant::full, std::nullopt};
}

GramMatrix gram_matrix(const ChainEnsemble& ensemble, GramVariant variant,
                       const WindowFamily& windows) {
  if (variant == GramVariant::full) return gram_matrix(ensemble);
  if (windows.floors() != ensemble.floors() || !windows.space().same_as(ensemble.space())) {
    throw InvalidArgument("gram_matrix: window family does not match the ensemble");
  }
  const FloorWeights w = variant == GramVariant::complement ? FloorWeights::complement(windows)
                                                            : FloorWeights::inside(windows);
  return GramMatrix{gram_entries(ensemble, w), variant, windows};
}

Complex partition_function(const ChainEnsemble& ensemble) {
  const auto [phase, log_abs] =
      detail::with_chain_math(ensemble, FloorWeights::full(ensemble.space(), ensemble.floors()),
                              [](const auto& math) { return math.gram_log_det(); });
  if (phase == Complex{}) return {};
  const double log_factorial = std::lgamma(static_cast<double>(ensemble.particles()) + 1.0);
  return phase * std::exp(log_abs + ensemble.floors() * log_factorial);
}

ChainEnsemble marginal_ensemble(const ChainEnsemble& ensemble, std::span<const int> floors) {
  if (floors.empty()) throw InvalidArgument("marginal_ensemble: empty floor list");
  for (std::size_t i = 0; i < floors.size(); ++i) {
    check_floor(ensemble, floors[i], "marginal_ensemble");
    if (i > 0 && floors[i] <= floors[i - 1]) {
      throw InvalidArgument("marginal_ensemble: floors must be strictly increasing");
    }
  }
  const auto full = FloorWeights::full(ensemble.space(), ensemble.floors());
  // Derived data in the parent's working precision; the long double copy
  // travels with the marginal so it is not rounded twice.
  ExtendedData x;
  detail::with_chain_math(ensemble, full, [&](const auto& math) {
    x.f = math.left(floors.front()).template cast<detail::XComplex>();
    x.phi = math.right(floors.back()).template cast<detail::XComplex>();
    for (std::size_t i = 0; i + 1 < floors.size(); ++i) {
      x.links.push_back(math.conv(floors[i], floors[i + 1]).template cast<detail::XComplex>());
    }
    return 0;
  });

  std::vector<CVector> f;
  std::vector<CVector> phi;
  for (int j = 0; j < ensemble.particles(); ++j) {
    f.emplace_back(x.f.col(j).cast<Complex>());
    phi.emplace_back(x.phi.col(j).cast<Complex>());
  }
  std::vector<CMatrix> links;
  for (const auto& g : x.links) links.push_back(g.cast<Complex>());
  std::optional<ExtendedData> keep;
  if (ensemble.extended_precision()) keep = std::move(x);
  return ChainEnsemble(ensemble.space(), std::move(f), std::move(phi), std::move(links),
                       ensemble.options(), std::move(keep));
}

CMatrix pairing_matrix(const DiscretizedSpace& space, const CMatrix& psi, const CMatrix& chi) {
  const auto p = static_cast<Eigen::Index>(space.size());
  if (psi.rows() != p || chi.rows() != p) {
    throw InvalidArgument("pairing_matrix: families must be sampled on every node");
  }
  return psi.transpose() * (space.weight_vector().cast<Complex>().asDiagonal() * chi);
}

}  // namespace janossy
