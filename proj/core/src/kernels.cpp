#include "janossy/kernels.hpp"

#include <limits>
#include <sstream>

#include "janossy/parallel.hpp"
#include "chain_math.hpp"

namespace janossy {

namespace {

void check_site(const BlockKernel& k, const Site& s) {
  if (s.floor < 0 || s.floor >= k.floors() || s.node < 0 || s.node >= k.nodes()) {
    std::ostringstream os;
    os << "site (" << s.floor << ", " << s.node << ") outside the kernel's "
       << k.floors() << " floors x " << k.nodes() << " nodes";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

BlockKernel::BlockKernel(ChainEnsemble ensemble, KernelKind kind, std::vector<CMatrix> blocks,
                         std::vector<std::string> warnings)
    : ensemble_(std::move(ensemble)),
      kind_(kind),
      floors_(ensemble_.floors()),
      blocks_(std::move(blocks)),
      warnings_(std::move(warnings)) {
  if (blocks_.size() != static_cast<std::size_t>(floors_ * floors_)) {
    throw InvalidArgument("block kernel needs M x M blocks");
  }
  for (const auto& b : blocks_) {
    if (b.rows() != nodes() || b.cols() != nodes()) {
      throw InvalidArgument("block kernel blocks must be node-count x node-count");
    }
  }
}

const CMatrix& BlockKernel::block(int l, int m) const {
  if (l < 0 || l >= floors_ || m < 0 || m >= floors_) {
    throw InvalidArgument("block kernel: floor index out of range");
  }
  return blocks_[static_cast<std::size_t>(l * floors_ + m)];
}

Complex BlockKernel::operator()(const Site& a, const Site& b) const {
  check_site(*this, a);
  check_site(*this, b);
  return blocks_[static_cast<std::size_t>(a.floor * floors_ + b.floor)](a.node, b.node);
}

CMatrix BlockKernel::matrix_at(std::span<const Site> points) const {
  const auto k = static_cast<Eigen::Index>(points.size());
  for (const auto& p : points) check_site(*this, p);
  CMatrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out(i, j) = (*this)(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

BlockKernel chain_kernel(const ChainEnsemble& ensemble, const FloorWeights& weights,
                         KernelKind kind, const std::string& gram_name) {
  const CMatrix gram = gram_entries(ensemble, weights);
  require_conditioned(gram, ensemble.options().max_condition, gram_name);
  std::vector<CMatrix> blocks = detail::with_chain_math(
      ensemble, weights, [](const auto& math) { return math.kernel_blocks(); });
  return BlockKernel(ensemble, kind, std::move(blocks));
}

BlockKernel correlation_kernel(const ChainEnsemble& ensemble) {
  return chain_kernel(ensemble, FloorWeights::full(ensemble.space(), ensemble.floors()),
                      KernelKind::correlation, "A (Gram)");
}

Complex correlation_function(const BlockKernel& kernel, std::span<const Site> points) {
  if (points.empty()) return {1.0, 0.0};
  return determinant(kernel.matrix_at(points));
}

RestrictedOperator::RestrictedOperator(std::vector<Site> sites, CMatrix matrix,
                                       RVector sqrt_weights)
    : sites_(std::move(sites)), matrix_(std::move(matrix)), sqrt_weights_(std::move(sqrt_weights)) {
  const auto n = static_cast<Eigen::Index>(sites_.size());
  if (matrix_.rows() != n || matrix_.cols() != n || sqrt_weights_.size() != n) {
    throw InvalidArgument("restricted operator: inconsistent sizes");
  }
}

RestrictedOperator restrict_to(const BlockKernel& kernel, const WindowFamily& windows) {
  if (windows.floors() != kernel.floors() ||
      !windows.space().same_as(kernel.ensemble().space())) {
    throw InvalidArgument("restrict: window family does not match the kernel");
  }
  std::vector<Site> sites = windows.sites();
  const auto n = static_cast<Eigen::Index>(sites.size());
  const RVector& sw = kernel.ensemble().space().sqrt_weight_vector();
  RVector site_sw(n);
  for (Eigen::Index i = 0; i < n; ++i) site_sw(i) = sw(sites[static_cast<std::size_t>(i)].node);
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = site_sw(i) * kernel(sites[static_cast<std::size_t>(i)],
                                    sites[static_cast<std::size_t>(j)]) * site_sw(j);
    }
  }
  return RestrictedOperator(std::move(sites), std::move(m), std::move(site_sw));
}

LogDeterminant fredholm_log_det(const RestrictedOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  return log_determinant(CMatrix::Identity(n, n) - op.matrix());
}

Complex fredholm_det(const RestrictedOperator& op) { return fredholm_log_det(op).value(); }

BlockKernel resolvent_kernel(const BlockKernel& kernel, const WindowFamily& windows,
                             ResolventOptions options) {
  const RestrictedOperator op = restrict_to(kernel, windows);
  const int floors = kernel.floors();
  const auto p = kernel.nodes();
  std::vector<CMatrix> blocks(static_cast<std::size_t>(floors * floors), CMatrix::Zero(p, p));
  std::vector<std::string> warnings;
  const auto n = static_cast<Eigen::Index>(op.size());
  if (n == 0) return BlockKernel(kernel.ensemble(), KernelKind::resolvent, std::move(blocks));

  const CMatrix id_minus = CMatrix::Identity(n, n) - op.matrix();
  const Eigen::PartialPivLU<CMatrix> lu(id_minus);
  const double rcond = lu.rcond();
  if (!(rcond >= options.hard_rcond)) {
    throw SingularMatrixError("Id - K_I", rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity(),
                              "windows carry (almost) zero probability of being empty");
  }
  if (rcond < options.warn_rcond) {
    std::ostringstream os;
    os << "Id - K_I is ill-conditioned (reciprocal condition estimate " << rcond << ")";
    warnings.push_back(os.str());
  }
  // (Id - S)^-1 S equals S (Id - S)^-1; one factorization serves all columns.
  const CMatrix sym = lu.solve(op.matrix());
  const auto& sites = op.sites();
  const RVector& sw = op.sqrt_weights();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Site& a = sites[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const Site& b = sites[static_cast<std::size_t>(j)];
      blocks[static_cast<std::size_t>(a.floor * floors + b.floor)](a.node, b.node) =
          sym(i, j) / (sw(i) * sw(j));
    }
  }
  return BlockKernel(kernel.ensemble(), KernelKind::resolvent, std::move(blocks),
                     std::move(warnings));
}

double dyson_mehta_check(const BlockKernel& kernel, int k, int m, int x, int z,
                         DysonMehtaForm form) {
  check_site(kernel, {k, x});
  check_site(kernel, {m, z});
  const RVector& w = kernel.ensemble().space().weight_vector();
  // Accumulated in long double so the residual reflects the kernel, not the sum.
  using X = detail::XComplex;
  X lhs{};
  for (int l = 0; l < kernel.floors(); ++l) {
    const CMatrix& left = kernel.block(k, l);
    const CMatrix& right = kernel.block(l, m);
    for (Eigen::Index y = 0; y < kernel.nodes(); ++y) {
      lhs += X(left(x, y)) * static_cast<long double>(w(y)) * X(right(y, z));
    }
  }
  const X kxz(kernel({k, x}, {m, z}));
  const auto d = static_cast<long double>(m - k);
  X rhs;
  if (form == DysonMehtaForm::stated) {
    const X g(kernel.ensemble().convolution(k, m)(x, z));
    rhs = kxz + d * kxz + 2.0L * d * g;
  } else {
    rhs = (1.0L - d) * kxz;
  }
  return static_cast<double>(std::abs(lhs - rhs));
}

}  // namespace janossy
