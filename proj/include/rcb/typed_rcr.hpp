#pragma once

#include <array>
#include <vector>

#include "rcb/rcr.hpp"

namespace rcb {

/// Two subset families per bond whose per-level masses multiply:
/// [A_alpha p_alpha]_k [A_beta p_beta]_k = c w_k.
struct TypedLevelSystem {
  std::vector<double> levels;
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;
  /// Optional zero-forcing masks: entry j false forces p_j = 0.
  std::vector<bool> alpha_allowed;
  std::vector<bool> beta_allowed;
};

struct TypedSolution {
  Eigen::VectorXd p_alpha;
  Eigen::VectorXd p_beta;
  double c = 0.0;
  double residual = 0.0;
  bool non_unique = false;
  bool closed_form = false;
};

/// Alternating nonnegative least squares with deterministic restarts. The
/// blue/red pattern (alpha = {top level, all}, beta = {middle level, all} on
/// three levels) is answered by its closed form c = w3 / (w1 w2). Throws
/// Infeasible when no restart reaches the tolerance.
TypedSolution solve_typed_rcr(const TypedLevelSystem& sys, double tolerance = 1e-10, int iterations = 100);

template <class Scalar>
struct TypedRcrBase {
  RcrBase<Scalar> alpha;
  RcrBase<Scalar> beta;
};

/// Blue/red base for two copies of a pair-interaction model. The spec is the
/// single-copy model; the base lives on its doubled spec (copy two at v + n).
/// Per bond with three levels w1 > w2 > w3 (both copies satisfied / one / none)
/// blue = top level with probability 1 - w3/w1, red = middle level with
/// probability 1 - w3/w2. With +-J couplings these are 1 - e^{-4|J|} and
/// 1 - e^{-2|J|}.
template <class Scalar>
TypedRcrBase<Scalar> mns_base(const CompiledModel<Scalar>& doubled) {
  TypedRcrBase<Scalar> out{{doubled.space, {}}, {doubled.space, {}}};
  for (const auto& f : doubled.factors) {
    RcrBond<Scalar> a = detail::bond_shell(f);
    RcrBond<Scalar> b = a;
    const auto levels = distinct_levels<Scalar>(f.table);
    const LocalSet all = a.full();
    require(levels.size() <= 3, "blue/red base expects at most three levels per bond");
    require(levels.back() > Scalar(0), "blue/red base needs strictly positive weights");
    if (levels.size() == 1) {
      a.options = {{all, Scalar(1)}};
      b.options = {{all, Scalar(1)}};
    } else {
      const Scalar& w1 = levels[0];
      const Scalar& wl = levels.back();
      const LocalSet top = detail::level_set(f.table, w1);
      a.options = {{top, Scalar(1) - wl / w1}, {all, wl / w1}};
      if (levels.size() == 3) {
        const Scalar& w2 = levels[1];
        const LocalSet middle = detail::level_set(f.table, w2) & ~top;
        b.options = {{middle, Scalar(1) - wl / w2}, {all, wl / w2}};
      } else {
        b.options = {{all, Scalar(1)}};
      }
    }
    out.alpha.bonds.push_back(std::move(a));
    out.beta.bonds.push_back(std::move(b));
  }
  return out;
}

/// mu(omega) proportional to prod_b nu_alpha(S containing omega_b) nu_beta(S containing omega_b).
template <class Scalar>
FiniteDistribution<Scalar> reconstruct_typed(const TypedRcrBase<Scalar>& base, EnumerationLimits limits = {}) {
  const auto& space = base.alpha.space;
  if (!space.fits(limits.max_states)) fail(ErrorKind::TooLarge, "configuration space exceeds the enumeration cap");
  VectorX<Scalar> w(static_cast<Eigen::Index>(space.size()));
  std::vector<int> digits(space.dim(), 0);
  for (std::uint64_t c = 0; c < space.size(); ++c) {
    Scalar v(1);
    for (std::size_t b = 0; b < base.alpha.bonds.size(); ++b) {
      const int x = base.alpha.bonds[b].indexer.index(digits);
      v *= base.alpha.bonds[b].mass(x) * base.beta.bonds[b].mass(x);
    }
    w[static_cast<Eigen::Index>(c)] = v;
    space.next(digits);
  }
  return FiniteDistribution<Scalar>::normalized(space, std::move(w));
}

/// Per-bond outcome of a typed sample: bit 0 = alpha active, bit 1 = beta active.
/// Returns the exact law of the outcome vector over `4^bonds` cells (bond 0
/// least significant), from the spin law and the conditional independence of
/// bond variables given the spins.
template <class Scalar>
FiniteDistribution<Scalar> typed_pattern_distribution(const TypedRcrBase<Scalar>& base,
                                                       const FiniteDistribution<Scalar>& mu) {
  const std::size_t m = base.alpha.bonds.size();
  require(m <= 8, "typed pattern law limited to 8 bonds");
  std::vector<int> keys;
  for (const auto& rb : base.alpha.bonds) keys.push_back(rb.bond);
  ProductSpace space(keys, std::vector<std::vector<int>>(m, std::vector<int>{0, 1, 2, 3}));
  VectorX<Scalar> w = VectorX<Scalar>::Zero(static_cast<Eigen::Index>(space.size()));
  const auto& sspace = mu.space();
  std::vector<int> digits(sspace.dim(), 0);
  std::vector<std::array<Scalar, 4>> cell(m);
  for (std::uint64_t c = 0; c < mu.size(); ++c, sspace.next(digits)) {
    if (mu[c] == Scalar(0)) continue;
    for (std::size_t b = 0; b < m; ++b) {
      const int x = base.alpha.bonds[b].indexer.index(digits);
      const Scalar qa = base.alpha.bonds[b].activation(x);
      const Scalar qb = base.beta.bonds[b].activation(x);
      cell[b] = {(Scalar(1) - qa) * (Scalar(1) - qb), qa * (Scalar(1) - qb), (Scalar(1) - qa) * qb, qa * qb};
    }
    for (std::uint64_t code = 0; code < space.size(); ++code) {
      Scalar v = mu[c];
      std::uint64_t rest = code;
      for (std::size_t b = 0; b < m && v != Scalar(0); ++b, rest >>= 2) v *= cell[b][rest & 3u];
      w[static_cast<Eigen::Index>(code)] += v;
    }
  }
  return FiniteDistribution<Scalar>(std::move(space), std::move(w));
}

}  // namespace rcb
