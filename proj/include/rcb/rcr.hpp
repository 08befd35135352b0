#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcb/distribution.hpp"
#include "rcb/error.hpp"
#include "rcb/gibbs.hpp"
#include "rcb/nnls.hpp"
#include "rcb/scalar.hpp"
#include "rcb/two_copy.hpp"

namespace rcb {

/// Bitmask over a bond's local configurations (at most 64 of them).
using LocalSet = std::uint64_t;
inline constexpr int kMaxLocalStates = 64;

inline LocalSet full_set(int universe) {
  return universe >= 64 ? ~LocalSet{0} : (LocalSet{1} << universe) - 1;
}
inline bool contains(LocalSet s, int local) { return (s >> local) & 1u; }

/// Distinct values of `weights`, strictly decreasing (0 included when present).
template <class Scalar>
std::vector<Scalar> distinct_levels(std::span<const Scalar> weights) {
  std::vector<Scalar> levels(weights.begin(), weights.end());
  std::sort(levels.begin(), levels.end(), [](const Scalar& a, const Scalar& b) { return a > b; });
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

/// Linear system A p = c w over candidate subsets: membership(i, j) = 1 iff subset j
/// contains the configurations of level i; `levels` are the Boltzmann factors.
template <class Scalar>
struct LevelSystem {
  std::vector<Scalar> levels;
  MatrixX<Scalar> membership;
};

template <class Scalar>
struct BernoulliSolution {
  VectorX<Scalar> p;
  Scalar c{0};
  bool degenerate = false;  // membership matrix rank-deficient; p is one of many
  double residual = 0.0;
};

/// Closed form for the nested family {w >= w_i}: p_i = (w_i - w_{i+1}) / w_1.
template <class Scalar>
std::vector<Scalar> monotone_rcr(const std::vector<Scalar>& levels) {
  require(!levels.empty(), "monotone_rcr: no levels");
  require(levels.front() > Scalar(0), "monotone_rcr: top level must be positive");
  for (std::size_t i = 1; i < levels.size(); ++i)
    require(levels[i] < levels[i - 1], "monotone_rcr: levels must be strictly decreasing");
  require(!(levels.back() < Scalar(0)), "monotone_rcr: negative level");
  std::vector<Scalar> p(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const Scalar next = i + 1 < levels.size() ? levels[i + 1] : Scalar(0);
    p[i] = (levels[i] - next) / levels.front();
  }
  return p;
}

/// Same closed form from potentials phi_1 > ... > phi_k.
std::vector<double> monotone_rcr_potentials(const std::vector<double>& phi);

template <class Scalar>
LevelSystem<Scalar> monotone_level_system(const std::vector<Scalar>& levels) {
  const auto k = static_cast<Eigen::Index>(levels.size());
  LevelSystem<Scalar> sys{levels, MatrixX<Scalar>::Zero(k, k)};
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) sys.membership(i, j) = Scalar(1);
  return sys;
}

/// Solves A p = c w, sum p = 1, p >= 0 for a free scalar c > 0. Writing
/// q = p / c this is A q = w, q >= 0. Square invertible systems are solved
/// exactly in the backing scalar; everything else goes through double
/// least squares with a nonnegativity fallback. Throws Infeasible.
template <class Scalar>
BernoulliSolution<Scalar> solve_bernoulli_rcr(const LevelSystem<Scalar>& sys, double tolerance = 1e-10) {
  const MatrixX<Scalar>& A = sys.membership;
  const auto k = static_cast<Eigen::Index>(sys.levels.size());
  require(A.rows() == k && A.cols() >= 1, "level system shape mismatch");
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      require(A(i, j) == Scalar(0) || A(i, j) == Scalar(1), "membership matrix must be 0-1");
  VectorX<Scalar> w(k);
  for (Eigen::Index i = 0; i < k; ++i) w[i] = sys.levels[static_cast<std::size_t>(i)];

  BernoulliSolution<Scalar> out;
  auto finish = [&](VectorX<Scalar> q) {
    const Scalar total = q.sum();
    if (!(total > Scalar(0))) fail(ErrorKind::Infeasible, "level system only admits the zero solution");
    out.c = Scalar(1) / total;
    out.p = q * out.c;
    VectorX<Scalar> r = A * out.p - w * out.c;
    out.residual = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) out.residual = std::max(out.residual, std::abs(to_double(r[i])));
    return out;
  };

  if (A.rows() == A.cols()) {
    const auto lu = A.fullPivLu();
    if (lu.isInvertible()) {
      VectorX<Scalar> q = lu.solve(w);
      for (Eigen::Index j = 0; j < q.size(); ++j)
        if (q[j] < Scalar(0)) {
          if constexpr (is_exact_v<Scalar>) {
            fail(ErrorKind::Infeasible, "unique solution of the level system has a negative entry");
          } else if (q[j] < -tolerance) {
            fail(ErrorKind::Infeasible, "unique solution of the level system has a negative entry");
          } else {
            q[j] = 0.0;
          }
        }
      return finish(q);
    }
  }
  if constexpr (is_exact_v<Scalar>) {
    fail(ErrorKind::InvalidArgument, "exact backing needs a square invertible level system");
  } else {
    const double scale = w.cwiseAbs().maxCoeff();
    const Eigen::VectorXd ws = w / scale;
    const auto cod = A.completeOrthogonalDecomposition();
    out.degenerate = cod.rank() < A.cols();
    Eigen::VectorXd q = cod.solve(ws);
    const bool exact_fit = (A * q - ws).cwiseAbs().maxCoeff() <= tolerance;
    if (!exact_fit || q.minCoeff() < -tolerance) {
      const NnlsResult r = nnls(A, ws);
      if (r.residual > tolerance) fail(ErrorKind::Infeasible, "no nonnegative solution of the level system");
      q = r.x;
    }
    q = q.cwiseMax(0.0);
    return finish(q * scale);
  }
}

template <class Scalar>
struct BondOption {
  LocalSet subset = 0;
  Scalar probability{0};
};

/// Base law of one hyperbond: a distribution over subsets of its local
/// configurations (those of b restricted to the region, over the compiled
/// domains).
template <class Scalar>
struct RcrBond {
  int bond = -1;
  std::vector<Vertex> vertices;
  std::vector<int> radices;
  LocalIndexer indexer;
  std::vector<Scalar> weights;  // factor table the base represents; may be empty
  std::vector<BondOption<Scalar>> options;

  int universe() const { return indexer.size; }
  LocalSet full() const { return full_set(indexer.size); }
  bool is_active(LocalSet s) const { return s != full(); }

  /// nu_b of the subsets containing `local`.
  Scalar mass(int local) const {
    Scalar m(0);
    for (const auto& o : options)
      if (contains(o.subset, local)) m += o.probability;
    return m;
  }
  /// Probability of the inactive (full) subset.
  Scalar inactive_mass() const {
    Scalar m(0);
    for (const auto& o : options)
      if (o.subset == full()) m += o.probability;
    return m;
  }
  /// P(active | omega_b = local) in the joint spin-bond law.
  Scalar activation(int local) const {
    const Scalar m = mass(local);
    if (m == Scalar(0)) return Scalar(0);
    return Scalar(1) - inactive_mass() / m;
  }
};

template <class Scalar>
struct RcrBase {
  ProductSpace space;
  std::vector<RcrBond<Scalar>> bonds;
};

namespace detail {

template <class Scalar>
RcrBond<Scalar> bond_shell(const Factor<Scalar>& f) {
  if (f.indexer.size > kMaxLocalStates)
    fail(ErrorKind::TooLarge, "hyperbond " + std::to_string(f.bond) + " has more than 64 local configurations");
  RcrBond<Scalar> rb;
  rb.bond = f.bond;
  rb.vertices = f.vertices;
  rb.radices = f.radices;
  rb.indexer = f.indexer;
  rb.weights = f.table;
  return rb;
}

template <class Scalar>
LocalSet level_set(const std::vector<Scalar>& weights, const Scalar& at_least) {
  LocalSet s = 0;
  for (std::size_t x = 0; x < weights.size(); ++x)
    if (!(weights[x] < at_least)) s |= LocalSet{1} << x;
  return s;
}

}  // namespace detail

/// Monotone Bernoulli base: per bond, subset {w >= w_i} with probability
/// (w_i - w_{i+1}) / w_1. Zero-probability subsets are dropped.
template <class Scalar>
RcrBase<Scalar> monotone_base(const CompiledModel<Scalar>& m) {
  RcrBase<Scalar> base{m.space, {}};
  for (const auto& f : m.factors) {
    RcrBond<Scalar> rb = detail::bond_shell(f);
    const auto levels = distinct_levels<Scalar>(f.table);
    const auto p = monotone_rcr(levels);
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (p[i] > Scalar(0)) rb.options.push_back({detail::level_set(f.table, levels[i]), p[i]});
    base.bonds.push_back(std::move(rb));
  }
  return base;
}

template <class Scalar>
RcrBase<Scalar> monotone_base(const GibbsSpec<Scalar>& spec) {
  return monotone_base(compile(spec));
}

/// True when `s` never splits configurations of equal weight.
template <class Scalar>
bool respects_levels(const std::vector<Scalar>& weights, LocalSet s) {
  for (std::size_t x = 0; x < weights.size(); ++x)
    for (std::size_t y = x + 1; y < weights.size(); ++y)
      if (weights[x] == weights[y] && contains(s, static_cast<int>(x)) != contains(s, static_cast<int>(y)))
        return false;
  return true;
}

/// Bernoulli base from user-chosen candidate subsets (one list per compiled
/// factor). Each candidate must respect the energy levels.
template <class Scalar>
RcrBase<Scalar> subset_base(const CompiledModel<Scalar>& m, const std::vector<std::vector<LocalSet>>& candidates,
                            bool* degenerate = nullptr) {
  require(candidates.size() == m.factors.size(), "one candidate list per factor");
  RcrBase<Scalar> base{m.space, {}};
  if (degenerate) *degenerate = false;
  for (std::size_t b = 0; b < m.factors.size(); ++b) {
    const auto& f = m.factors[b];
    RcrBond<Scalar> rb = detail::bond_shell(f);
    const auto levels = distinct_levels<Scalar>(f.table);
    const auto& cand = candidates[b];
    require(!cand.empty(), "empty candidate list for bond " + std::to_string(f.bond));
    LevelSystem<Scalar> sys{levels, MatrixX<Scalar>::Zero(static_cast<Eigen::Index>(levels.size()),
                                                          static_cast<Eigen::Index>(cand.size()))};
    for (std::size_t j = 0; j < cand.size(); ++j) {
      require(cand[j] != 0 && (cand[j] & ~rb.full()) == 0, "candidate subset outside the bond's local space");
      require(respects_levels(f.table, cand[j]), "candidate subset splits an energy level on bond " +
                                                      std::to_string(f.bond));
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto x = std::find(f.table.begin(), f.table.end(), levels[i]) - f.table.begin();
        if (contains(cand[j], static_cast<int>(x)))
          sys.membership(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Scalar(1);
      }
    }
    const auto sol = solve_bernoulli_rcr(sys);
    if (degenerate && sol.degenerate) *degenerate = true;
    for (std::size_t j = 0; j < cand.size(); ++j)
      if (sol.p[static_cast<Eigen::Index>(j)] > Scalar(0))
        rb.options.push_back({cand[j], sol.p[static_cast<Eigen::Index>(j)]});
    base.bonds.push_back(std::move(rb));
  }
  return base;
}

/// Local index of the reflected configuration for every local index of `rb`.
/// `site_reflection[c][d]` maps digit d of space coordinate c.
template <class Scalar>
std::vector<int> local_reflection(const RcrBond<Scalar>& rb, const std::vector<std::vector<int>>& site_reflection) {
  std::vector<int> out(rb.universe());
  std::vector<int> digits(rb.radices.size());
  for (int x = 0; x < rb.universe(); ++x) {
    rb.indexer.decode(x, digits, rb.radices);
    int image = 0;
    for (std::size_t k = 0; k < digits.size(); ++k)
      image += site_reflection[rb.indexer.coords[k]][digits[k]] * rb.indexer.strides[k];
    out[x] = image;
  }
  return out;
}

inline LocalSet reflect_set(LocalSet s, const std::vector<int>& map) {
  LocalSet out = 0;
  for (std::size_t x = 0; x < map.size(); ++x)
    if (contains(s, static_cast<int>(x))) out |= LocalSet{1} << map[x];
  return out;
}

/// nu'(S) = (nu(S) + nu(sigma - S)) / 2. Throws NonSymmetrizable when a
/// level-respecting subset reflects onto one that splits a level.
template <class Scalar>
RcrBase<Scalar> symmetrize_base(const RcrBase<Scalar>& base, const std::vector<std::vector<int>>& site_reflection) {
  RcrBase<Scalar> out{base.space, {}};
  for (const auto& rb : base.bonds) {
    const auto map = local_reflection(rb, site_reflection);
    RcrBond<Scalar> sb = rb;
    sb.options.clear();
    auto add = [&](LocalSet s, const Scalar& p) {
      for (auto& o : sb.options)
        if (o.subset == s) {
          o.probability += p;
          return;
        }
      sb.options.push_back({s, p});
    };
    for (const auto& o : rb.options) {
      const LocalSet image = reflect_set(o.subset, map);
      if (!rb.weights.empty() && respects_levels(rb.weights, o.subset) && !respects_levels(rb.weights, image))
        fail(ErrorKind::NonSymmetrizable,
             "reflected subset splits an energy level on bond " + std::to_string(rb.bond));
      const Scalar half = o.probability / Scalar(2);
      add(o.subset, half);
      add(image, half);
    }
    out.bonds.push_back(std::move(sb));
  }
  return out;
}

template <class Scalar>
RcrBase<Scalar> symmetrize_base(const RcrBase<Scalar>& base, const OverlapSlice& s) {
  return symmetrize_base(base, s.reflection);
}

/// The spin law an RCR base defines: mu(omega) proportional to
/// sum_eta nu(eta) prod_b 1[omega_b in eta_b] = prod_b nu_b(eta_b containing omega_b).
template <class Scalar>
FiniteDistribution<Scalar> reconstruct(const RcrBase<Scalar>& base, EnumerationLimits limits = {}) {
  if (!base.space.fits(limits.max_states)) fail(ErrorKind::TooLarge, "configuration space exceeds the enumeration cap");
  const std::uint64_t total = base.space.size();
  std::vector<std::vector<Scalar>> mass(base.bonds.size());
  for (std::size_t b = 0; b < base.bonds.size(); ++b)
    for (int x = 0; x < base.bonds[b].universe(); ++x) mass[b].push_back(base.bonds[b].mass(x));
  VectorX<Scalar> w(static_cast<Eigen::Index>(total));
  std::vector<int> digits(base.space.dim(), 0);
  for (std::uint64_t c = 0; c < total; ++c) {
    Scalar v(1);
    for (std::size_t b = 0; b < base.bonds.size() && v != Scalar(0); ++b)
      v *= mass[b][base.bonds[b].indexer.index(digits)];
    w[static_cast<Eigen::Index>(c)] = v;
    base.space.next(digits);
  }
  return FiniteDistribution<Scalar>::normalized(base.space, std::move(w));
}

/// n_eta = |{omega : omega_b in eta_b for all b}|, with `choice[b]` an option
/// index of bond b. Unconstrained sites multiply in their domain sizes; each
/// connected group of constrained bonds is enumerated separately.
template <class Scalar>
std::uint64_t count_compatible(const RcrBase<Scalar>& base, std::span<const int> choice) {
  const std::size_t n = base.space.dim();
  std::vector<int> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> constrained;
  for (std::size_t b = 0; b < base.bonds.size(); ++b) {
    const auto& rb = base.bonds[b];
    const LocalSet s = rb.options[choice[b]].subset;
    if (s == rb.full()) continue;
    if (s == 0) return 0;
    constrained.push_back(static_cast<int>(b));
    const auto& coords = rb.indexer.coords;
    for (std::size_t k = 1; k < coords.size(); ++k) parent[find(coords[k])] = find(coords[0]);
  }
  std::vector<char> touched(n, 0);
  for (int b : constrained)
    for (int c : base.bonds[b].indexer.coords) touched[c] = 1;
  std::uint64_t count = 1;
  std::vector<int> digits(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (!touched[root]) {
      count *= static_cast<std::uint64_t>(base.space.radix(root));
      continue;
    }
    if (find(static_cast<int>(root)) != static_cast<int>(root)) continue;
    std::vector<int> sites, bonds;
    for (std::size_t i = 0; i < n; ++i)
      if (touched[i] && find(static_cast<int>(i)) == static_cast<int>(root)) sites.push_back(static_cast<int>(i));
    for (int b : constrained)
      if (find(base.bonds[b].indexer.coords[0]) == static_cast<int>(root)) bonds.push_back(b);
    std::uint64_t local = 0;
    for (int i : sites) digits[i] = 0;
    for (;;) {
      bool ok = true;
      for (int b : bonds) {
        const auto& rb = base.bonds[b];
        if (!contains(rb.options[choice[b]].subset, rb.indexer.index(digits))) {
          ok = false;
          break;
        }
      }
      if (ok) ++local;
      std::size_t k = 0;
      for (; k < sites.size(); ++k) {
        if (++digits[sites[k]] < base.space.radix(sites[k])) break;
        digits[sites[k]] = 0;
      }
      if (k == sites.size()) break;
    }
    count *= local;
    if (count == 0) return 0;
  }
  return count;
}

/// Space of hyperbond assignments: coordinate b takes an option index of bond b.
template <class Scalar>
ProductSpace assignment_space(const RcrBase<Scalar>& base) {
  std::vector<int> keys;
  std::vector<std::vector<int>> labels;
  for (const auto& rb : base.bonds) {
    keys.push_back(rb.bond);
    std::vector<int> l(rb.options.size());
    for (std::size_t j = 0; j < l.size(); ++j) l[j] = static_cast<int>(j);
    labels.push_back(std::move(l));
  }
  return ProductSpace(std::move(keys), std::move(labels));
}

/// Random-cluster law on hyperbond assignments: P(eta) proportional to
/// nu(eta) * n_eta.
template <class Scalar>
FiniteDistribution<Scalar> bond_marginal(const RcrBase<Scalar>& base, std::uint64_t max_assignments = 10'000'000) {
  ProductSpace space = assignment_space(base);
  if (!space.fits(max_assignments)) fail(ErrorKind::TooLarge, "hyperbond assignment space exceeds the cap");
  VectorX<Scalar> w(static_cast<Eigen::Index>(space.size()));
  std::vector<int> choice(space.dim(), 0);
  for (std::uint64_t c = 0; c < space.size(); ++c) {
    Scalar v(1);
    for (std::size_t b = 0; b < choice.size(); ++b) v *= base.bonds[b].options[choice[b]].probability;
    if (v != Scalar(0)) v *= Scalar(count_compatible(base, choice));
    w[static_cast<Eigen::Index>(c)] = v;
    space.next(choice);
  }
  return FiniteDistribution<Scalar>::normalized(std::move(space), std::move(w));
}

}  // namespace rcb
