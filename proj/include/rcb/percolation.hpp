#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "rcb/distribution.hpp"
#include "rcb/rcr.hpp"
#include "rcb/two_copy.hpp"

namespace rcb {

class DisjointSets {
 public:
  explicit DisjointSets(int n = 0) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }
  int size_of(int x) { return size_[find(x)]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

/// Vertex sets (restricted to the region) of the bonds an activity pattern
/// refers to, in pattern order.
struct BondGeometry {
  int num_vertices = 0;
  std::vector<std::vector<Vertex>> bonds;
  std::vector<int> bond_ids;

  std::size_t size() const { return bonds.size(); }
};

BondGeometry geometry(const Hypergraph& h);

template <class Scalar>
BondGeometry geometry(const RcrBase<Scalar>& base) {
  BondGeometry g;
  for (const auto& rb : base.bonds) {
    g.bonds.push_back(rb.vertices);
    g.bond_ids.push_back(rb.bond);
    for (Vertex v : rb.vertices) g.num_vertices = std::max(g.num_vertices, v + 1);
  }
  for (int key : base.space.keys()) g.num_vertices = std::max(g.num_vertices, key + 1);
  return g;
}

/// One flag per bond, 1 = active.
using ActivityPattern = std::vector<std::uint8_t>;

ActivityPattern unpack_pattern(std::uint64_t code, std::size_t bonds);
std::uint64_t pack_pattern(const ActivityPattern& pattern);

/// Clusters of vertices joined by chains of active bonds. `root[v]` is -1 for
/// vertices no active bond touches.
struct ClusterPartition {
  std::vector<int> root;
  int count = 0;  // clusters formed by active bonds
};

ClusterPartition clusters(const BondGeometry& g, const ActivityPattern& pattern);

/// True iff some a in A and b in B are touched by active bonds of one cluster.
bool connected(const ClusterPartition& c, const Region& A, const Region& B);
bool connected(const BondGeometry& g, const ActivityPattern& pattern, const Region& A, const Region& B);

/// Activity of a hyperbond assignment (option index per bond).
template <class Scalar>
ActivityPattern activity(const RcrBase<Scalar>& base, std::span<const int> choice) {
  ActivityPattern p(base.bonds.size());
  for (std::size_t b = 0; b < p.size(); ++b) p[b] = base.bonds[b].is_active(base.bonds[b].options[choice[b]].subset);
  return p;
}

/// Feeds (pattern code, probability) pairs of the activity law obtained by
/// averaging, over spin configurations with weight `weights` (indexed like
/// base.space), the independent per-bond activations given the spins. The same
/// code may be reported several times.
template <class Scalar, class Sink>
void accumulate_patterns(const RcrBase<Scalar>& base, const VectorX<Scalar>& weights, Sink&& sink) {
  const std::size_t m = base.bonds.size();
  require(m <= 64, "activity patterns limited to 64 bonds");
  require(static_cast<std::uint64_t>(weights.size()) == base.space.size(), "weights do not match the base space");
  std::vector<std::vector<Scalar>> act(m);
  for (std::size_t b = 0; b < m; ++b)
    for (int x = 0; x < base.bonds[b].universe(); ++x) act[b].push_back(base.bonds[b].activation(x));
  std::vector<int> digits(base.space.dim(), 0);
  std::vector<int> uncertain;
  std::vector<Scalar> q;
  for (std::uint64_t c = 0; c < base.space.size(); ++c, base.space.next(digits)) {
    const Scalar& w = weights[static_cast<Eigen::Index>(c)];
    if (w == Scalar(0)) continue;
    std::uint64_t fixed = 0;
    uncertain.clear();
    q.clear();
    for (std::size_t b = 0; b < m; ++b) {
      const Scalar& a = act[b][base.bonds[b].indexer.index(digits)];
      if (a == Scalar(1)) {
        fixed |= std::uint64_t{1} << b;
      } else if (a != Scalar(0)) {
        uncertain.push_back(static_cast<int>(b));
        q.push_back(a);
      }
    }
    require(uncertain.size() <= 24, "too many undecided bonds in one configuration");
    const std::uint64_t subsets = std::uint64_t{1} << uncertain.size();
    for (std::uint64_t s = 0; s < subsets; ++s) {
      Scalar p = w;
      std::uint64_t code = fixed;
      for (std::size_t k = 0; k < uncertain.size(); ++k) {
        if ((s >> k) & 1u) {
          p *= q[k];
          code |= std::uint64_t{1} << uncertain[k];
        } else {
          p *= Scalar(1) - q[k];
        }
      }
      sink(code, p);
    }
  }
}

inline ProductSpace pattern_space(const BondGeometry& g) { return binary_space(g.bond_ids); }

/// Law of the activity pattern under the random-cluster measure of `base`
/// with spin law `mu` (the measure the base represents).
template <class Scalar>
FiniteDistribution<Scalar> activity_distribution(const RcrBase<Scalar>& base, const FiniteDistribution<Scalar>& mu) {
  require(base.bonds.size() <= 24, "dense activity law limited to 24 bonds");
  const BondGeometry g = geometry(base);
  VectorX<Scalar> w = VectorX<Scalar>::Zero(Eigen::Index{1} << base.bonds.size());
  accumulate_patterns(base, mu.weights(), [&](std::uint64_t code, const Scalar& p) {
    w[static_cast<Eigen::Index>(code)] += p;
  });
  return FiniteDistribution<Scalar>(pattern_space(g), std::move(w));
}

/// The same law through the literal definition: push the hyperbond marginal
/// P(eta) forward under the activity map.
template <class Scalar>
FiniteDistribution<Scalar> activity_distribution_literal(const RcrBase<Scalar>& base) {
  require(base.bonds.size() <= 24, "dense activity law limited to 24 bonds");
  const auto P = bond_marginal(base);
  VectorX<Scalar> w = VectorX<Scalar>::Zero(Eigen::Index{1} << base.bonds.size());
  std::vector<int> choice(P.space().dim(), 0);
  for (std::uint64_t c = 0; c < P.size(); ++c, P.space().next(choice))
    if (P[c] != Scalar(0)) w[static_cast<Eigen::Index>(pack_pattern(activity(base, choice)))] += P[c];
  return FiniteDistribution<Scalar>(pattern_space(geometry(base)), std::move(w));
}

/// P(A <-> B) under an activity-pattern law.
template <class Scalar>
Scalar connection_probability(const FiniteDistribution<Scalar>& patterns, const BondGeometry& g, const Region& A,
                              const Region& B) {
  Scalar total(0);
  for (std::uint64_t c = 0; c < patterns.size(); ++c)
    if (patterns[c] != Scalar(0) && connected(g, unpack_pattern(c, g.size()), A, B)) total += patterns[c];
  return total;
}

/// Everything a slice contributes: its spin weights mu(omega) mu(sigma - omega)
/// (summing to rho(sigma)), the symmetrized model and the base used.
template <class Scalar>
struct SliceData {
  OverlapSlice slice;
  CompiledModel<Scalar> model;
  RcrBase<Scalar> base;
  VectorX<Scalar> weights;
  Scalar rho{0};
};

/// Base chosen per slice from the slice's symmetrized model.
template <class Scalar>
using BaseFamily = std::function<RcrBase<Scalar>(const CompiledModel<Scalar>&, const OverlapSlice&)>;

template <class Scalar>
BaseFamily<Scalar> monotone_family() {
  return [](const CompiledModel<Scalar>& m, const OverlapSlice&) { return monotone_base(m); };
}

/// Symmetrized model of a slice, built directly from the compiled factors:
/// on admissible local configurations, w'(x) = w(x) w(sigma - x).
template <class Scalar>
CompiledModel<Scalar> symmetrized_model(const TwoCopyModel<Scalar>& tc, const OverlapSlice& s) {
  const auto& m = tc.model;
  const std::size_t n = m.space.dim();
  std::vector<std::vector<int>> to_domain(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int a : s.admissible[i]) {
      const auto& d = m.domains[i];
      to_domain[i].push_back(static_cast<int>(std::find(d.begin(), d.end(), a) - d.begin()));
    }
  CompiledModel<Scalar> out;
  out.space = slice_space(tc.spec.alphabet, tc.spec.region, s);
  out.domains = s.admissible;
  out.site_factors = m.site_factors;
  std::vector<int> local;
  for (const auto& f : m.factors) {
    Factor<Scalar> g;
    g.bond = f.bond;
    g.vertices = f.vertices;
    g.indexer.coords = f.indexer.coords;
    for (int c : f.indexer.coords) {
      g.indexer.strides.push_back(g.indexer.size);
      const int r = static_cast<int>(s.admissible[c].size());
      g.radices.push_back(r);
      g.indexer.size *= r;
    }
    g.table.resize(g.indexer.size);
    local.resize(g.radices.size());
    for (int x = 0; x < g.indexer.size; ++x) {
      g.indexer.decode(x, local, g.radices);
      int own = 0, mirrored = 0;
      for (std::size_t k = 0; k < local.size(); ++k) {
        const int c = g.indexer.coords[k];
        own += to_domain[c][local[k]] * f.indexer.strides[k];
        mirrored += to_domain[c][s.reflection[c][local[k]]] * f.indexer.strides[k];
      }
      g.table[x] = f.table[own] == Scalar(0) ? Scalar(0) : Scalar(f.table[own] * f.table[mirrored]);
    }
    out.factors.push_back(std::move(g));
  }
  return out;
}

template <class Scalar>
SliceData<Scalar> slice_data(const TwoCopyModel<Scalar>& tc, OverlapSlice s, const BaseFamily<Scalar>& family) {
  SliceData<Scalar> d;
  d.model = symmetrized_model(tc, s);
  d.base = family(d.model, s);
  d.weights = slice_weights(tc, s);
  d.rho = d.weights.sum();
  d.slice = std::move(s);
  return d;
}

/// Calls fn(SliceData) for every sigma with rho(sigma) > 0, in code order.
template <class Scalar, class Fn>
void for_each_slice(const TwoCopyModel<Scalar>& tc, const BaseFamily<Scalar>& family, Fn&& fn) {
  const auto rho = overlap_distribution(tc);
  for (std::uint64_t code : overlap_support(rho)) fn(slice_data(tc, make_slice(tc, rho.space().labels_of(code)), family));
}

/// Integrated random-cluster law: rho-mixture over slices of the activity
/// law of each slice's base.
template <class Scalar>
struct IntegratedRC {
  BondGeometry geometry;
  FiniteDistribution<Scalar> patterns;
  std::size_t slices = 0;
};

template <class Scalar>
IntegratedRC<Scalar> integrated_rc(const TwoCopyModel<Scalar>& tc,
                                   const BaseFamily<Scalar>& family = monotone_family<Scalar>()) {
  IntegratedRC<Scalar> out;
  const std::size_t m = tc.model.factors.size();
  require(m <= 24, "integrated law limited to 24 bonds");
  VectorX<Scalar> w = VectorX<Scalar>::Zero(Eigen::Index{1} << m);
  for_each_slice(tc, family, [&](const SliceData<Scalar>& d) {
    if (out.slices++ == 0) out.geometry = geometry(d.base);
    accumulate_patterns(d.base, d.weights, [&](std::uint64_t code, const Scalar& p) {
      w[static_cast<Eigen::Index>(code)] += p;
    });
  });
  if (out.slices == 0) {
    for (const auto& f : tc.model.factors) {
      out.geometry.bonds.push_back(f.vertices);
      out.geometry.bond_ids.push_back(f.bond);
    }
  }
  out.geometry.num_vertices = std::max(out.geometry.num_vertices, tc.spec.graph.num_vertices());
  out.patterns = FiniteDistribution<Scalar>(pattern_space(out.geometry), std::move(w));
  return out;
}

template <class Scalar>
Scalar integrated_connection(const IntegratedRC<Scalar>& irc, const Region& A, const Region& B) {
  return connection_probability(irc.patterns, irc.geometry, A, B);
}

/// P^sigma(A <-> B) within one slice (normalized by rho(sigma)).
template <class Scalar>
Scalar slice_connection_prob(const SliceData<Scalar>& d, const Region& A, const Region& B) {
  if (!(d.rho > Scalar(0))) fail(ErrorKind::ZeroSlice, "overlap configuration has probability zero");
  const BondGeometry g = geometry(d.base);
  Scalar total(0);
  accumulate_patterns(d.base, d.weights, [&](std::uint64_t code, const Scalar& p) {
    if (connected(g, unpack_pattern(code, g.size()), A, B)) total += p;
  });
  return total / d.rho;
}

template <class Scalar>
Scalar slice_connection_prob(const TwoCopyModel<Scalar>& tc, const std::vector<int>& sigma, const Region& A,
                             const Region& B, const BaseFamily<Scalar>& family = monotone_family<Scalar>()) {
  return slice_connection_prob(slice_data(tc, make_slice(tc, sigma), family), A, B);
}

/// p_b = sup over other bonds' activity with positive probability of
/// P(bond active | rest). `bond` is a pattern position.
template <class Scalar>
Scalar domination_probability(const FiniteDistribution<Scalar>& patterns, std::size_t bond) {
  const std::uint64_t bit = std::uint64_t{1} << bond;
  Scalar best(0);
  for (std::uint64_t c = 0; c < patterns.size(); ++c) {
    if (c & bit) continue;
    const Scalar& off = patterns[c];
    const Scalar& on = patterns[c | bit];
    const Scalar total = off + on;
    if (total > Scalar(0)) best = std::max(best, Scalar(on / total));
  }
  return best;
}

/// Finite-volume proxies of the two extremality conditions for a family of
/// balls around `center`.
struct ExtremalityRow {
  int radius = 0;
  std::size_t inner_sites = 0;
  std::size_t boundary_sites = 0;
  double connection = 0.0;     // integrated P(center <-> boundary of the ball)
  double quantile_mass = 0.0;  // rho(P^sigma(center <-> boundary) <= eps)
  bool condition_a = false;
  bool condition_b = false;
};

template <class Scalar>
std::vector<ExtremalityRow> extremality_diagnostic(const TwoCopyModel<Scalar>& tc, const Region& center,
                                                   const std::vector<int>& radii, double epsilon) {
  const auto& g = tc.spec.graph;
  const Region& outer = tc.spec.region;
  std::vector<ExtremalityRow> rows(radii.size());
  std::vector<Region> targets(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const Region inner = region_intersection(ball(g, center, radii[r]), outer);
    targets[r] = region_difference(region_intersection(boundary(g, inner), outer), center);
    rows[r].radius = radii[r];
    rows[r].inner_sites = inner.size();
    rows[r].boundary_sites = targets[r].size();
  }
  std::vector<Scalar> conn(radii.size(), Scalar(0)), good(radii.size(), Scalar(0));
  for_each_slice(tc, monotone_family<Scalar>(), [&](const SliceData<Scalar>& d) {
    for (std::size_t r = 0; r < radii.size(); ++r) {
      const Scalar p = slice_connection_prob(d, center, targets[r]);
      conn[r] += p * d.rho;
      if (to_double(p) <= epsilon) good[r] += d.rho;
    }
  });
  for (std::size_t r = 0; r < radii.size(); ++r) {
    rows[r].connection = to_double(conn[r]);
    rows[r].quantile_mass = to_double(good[r]);
    rows[r].condition_a = rows[r].connection <= epsilon;
    rows[r].condition_b = rows[r].quantile_mass >= 1.0 - epsilon;
  }
  return rows;
}

}  // namespace rcb
