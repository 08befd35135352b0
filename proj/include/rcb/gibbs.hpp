#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rcb/distribution.hpp"
#include "rcb/error.hpp"
#include "rcb/lattice.hpp"
#include "rcb/parallel.hpp"
#include "rcb/product_space.hpp"
#include "rcb/scalar.hpp"

namespace rcb {

/// Ordered, distinct integer spin values.
struct Alphabet {
  std::vector<int> values;

  int size() const { return static_cast<int>(values.size()); }
  int value(int index) const { return values[index]; }
  /// Index of `v`, or -1.
  int index_of(int v) const;
};

Alphabet make_alphabet(std::vector<int> values);

/// Bond potential phi(omega_b) in the plus-sign convention (weight e^{+phi}),
/// or an explicit hard-core exclusion.
class Potential {
 public:
  static Potential finite(double phi) { return Potential(phi, false); }
  static Potential forbidden() { return Potential(0.0, true); }

  bool is_forbidden() const { return forbidden_; }
  double value() const { return value_; }
  double factor() const { return forbidden_ ? 0.0 : std::exp(value_); }

 private:
  Potential(double v, bool f) : value_(v), forbidden_(f) {}
  double value_;
  bool forbidden_;
};

/// Per-bond Boltzmann factors e^{phi(omega_b)}; 0 marks a forbidden local
/// configuration. Local configurations of bond b are indexed in mixed radix
/// over b's sorted vertices, first vertex least significant, digit = alphabet
/// index.
template <class Scalar>
struct Interaction {
  std::vector<std::vector<Scalar>> factors;
};

Interaction<double> from_potentials(const std::vector<std::vector<Potential>>& tables);

std::size_t local_state_count(const Alphabet& alphabet, const Hyperbond& bond);

/// Fixed exterior spins (vertex -> alphabet index).
using BoundaryCondition = std::map<Vertex, int>;

template <class Scalar>
struct GibbsSpec {
  Hypergraph graph;
  Alphabet alphabet;
  Interaction<Scalar> interaction;
  Region region;
  BoundaryCondition boundary;
  /// Optional per-site allowed alphabet indices (region order). Empty means the
  /// full alphabet everywhere.
  std::vector<std::vector<int>> domains;
};

/// Maps a configuration's digit vector to a bond's local index.
struct LocalIndexer {
  std::vector<int> coords;
  std::vector<int> strides;
  int size = 1;

  int index(std::span<const int> digits) const {
    int idx = 0;
    for (std::size_t k = 0; k < coords.size(); ++k) idx += digits[coords[k]] * strides[k];
    return idx;
  }
  void decode(int local, std::span<int> out, std::span<const int> radices) const {
    for (std::size_t k = 0; k < coords.size(); ++k) {
      out[k] = local % radices[k];
      local /= radices[k];
    }
  }
};

/// A bond term restricted to the region: table over the product of the
/// domains of b ∩ Λ, with boundary spins substituted.
template <class Scalar>
struct Factor {
  int bond = -1;
  std::vector<Vertex> vertices;  // b ∩ Λ
  std::vector<int> radices;      // domain size per coordinate of `vertices`
  LocalIndexer indexer;
  std::vector<Scalar> table;
};

template <class Scalar>
struct CompiledModel {
  ProductSpace space;  // keys = region vertices, labels = allowed spin values
  std::vector<std::vector<int>> domains;  // alphabet indices per site
  std::vector<Factor<Scalar>> factors;
  std::vector<std::vector<int>> site_factors;

  Scalar weight(std::span<const int> digits) const {
    Scalar w(1);
    for (const auto& f : factors) {
      const Scalar& t = f.table[f.indexer.index(digits)];
      if (t == Scalar(0)) return Scalar(0);
      w *= t;
    }
    return w;
  }
};

struct EnumerationLimits {
  std::uint64_t max_states = std::uint64_t{1} << 24;
};

template <class Scalar>
void validate(const GibbsSpec<Scalar>& spec) {
  const auto& g = spec.graph;
  const auto& a = spec.alphabet;
  require(a.size() >= 2, "alphabet needs at least two values");
  require(spec.interaction.factors.size() == g.num_bonds(),
          "interaction must provide one table per bond");
  for (std::size_t b = 0; b < g.num_bonds(); ++b) {
    const auto& t = spec.interaction.factors[b];
    require(t.size() == local_state_count(a, g.bond(b)),
            "interaction table size mismatch on bond " + std::to_string(b));
    bool any = false;
    for (const auto& w : t) {
      require(!(w < Scalar(0)), "negative Boltzmann factor on bond " + std::to_string(b));
      any = any || w > Scalar(0);
    }
    require(any, "bond " + std::to_string(b) + " forbids every local configuration");
  }
  for (Vertex v : spec.region) require(v >= 0 && v < g.num_vertices(), "region vertex out of range");
  require(std::is_sorted(spec.region.begin(), spec.region.end()), "region must be sorted");
  for (const auto& [v, idx] : spec.boundary) {
    require(v >= 0 && v < g.num_vertices(), "boundary vertex out of range");
    require(!region_contains(spec.region, v), "boundary condition overlaps the region");
    require(idx >= 0 && idx < a.size(), "boundary value out of alphabet");
  }
  if (!spec.domains.empty()) {
    require(spec.domains.size() == spec.region.size(), "one domain per region site");
    for (const auto& d : spec.domains) {
      require(!d.empty(), "empty site domain");
      for (int i : d) require(i >= 0 && i < a.size(), "domain index out of alphabet");
    }
  }
}

/// Restricts every bond meeting the region to the region. Bonds whose exterior
/// part is not fully covered by the boundary condition are dropped (free).
template <class Scalar>
CompiledModel<Scalar> compile(const GibbsSpec<Scalar>& spec) {
  validate(spec);
  const auto& g = spec.graph;
  const auto& a = spec.alphabet;
  CompiledModel<Scalar> m;
  const std::size_t n = spec.region.size();
  m.domains.resize(n);
  std::vector<std::vector<int>> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.domains.empty()) {
      for (int k = 0; k < a.size(); ++k) m.domains[i].push_back(k);
    } else {
      m.domains[i] = spec.domains[i];
    }
    for (int k : m.domains[i]) labels[i].push_back(a.value(k));
  }
  m.space = ProductSpace(std::vector<int>(spec.region.begin(), spec.region.end()), labels);
  std::vector<int> position(g.num_vertices(), -1);
  for (std::size_t i = 0; i < n; ++i) position[spec.region[i]] = static_cast<int>(i);

  m.site_factors.assign(n, {});
  for (std::size_t b = 0; b < g.num_bonds(); ++b) {
    const auto& vs = g.bond(b).vertices;
    bool meets = false, covered = true;
    for (Vertex v : vs) {
      if (position[v] >= 0) meets = true;
      else if (!spec.boundary.count(v)) covered = false;
    }
    if (!meets || !covered) continue;
    Factor<Scalar> f;
    f.bond = static_cast<int>(b);
    for (Vertex v : vs) {
      if (position[v] < 0) continue;
      f.vertices.push_back(v);
      f.indexer.coords.push_back(position[v]);
      f.indexer.strides.push_back(f.indexer.size);
      const int r = static_cast<int>(m.domains[position[v]].size());
      f.radices.push_back(r);
      f.indexer.size *= r;
    }
    f.table.resize(f.indexer.size);
    std::vector<int> local(f.vertices.size());
    const auto& full = spec.interaction.factors[b];
    for (int idx = 0; idx < f.indexer.size; ++idx) {
      f.indexer.decode(idx, local, f.radices);
      std::size_t full_index = 0, stride = 1, k = 0;
      for (Vertex v : vs) {
        const int alpha = position[v] >= 0 ? m.domains[position[v]][local[k++]]
                                           : spec.boundary.at(v);
        full_index += stride * static_cast<std::size_t>(alpha);
        stride *= static_cast<std::size_t>(a.size());
      }
      f.table[idx] = full[full_index];
    }
    for (int c : f.indexer.coords) m.site_factors[c].push_back(static_cast<int>(m.factors.size()));
    m.factors.push_back(std::move(f));
  }
  return m;
}

/// Unnormalized weights of every configuration, enumerated in chunks.
template <class Scalar>
VectorX<Scalar> configuration_weights(const CompiledModel<Scalar>& m, EnumerationLimits limits = {}) {
  if (!m.space.fits(limits.max_states))
    fail(ErrorKind::TooLarge, "configuration space exceeds the enumeration cap of " +
                                  std::to_string(limits.max_states) + " states");
  const std::uint64_t total = m.space.size();
  VectorX<Scalar> w(static_cast<Eigen::Index>(total));
  chunked_map<char>(total, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<int> digits(m.space.dim());
    m.space.decode(begin, digits);
    for (std::uint64_t c = begin; c < end; ++c) {
      w[static_cast<Eigen::Index>(c)] = m.weight(digits);
      m.space.next(digits);
    }
    return char{0};
  });
  return w;
}

template <class Scalar>
FiniteDistribution<Scalar> gibbs_measure(const CompiledModel<Scalar>& m, EnumerationLimits limits = {}) {
  return FiniteDistribution<Scalar>::normalized(m.space, configuration_weights(m, limits));
}

template <class Scalar>
FiniteDistribution<Scalar> gibbs_measure(const GibbsSpec<Scalar>& spec, EnumerationLimits limits = {}) {
  return gibbs_measure(compile(spec), limits);
}

template <class Scalar>
Scalar partition_function(const GibbsSpec<Scalar>& spec, EnumerationLimits limits = {}) {
  return configuration_weights(compile(spec), limits).sum();
}

/// Interaction table built from a function of the bond's spin values.
template <class Scalar, class Fn>
std::vector<Scalar> bond_table(const Alphabet& a, const Hyperbond& b, Fn&& factor_of_values) {
  const std::size_t count = local_state_count(a, b);
  std::vector<Scalar> t(count);
  std::vector<int> values(b.size());
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (std::size_t k = 0; k < b.size(); ++k) {
      values[k] = a.value(static_cast<int>(rest % a.size()));
      rest /= a.size();
    }
    t[idx] = Scalar(factor_of_values(std::span<const int>(values)));
  }
  return t;
}

}  // namespace rcb
