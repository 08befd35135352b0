#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcb/distribution.hpp"
#include "rcb/gibbs.hpp"

namespace rcb {

/// Sorted set {a + b : a, b in values}.
std::vector<int> sum_values(std::span<const int> values);

/// One slice W_sigma of the two-copy product space. Per-site data is in region
/// order; `admissible[i]` lists alphabet indices a with sigma_i - a also allowed.
struct OverlapSlice {
  std::vector<int> sigma;
  std::vector<std::vector<int>> admissible;
  /// reflection[i][d]: position in admissible[i] of sigma_i minus the value at
  /// position d.
  std::vector<std::vector<int>> reflection;
  Region overlap_region;     // K(sigma): a single admissible value
  Region nonoverlap_region;  // the rest of the region

  std::size_t size() const { return sigma.size(); }
};

/// Builds the slice of `sigma` over per-site domains (alphabet indices).
/// Throws ZeroSlice when some site admits no pair summing to sigma_i.
OverlapSlice make_slice(const Alphabet& alphabet, const Region& region,
                        const std::vector<std::vector<int>>& domains, std::vector<int> sigma);

/// A Gibbs spec compiled once, with its single-copy law, for repeated slicing.
template <class Scalar>
struct TwoCopyModel {
  GibbsSpec<Scalar> spec;
  CompiledModel<Scalar> model;
  FiniteDistribution<Scalar> mu;
};

template <class Scalar>
TwoCopyModel<Scalar> prepare_two_copy(const GibbsSpec<Scalar>& spec, EnumerationLimits limits = {}) {
  TwoCopyModel<Scalar> tc{spec, compile(spec), {}};
  tc.mu = gibbs_measure(tc.model, limits);
  return tc;
}

template <class Scalar>
OverlapSlice make_slice(const TwoCopyModel<Scalar>& tc, std::vector<int> sigma) {
  return make_slice(tc.spec.alphabet, tc.spec.region, tc.model.domains, std::move(sigma));
}

/// Space of sigma over the region: per site, the sums of two allowed values.
template <class Scalar>
ProductSpace overlap_space(const TwoCopyModel<Scalar>& tc) {
  std::vector<std::vector<int>> labels(tc.model.space.dim());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = sum_values(tc.model.space.labels(i));
  return ProductSpace(tc.model.space.keys(), labels);
}

/// Space of Omega(sigma): per site, the admissible spin values.
ProductSpace slice_space(const Alphabet& alphabet, const Region& region, const OverlapSlice& s);

/// Weights mu(omega) * mu(sigma - omega) over the slice space. They sum to
/// rho(sigma).
template <class Scalar>
VectorX<Scalar> slice_weights(const TwoCopyModel<Scalar>& tc, const OverlapSlice& s) {
  const auto& m = tc.model;
  const std::size_t n = m.space.dim();
  require(s.size() == n, "sigma must assign every region site");
  // position of each admissible value inside the compiled domain
  std::vector<std::vector<int>> to_domain(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int a : s.admissible[i]) {
      const auto& d = m.domains[i];
      to_domain[i].push_back(static_cast<int>(std::find(d.begin(), d.end(), a) - d.begin()));
    }
  const ProductSpace space = slice_space(tc.spec.alphabet, tc.spec.region, s);
  VectorX<Scalar> w(static_cast<Eigen::Index>(space.size()));
  std::vector<int> digits(n, 0), own(n), mirrored(n);
  for (std::uint64_t c = 0; c < space.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      own[i] = to_domain[i][digits[i]];
      mirrored[i] = to_domain[i][s.reflection[i][digits[i]]];
    }
    const Scalar& a = tc.mu[m.space.encode(own)];
    w[static_cast<Eigen::Index>(c)] = a == Scalar(0) ? Scalar(0) : Scalar(a * tc.mu[m.space.encode(mirrored)]);
    space.next(digits);
  }
  return w;
}

/// The non-overlap law mu^sigma on Omega(sigma).
template <class Scalar>
FiniteDistribution<Scalar> nonoverlap_distribution(const TwoCopyModel<Scalar>& tc, const OverlapSlice& s) {
  VectorX<Scalar> w = slice_weights(tc, s);
  if (!(w.sum() > Scalar(0))) fail(ErrorKind::ZeroSlice, "overlap configuration has probability zero");
  return FiniteDistribution<Scalar>::normalized(slice_space(tc.spec.alphabet, tc.spec.region, s), std::move(w));
}

template <class Scalar>
FiniteDistribution<Scalar> nonoverlap_distribution(const GibbsSpec<Scalar>& spec, const std::vector<int>& sigma) {
  const auto tc = prepare_two_copy(spec);
  return nonoverlap_distribution(tc, make_slice(tc, sigma));
}

inline constexpr std::uint64_t kMaxOverlapPairs = std::uint64_t{1} << 24;

/// Overlap law rho(sigma) = (mu x mu)(W_sigma), by pairing every two
/// positive-weight configurations.
template <class Scalar>
FiniteDistribution<Scalar> overlap_distribution(const TwoCopyModel<Scalar>& tc,
                                                std::uint64_t max_pairs = kMaxOverlapPairs) {
  const auto& m = tc.model;
  const std::size_t n = m.space.dim();
  std::vector<std::uint64_t> support;
  for (std::uint64_t c = 0; c < tc.mu.size(); ++c)
    if (tc.mu[c] != Scalar(0)) support.push_back(c);
  const auto count = static_cast<std::uint64_t>(support.size());
  if (count > 0 && count > max_pairs / count)
    fail(ErrorKind::TooLarge, "two-copy product exceeds the enumeration cap of " + std::to_string(max_pairs) + " pairs");
  ProductSpace sspace = overlap_space(tc);
  // sum_code[i][d1 * r + d2] = stride-weighted digit of the sum in sspace
  std::vector<std::vector<std::uint64_t>> sum_code(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int r = m.space.radix(i);
    sum_code[i].resize(static_cast<std::size_t>(r) * r);
    for (int d1 = 0; d1 < r; ++d1)
      for (int d2 = 0; d2 < r; ++d2)
        sum_code[i][d1 * r + d2] =
            sspace.stride(i) * sspace.digit_of(i, m.space.label(i, d1) + m.space.label(i, d2));
  }
  std::vector<std::vector<int>> digits(count, std::vector<int>(n));
  for (std::uint64_t k = 0; k < count; ++k) m.space.decode(support[k], digits[k]);
  VectorX<Scalar> rho = VectorX<Scalar>::Zero(static_cast<Eigen::Index>(sspace.size()));
  for (std::uint64_t a = 0; a < count; ++a) {
    const Scalar& wa = tc.mu[support[a]];
    for (std::uint64_t b = 0; b < count; ++b) {
      std::uint64_t code = 0;
      for (std::size_t i = 0; i < n; ++i) code += sum_code[i][digits[a][i] * m.space.radix(i) + digits[b][i]];
      rho[static_cast<Eigen::Index>(code)] += wa * tc.mu[support[b]];
    }
  }
  return FiniteDistribution<Scalar>(std::move(sspace), std::move(rho));
}

template <class Scalar>
FiniteDistribution<Scalar> overlap_distribution(const GibbsSpec<Scalar>& spec) {
  return overlap_distribution(prepare_two_copy(spec));
}

/// Codes of sigma with rho(sigma) > 0, ascending.
template <class Scalar>
std::vector<std::uint64_t> overlap_support(const FiniteDistribution<Scalar>& rho) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 0; c < rho.size(); ++c)
    if (rho[c] != Scalar(0)) out.push_back(c);
  return out;
}

/// Gibbs spec on Omega(sigma) with the symmetrized interaction
/// phi'(x) = phi(x) + phi(sigma - x), i.e. factors w(x) * w(sigma - x). Only
/// region coordinates are reflected; boundary spins stay as given.
template <class Scalar>
GibbsSpec<Scalar> symmetrized_spec(const GibbsSpec<Scalar>& spec, const OverlapSlice& s) {
  const auto& g = spec.graph;
  const auto& a = spec.alphabet;
  require(s.size() == spec.region.size(), "sigma must assign every region site");
  std::vector<int> position(g.num_vertices(), -1);
  for (std::size_t i = 0; i < spec.region.size(); ++i) position[spec.region[i]] = static_cast<int>(i);
  // reflected alphabet index per (site, alphabet index), -1 when not admissible
  std::vector<std::vector<int>> mirror(spec.region.size(), std::vector<int>(a.size(), -1));
  for (std::size_t i = 0; i < spec.region.size(); ++i)
    for (std::size_t d = 0; d < s.admissible[i].size(); ++d)
      mirror[i][s.admissible[i][d]] = s.admissible[i][s.reflection[i][d]];

  GibbsSpec<Scalar> out = spec;
  out.domains = s.admissible;
  const auto A = static_cast<std::size_t>(a.size());
  for (std::size_t b = 0; b < g.num_bonds(); ++b) {
    const auto& vs = g.bond(b).vertices;
    if (std::none_of(vs.begin(), vs.end(), [&](Vertex v) { return position[v] >= 0; })) continue;
    const auto& w = spec.interaction.factors[b];
    auto& t = out.interaction.factors[b];
    for (std::size_t x = 0; x < w.size(); ++x) {
      std::size_t rest = x, stride = 1, reflected = 0;
      bool ok = true;
      for (Vertex v : vs) {
        const auto alpha = static_cast<int>(rest % A);
        rest /= A;
        int image = alpha;
        if (position[v] >= 0) {
          image = mirror[position[v]][alpha];
          if (image < 0) ok = false;
        }
        reflected += stride * static_cast<std::size_t>(ok ? image : 0);
        stride *= A;
      }
      t[x] = ok ? Scalar(w[x] * w[reflected]) : Scalar(0);
    }
  }
  return out;
}

/// mu(A) recomputed as the sum over sigma of mu^sigma(A) rho(sigma).
template <class Scalar, class Event>
Scalar decompose(const TwoCopyModel<Scalar>& tc, Event&& event) {
  const auto rho = overlap_distribution(tc);
  Scalar total(0);
  for (std::uint64_t code : overlap_support(rho)) {
    const OverlapSlice s = make_slice(tc, rho.space().labels_of(code));
    const VectorX<Scalar> w = slice_weights(tc, s);
    const FiniteDistribution<Scalar> joint(slice_space(tc.spec.alphabet, tc.spec.region, s), w);
    total += probability(joint, event);
  }
  return total;
}

/// Two copies on the doubled vertex set (copy two at v + n). Every pair bond
/// {i, j} becomes {i, j, i+n, j+n} with factor w(x1) * w(x2). Boundary
/// conditions and the region are duplicated.
template <class Scalar>
GibbsSpec<Scalar> doubled_spec(const GibbsSpec<Scalar>& spec) {
  const int n = spec.graph.num_vertices();
  const auto A = static_cast<std::size_t>(spec.alphabet.size());
  std::vector<Hyperbond> bonds;
  GibbsSpec<Scalar> out;
  out.alphabet = spec.alphabet;
  for (std::size_t b = 0; b < spec.graph.num_bonds(); ++b) {
    const auto& vs = spec.graph.bond(b).vertices;
    std::vector<Vertex> both = vs;
    for (Vertex v : vs) both.push_back(v + n);
    bonds.push_back(Hyperbond{both});
    const auto& w = spec.interaction.factors[b];
    std::size_t half = 1;
    for (std::size_t k = 0; k < vs.size(); ++k) half *= A;
    std::vector<Scalar> t(half * half);
    for (std::size_t x = 0; x < t.size(); ++x) t[x] = w[x % half] * w[x / half];
    out.interaction.factors.push_back(std::move(t));
  }
  out.graph = Hypergraph(2 * n, std::move(bonds));
  std::vector<Vertex> region = spec.region;
  for (Vertex v : spec.region) region.push_back(v + n);
  out.region = make_region(region);
  for (const auto& [v, idx] : spec.boundary) {
    out.boundary[v] = idx;
    out.boundary[v + n] = idx;
  }
  if (!spec.domains.empty()) {
    out.domains = spec.domains;
    out.domains.insert(out.domains.end(), spec.domains.begin(), spec.domains.end());
  }
  return out;
}

}  // namespace rcb
