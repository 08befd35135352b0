#pragma once

#include <cmath>
#include <vector>

#include "rcb/gibbs.hpp"
#include "rcb/rng.hpp"

namespace rcb {

struct RandomModelOptions {
  int max_sites = 6;
  double pair_probability = 0.5;
  double site_bond_probability = 0.15;
  double triple_probability = 0.1;
  int max_bonds = 12;
  double forbidden_probability = 0.05;
  double boundary_probability = 0.25;
  /// Largest region for which the three-letter alphabet is drawn.
  int max_sites_three_letters = 4;
};

/// Random interaction spec: region of 1..max_sites vertices, random pair bonds
/// plus occasional singleton and triple bonds, alphabets {-1,1}, {0,1} or
/// {-1,0,1}, and sometimes one or two fixed exterior spins. `factor(rng)`
/// draws one positive Boltzmann factor. Retries until the measure has positive
/// mass.
template <class Scalar, class FactorFn>
GibbsSpec<Scalar> random_spec(Philox4x32& rng, const RandomModelOptions& opt, FactorFn&& factor) {
  for (;;) {
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_sites)));
    const double pick = rng.uniform();
    std::vector<int> values{-1, 1};
    if (pick > 0.75 && pick <= 0.87) values = {0, 1};
    if (pick > 0.87 && n <= opt.max_sites_three_letters) values = {-1, 0, 1};
    const Alphabet alphabet = make_alphabet(values);

    int exterior = 0;
    if (rng.bernoulli(opt.boundary_probability)) exterior = 1 + static_cast<int>(rng.below(2));
    std::vector<Hyperbond> bonds;
    auto room = [&] { return static_cast<int>(bonds.size()) < opt.max_bonds; };
    for (int v = 0; v < n && room(); ++v)
      if (rng.bernoulli(opt.site_bond_probability)) bonds.push_back(Hyperbond{{v}});
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n && room(); ++j)
        if (rng.bernoulli(opt.pair_probability)) bonds.push_back(Hyperbond{{i, j}});
    for (int i = 0; i + 2 < n && room(); ++i)
      if (rng.bernoulli(opt.triple_probability)) {
        const int j = i + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i - 2)));
        const int k = j + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - j - 1)));
        bonds.push_back(Hyperbond{{i, j, k}});
      }
    for (int e = 0; e < exterior && room(); ++e)
      bonds.push_back(Hyperbond{{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), n + e}});

    GibbsSpec<Scalar> spec;
    spec.graph = Hypergraph(n + exterior, bonds);
    spec.alphabet = alphabet;
    for (int v = 0; v < n; ++v) spec.region.push_back(v);
    for (int e = 0; e < exterior; ++e)
      spec.boundary[n + e] = static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet.size())));
    for (const auto& b : spec.graph.bonds()) {
      std::vector<Scalar> t(local_state_count(alphabet, b));
      bool any = false;
      for (auto& w : t) {
        w = rng.bernoulli(opt.forbidden_probability) ? Scalar(0) : Scalar(factor(rng));
        any = any || w > Scalar(0);
      }
      if (!any) t[rng.below(t.size())] = Scalar(factor(rng));
      spec.interaction.factors.push_back(std::move(t));
    }
    try {
      const auto w = configuration_weights(compile(spec));
      if (w.sum() > Scalar(0)) return spec;
    } catch (const Error&) {
    }
  }
}

/// Factor e^{phi} with phi uniform on [-bound, bound].
inline auto exp_uniform_factor(double bound) {
  return [bound](Philox4x32& rng) { return std::exp(bound * (2.0 * rng.uniform() - 1.0)); };
}

}  // namespace rcb
