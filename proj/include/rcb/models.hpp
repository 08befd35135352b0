#pragma once

#include <vector>

#include "rcb/gibbs.hpp"

namespace rcb {

/// Ising-type spins in {-1, 1}; bond b carries the factor e^{J_b * prod of
/// its spins}, given as `coupling_factor[b]` = e^{J_b}. Region defaults to all
/// vertices.
template <class Scalar>
GibbsSpec<Scalar> ising_spec(const Hypergraph& g, const std::vector<Scalar>& coupling_factor) {
  require(coupling_factor.size() == g.num_bonds(), "one coupling per bond");
  GibbsSpec<Scalar> spec;
  spec.graph = g;
  spec.alphabet = make_alphabet({-1, 1});
  spec.region = all_vertices(g);
  for (std::size_t b = 0; b < g.num_bonds(); ++b) {
    require(coupling_factor[b] > Scalar(0), "coupling factor must be positive");
    spec.interaction.factors.push_back(
        bond_table<Scalar>(spec.alphabet, g.bond(b), [&](std::span<const int> s) {
          int prod = 1;
          for (int v : s) prod *= v;
          return ipow(coupling_factor[b], prod);
        }));
  }
  return spec;
}

inline GibbsSpec<double> ising_spec(const Hypergraph& g, double J) {
  return ising_spec<double>(g, std::vector<double>(g.num_bonds(), std::exp(J)));
}

/// Per-bond couplings (EA spin glass when the J_b are +-J).
inline GibbsSpec<double> ising_spec(const Hypergraph& g, const std::vector<double>& J) {
  std::vector<double> f(J.size());
  for (std::size_t b = 0; b < J.size(); ++b) f[b] = std::exp(J[b]);
  return ising_spec<double>(g, f);
}

/// Appends a singleton bond {v} for every vertex that lacks one; returns the
/// index of each vertex's singleton bond.
Hypergraph with_site_bonds(const Hypergraph& g, std::vector<int>* site_bond);

/// Hard-core lattice gas on {0, 1}: neighbouring occupied sites are forbidden,
/// each occupied site carries the activity `a` through its singleton bond.
template <class Scalar>
GibbsSpec<Scalar> hardcore_spec(const Hypergraph& g, const Scalar& a) {
  require(!(a < Scalar(0)), "activity must be nonnegative");
  std::vector<int> site_bond;
  GibbsSpec<Scalar> spec;
  spec.graph = with_site_bonds(g, &site_bond);
  spec.alphabet = make_alphabet({0, 1});
  spec.region = all_vertices(spec.graph);
  for (const auto& b : spec.graph.bonds()) {
    if (b.size() == 1) {
      spec.interaction.factors.push_back({Scalar(1), a});
    } else {
      spec.interaction.factors.push_back(bond_table<Scalar>(spec.alphabet, b, [](std::span<const int> s) {
        int occupied = 0;
        for (int v : s) occupied += v;
        return occupied >= 2 ? 0 : 1;
      }));
    }
  }
  return spec;
}

/// Three spins on a path 0-1-2. The first bond rewards (-1,-1) with factor
/// e^{J12}, the second rewards (1,1) with e^{J23}; everything else has factor 1.
template <class Scalar>
GibbsSpec<Scalar> example1_spec(const Scalar& e_J12, const Scalar& e_J23) {
  GibbsSpec<Scalar> spec;
  spec.graph = build_path(3);
  spec.alphabet = make_alphabet({-1, 1});
  spec.region = all_vertices(spec.graph);
  // local index = digit(first) + 2 * digit(second), digit 0 is spin -1
  spec.interaction.factors = {{e_J12, Scalar(1), Scalar(1), Scalar(1)},
                              {Scalar(1), Scalar(1), Scalar(1), e_J23}};
  return spec;
}

inline GibbsSpec<double> example1_spec(double J12, double J23) {
  return example1_spec<double>(std::exp(J12), std::exp(J23));
}

}  // namespace rcb
