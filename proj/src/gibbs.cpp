#include "rcb/gibbs.hpp"

#include <algorithm>
#include <set>

namespace rcb {

int Alphabet::index_of(int v) const {
  for (int i = 0; i < size(); ++i)
    if (values[i] == v) return i;
  return -1;
}

Alphabet make_alphabet(std::vector<int> values) {
  require(values.size() >= 2, "alphabet needs at least two values");
  std::set<int> distinct(values.begin(), values.end());
  require(distinct.size() == values.size(), "alphabet values must be distinct");
  return Alphabet{std::move(values)};
}

std::size_t local_state_count(const Alphabet& alphabet, const Hyperbond& bond) {
  std::size_t count = 1;
  for (std::size_t k = 0; k < bond.size(); ++k) {
    count *= static_cast<std::size_t>(alphabet.size());
    if (count > (std::size_t{1} << 30)) fail(ErrorKind::TooLarge, "hyperbond local space too large");
  }
  return count;
}

Interaction<double> from_potentials(const std::vector<std::vector<Potential>>& tables) {
  Interaction<double> out;
  out.factors.reserve(tables.size());
  for (const auto& t : tables) {
    std::vector<double> f(t.size());
    std::transform(t.begin(), t.end(), f.begin(), [](const Potential& p) { return p.factor(); });
    out.factors.push_back(std::move(f));
  }
  return out;
}

}  // namespace rcb

#include "rcb/models.hpp"

namespace rcb {

Hypergraph with_site_bonds(const Hypergraph& g, std::vector<int>* site_bond) {
  std::vector<Hyperbond> bonds = g.bonds();
  std::vector<int> index(g.num_vertices(), -1);
  for (std::size_t b = 0; b < bonds.size(); ++b)
    if (bonds[b].size() == 1) index[bonds[b].vertices[0]] = static_cast<int>(b);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (index[v] >= 0) continue;
    index[v] = static_cast<int>(bonds.size());
    bonds.push_back(Hyperbond{{v}});
  }
  if (site_bond) *site_bond = std::move(index);
  return Hypergraph(g.num_vertices(), std::move(bonds));
}

}  // namespace rcb
