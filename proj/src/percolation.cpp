#include "rcb/percolation.hpp"

namespace rcb {

BondGeometry geometry(const Hypergraph& h) {
  BondGeometry g;
  g.num_vertices = h.num_vertices();
  for (std::size_t b = 0; b < h.num_bonds(); ++b) {
    g.bonds.push_back(h.bond(b).vertices);
    g.bond_ids.push_back(static_cast<int>(b));
  }
  return g;
}

ActivityPattern unpack_pattern(std::uint64_t code, std::size_t bonds) {
  ActivityPattern p(bonds);
  for (std::size_t b = 0; b < bonds; ++b) p[b] = (code >> b) & 1u;
  return p;
}

std::uint64_t pack_pattern(const ActivityPattern& pattern) {
  require(pattern.size() <= 64, "pattern too long to pack");
  std::uint64_t code = 0;
  for (std::size_t b = 0; b < pattern.size(); ++b)
    if (pattern[b]) code |= std::uint64_t{1} << b;
  return code;
}

ClusterPartition clusters(const BondGeometry& g, const ActivityPattern& pattern) {
  require(pattern.size() == g.size(), "pattern length does not match the bond count");
  DisjointSets sets(g.num_vertices);
  std::vector<char> touched(g.num_vertices, 0);
  for (std::size_t b = 0; b < g.size(); ++b) {
    if (!pattern[b]) continue;
    const auto& vs = g.bonds[b];
    for (Vertex v : vs) touched[v] = 1;
    for (std::size_t k = 1; k < vs.size(); ++k) sets.unite(vs[0], vs[k]);
  }
  ClusterPartition c;
  c.root.assign(g.num_vertices, -1);
  for (int v = 0; v < g.num_vertices; ++v) {
    if (!touched[v]) continue;
    c.root[v] = sets.find(v);
    if (c.root[v] == v) ++c.count;
  }
  return c;
}

bool connected(const ClusterPartition& c, const Region& A, const Region& B) {
  for (Vertex a : A) {
    if (a < 0 || a >= static_cast<int>(c.root.size()) || c.root[a] < 0) continue;
    for (Vertex b : B)
      if (b >= 0 && b < static_cast<int>(c.root.size()) && c.root[b] == c.root[a]) return true;
  }
  return false;
}

bool connected(const BondGeometry& g, const ActivityPattern& pattern, const Region& A, const Region& B) {
  return connected(clusters(g, pattern), A, B);
}

}  // namespace rcb
