#pragma once

#include <span>
#include <string>
#include <vector>

namespace rcb {

using Vertex = int;

/// Finite vertex set carrying one interaction term. Vertices are kept sorted.
struct Hyperbond {
  std::vector<Vertex> vertices;

  std::size_t size() const { return vertices.size(); }
  bool contains(Vertex v) const;
  friend bool operator==(const Hyperbond&, const Hyperbond&) = default;
  friend auto operator<=>(const Hyperbond&, const Hyperbond&) = default;
};

Hyperbond make_bond(std::vector<Vertex> vertices);

/// Sorted, duplicate-free vertex set.
using Region = std::vector<Vertex>;

Region make_region(std::vector<Vertex> vertices);
bool region_contains(const Region& r, Vertex v);
Region region_union(const Region& a, const Region& b);
Region region_intersection(const Region& a, const Region& b);
Region region_difference(const Region& a, const Region& b);

/// Vertices 0..n-1 with a duplicate-free bond list and a per-vertex incidence index.
class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(int num_vertices, std::vector<Hyperbond> bonds);

  int num_vertices() const { return num_vertices_; }
  std::size_t num_bonds() const { return bonds_.size(); }
  const std::vector<Hyperbond>& bonds() const { return bonds_; }
  const Hyperbond& bond(std::size_t i) const { return bonds_[i]; }
  std::span<const int> incident(Vertex v) const { return adjacency_[v]; }

 private:
  int num_vertices_ = 0;
  std::vector<Hyperbond> bonds_;
  std::vector<std::vector<int>> adjacency_;
};

Region all_vertices(const Hypergraph& h);

/// Vertices of every bond that meets both `lam` and its complement. Vertices on
/// either side of the cut are included.
Region boundary(const Hypergraph& h, const Region& lam);

/// Nearest-neighbour grid, vertex (x, y) -> y * width + x. Coincident wrapped
/// bonds (a side of length 2) are collapsed; a side of length 1 never wraps.
Hypergraph build_grid(int width, int height, bool periodic);
Hypergraph build_path(int n);
/// Root 0, children in breadth-first order.
Hypergraph build_cayley_tree(int depth, int branching);

/// Graph-distance ball around `center` (distance through shared bonds).
Region ball(const Hypergraph& h, const Region& center, int radius);
/// True when the 2-section of `h` admits a proper 2-colouring; fills `side`.
bool bipartition(const Hypergraph& h, std::vector<int>* side);

/// Parses "WxH" (or "DxB" for trees).
std::pair<int, int> parse_dims(const std::string& text);

}  // namespace rcb
