#include "rcb/lattice.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "rcb/error.hpp"

namespace rcb {

bool Hyperbond::contains(Vertex v) const {
  return std::binary_search(vertices.begin(), vertices.end(), v);
}

Hyperbond make_bond(std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  require(!vertices.empty(), "hyperbond must be non-empty");
  require(std::adjacent_find(vertices.begin(), vertices.end()) == vertices.end(),
          "hyperbond has a repeated vertex");
  return Hyperbond{std::move(vertices)};
}

Region make_region(std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return vertices;
}

bool region_contains(const Region& r, Vertex v) {
  return std::binary_search(r.begin(), r.end(), v);
}

Region region_union(const Region& a, const Region& b) {
  Region out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Region region_intersection(const Region& a, const Region& b) {
  Region out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Region region_difference(const Region& a, const Region& b) {
  Region out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Hypergraph::Hypergraph(int num_vertices, std::vector<Hyperbond> bonds)
    : num_vertices_(num_vertices), bonds_(std::move(bonds)), adjacency_(num_vertices) {
  require(num_vertices >= 0, "negative vertex count");
  std::set<std::vector<Vertex>> seen;
  for (std::size_t b = 0; b < bonds_.size(); ++b) {
    bonds_[b] = make_bond(bonds_[b].vertices);
    for (Vertex v : bonds_[b].vertices) {
      require(v >= 0 && v < num_vertices, "bond vertex out of range");
      adjacency_[v].push_back(static_cast<int>(b));
    }
    require(seen.insert(bonds_[b].vertices).second, "duplicate bond in hypergraph");
  }
}

Region all_vertices(const Hypergraph& h) {
  Region r(h.num_vertices());
  for (int v = 0; v < h.num_vertices(); ++v) r[v] = v;
  return r;
}

Region boundary(const Hypergraph& h, const Region& lam) {
  std::vector<char> inside(h.num_vertices(), 0);
  for (Vertex v : lam) {
    require(v >= 0 && v < h.num_vertices(), "region vertex out of range");
    inside[v] = 1;
  }
  std::vector<char> seen_bond(h.num_bonds(), 0);
  std::vector<Vertex> out;
  for (Vertex v : lam) {
    for (int b : h.incident(v)) {
      if (seen_bond[b]) continue;
      seen_bond[b] = 1;
      const auto& vs = h.bond(b).vertices;
      const bool straddles =
          std::any_of(vs.begin(), vs.end(), [&](Vertex u) { return !inside[u]; });
      if (straddles) out.insert(out.end(), vs.begin(), vs.end());
    }
  }
  return make_region(std::move(out));
}

Hypergraph build_grid(int width, int height, bool periodic) {
  require(width >= 1 && height >= 1, "grid dimensions must be >= 1");
  std::set<std::vector<Vertex>> bonds;
  auto id = [width](int x, int y) { return y * width + x; };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width)
        bonds.insert({id(x, y), id(x + 1, y)});
      else if (periodic && width > 1)
        bonds.insert(make_bond({id(x, y), id(0, y)}).vertices);
      if (y + 1 < height)
        bonds.insert({id(x, y), id(x, y + 1)});
      else if (periodic && height > 1)
        bonds.insert(make_bond({id(x, y), id(x, 0)}).vertices);
    }
  }
  std::vector<Hyperbond> list;
  for (auto& b : bonds) list.push_back(Hyperbond{b});
  return Hypergraph(width * height, std::move(list));
}

Hypergraph build_path(int n) {
  require(n >= 1, "path needs at least one vertex");
  std::vector<Hyperbond> bonds;
  for (int v = 0; v + 1 < n; ++v) bonds.push_back(Hyperbond{{v, v + 1}});
  return Hypergraph(n, std::move(bonds));
}

Hypergraph build_cayley_tree(int depth, int branching) {
  require(depth >= 0 && branching >= 1, "tree needs depth >= 0 and branching >= 1");
  std::vector<Hyperbond> bonds;
  int count = 1;
  std::vector<int> level{0};
  for (int d = 0; d < depth; ++d) {
    std::vector<int> next;
    for (int parent : level) {
      for (int c = 0; c < branching; ++c) {
        bonds.push_back(Hyperbond{{parent, count}});
        next.push_back(count++);
      }
    }
    level = std::move(next);
  }
  return Hypergraph(count, std::move(bonds));
}

Region ball(const Hypergraph& h, const Region& center, int radius) {
  std::vector<int> dist(h.num_vertices(), -1);
  std::deque<Vertex> queue;
  for (Vertex v : center) {
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    if (dist[v] == radius) continue;
    for (int b : h.incident(v))
      for (Vertex u : h.bond(b).vertices)
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
  }
  Region out;
  for (int v = 0; v < h.num_vertices(); ++v)
    if (dist[v] >= 0) out.push_back(v);
  return out;
}

bool bipartition(const Hypergraph& h, std::vector<int>* side) {
  std::vector<int> colour(h.num_vertices(), -1);
  for (int s = 0; s < h.num_vertices(); ++s) {
    if (colour[s] >= 0) continue;
    colour[s] = 0;
    std::deque<Vertex> queue{s};
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop_front();
      for (int b : h.incident(v)) {
        const auto& vs = h.bond(b).vertices;
        if (vs.size() > 2) return false;
        for (Vertex u : vs) {
          if (u == v) continue;
          if (colour[u] < 0) {
            colour[u] = 1 - colour[v];
            queue.push_back(u);
          } else if (colour[u] == colour[v]) {
            return false;
          }
        }
      }
    }
  }
  if (side) *side = std::move(colour);
  return true;
}

std::pair<int, int> parse_dims(const std::string& text) {
  const auto x = text.find_first_of("xX");
  require(x != std::string::npos, "expected dimensions of the form AxB, got '" + text + "'");
  try {
    std::size_t used_a = 0, used_b = 0;
    const int a = std::stoi(text.substr(0, x), &used_a);
    const int b = std::stoi(text.substr(x + 1), &used_b);
    require(used_a == x && used_b == text.size() - x - 1, "trailing characters");
    return {a, b};
  } catch (const std::logic_error&) {
    fail(ErrorKind::InvalidArgument, "malformed dimensions '" + text + "'");
  }
}

}  // namespace rcb
