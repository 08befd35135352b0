#include <cmath>
#include <map>

#include "rcb/experiments.hpp"
#include "rcb/models.hpp"
#include "rcb/percolation.hpp"
#include "slice_activation.hpp"

namespace rcb {

namespace {

constexpr double kSitePercolationThreshold = 0.592746;

// Components of the pair-bond graph restricted to `sites`; -1 outside.
std::vector<int> components_within(const Hypergraph& g, const std::vector<std::uint8_t>& inside, int* count) {
  DisjointSets ds(g.num_vertices());
  for (const auto& b : g.bonds())
    if (b.size() == 2 && inside[b.vertices[0]] && inside[b.vertices[1]]) ds.unite(b.vertices[0], b.vertices[1]);
  std::vector<int> comp(g.num_vertices(), -1);
  std::map<int, int> ids;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (inside[v]) comp[v] = ids.try_emplace(ds.find(v), static_cast<int>(ids.size())).first->second;
  if (count) *count = static_cast<int>(ids.size());
  return comp;
}

// A and B joined through a disagreement path (at least one bond).
bool joined(const Hypergraph& g, const std::vector<std::uint8_t>& inside, const Region& A, const Region& B) {
  DisjointSets ds(g.num_vertices());
  std::vector<std::uint8_t> touched(g.num_vertices(), 0);
  for (const auto& b : g.bonds())
    if (b.size() == 2 && inside[b.vertices[0]] && inside[b.vertices[1]]) {
      ds.unite(b.vertices[0], b.vertices[1]);
      touched[b.vertices[0]] = touched[b.vertices[1]] = 1;
    }
  for (Vertex a : A)
    for (Vertex b : B)
      if (touched[a] && touched[b] && ds.find(a) == ds.find(b)) return true;
  return false;
}

Hypergraph ring(int n) {
  std::vector<Hyperbond> bonds;
  for (int i = 0; i < n; ++i) bonds.push_back(make_bond({i, (i + 1) % n}));
  return Hypergraph(n, bonds);
}

}  // namespace

GibbsSpec<double> framed_hardcore(int width, int height, double a, int parity) {
  const int W = width + 2, H = height + 2;
  auto spec = hardcore_spec(build_grid(W, H, false), a);
  spec.region.clear();
  spec.boundary.clear();
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const int v = y * W + x;
      if (x > 0 && y > 0 && x < W - 1 && y < H - 1)
        spec.region.push_back(v);
      else
        spec.boundary[v] = parity >= 0 && (x + y) % 2 == parity ? 1 : 0;
    }
  return spec;
}

HardcoreEquivalence hardcore_equivalence(const GibbsSpec<double>& spec) {
  const auto& g = spec.graph;
  std::vector<int> side;
  if (!bipartition(g, &side)) fail(ErrorKind::InvalidArgument, "disagreement equivalence needs a bipartite graph");
  const auto tc = prepare_two_copy(spec);
  const auto rho = overlap_distribution(tc);
  const Region& region = spec.region;
  HardcoreEquivalence out;
  for (std::uint64_t code : overlap_support(rho)) {
    const auto d = slice_data(tc, make_slice(tc, rho.space().labels_of(code)), monotone_family<double>());
    ++out.slices;
    std::vector<std::uint8_t> disagree(g.num_vertices(), 0);
    for (Vertex v : d.slice.nonoverlap_region) disagree[v] = 1;
    int components = 0;
    const auto comp = components_within(g, disagree, &components);
    std::size_t support = 0;
    for (Eigen::Index c = 0; c < d.weights.size(); ++c) support += d.weights[c] > 0.0;
    if (support != (std::size_t{1} << components)) ++out.support_mismatches;

    std::map<std::uint64_t, double> patterns;
    accumulate_patterns(d.base, d.weights, [&](std::uint64_t c, double p) { patterns[c] += p; });
    const BondGeometry geo = geometry(d.base);
    const std::size_t n = region.size();
    std::vector<double> active(n * n, 0.0);
    for (const auto& [c, p] : patterns) {
      const auto cl = clusters(geo, unpack_pattern(c, geo.size()));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const int ri = cl.root[region[i]], rj = cl.root[region[j]];
          if (ri >= 0 && ri == rj) active[i * n + j] += p;
        }
    }
    // a disagreement path needs both ends in one component with at least one bond
    std::vector<int> size(components, 0);
    for (Vertex v : region)
      if (comp[v] >= 0) ++size[comp[v]];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const int ci = comp[region[i]], cj = comp[region[j]];
        const bool path = ci >= 0 && ci == cj && size[ci] > 1;
        ++out.pairs_checked;
        if (std::abs(active[i * n + j] / d.rho - (path ? 1.0 : 0.0)) > 1e-12) ++out.mismatches;
      }
  }
  return out;
}

DisagreementComparison disagreement_comparison(const GibbsSpec<double>& first, const GibbsSpec<double>& second,
                                               const Region& A, const Region& B) {
  require(first.graph.num_vertices() == second.graph.num_vertices() && first.region == second.region,
          "both specs must share graph and region");
  const auto m1 = compile(first), m2 = compile(second);
  require(m1.factors.size() == m2.factors.size(), "both specs must compile to the same bonds");
  const auto mu1 = gibbs_measure(m1), mu2 = gibbs_measure(m2);
  const auto& g = first.graph;
  const Region& region = first.region;
  const std::size_t n = region.size();

  std::vector<std::uint64_t> s1, s2;
  for (std::uint64_t c = 0; c < mu1.size(); ++c)
    if (mu1[c] > 0.0) s1.push_back(c);
  for (std::uint64_t c = 0; c < mu2.size(); ++c)
    if (mu2[c] > 0.0) s2.push_back(c);
  require(s1.size() * s2.size() <= kMaxOverlapPairs, "product coupling exceeds the pair cap");

  BondGeometry geo;
  geo.num_vertices = g.num_vertices();
  for (const auto& f : m1.factors) {
    geo.bonds.push_back(f.vertices);
    geo.bond_ids.push_back(f.bond);
  }
  DisagreementComparison out;
  std::vector<int> d1(n), d2(n);
  std::vector<std::uint8_t> differ(g.num_vertices(), 0);
  std::vector<double> q(m1.factors.size());
  for (std::uint64_t c1 : s1) {
    m1.space.decode(c1, d1);
    for (std::uint64_t c2 : s2) {
      m2.space.decode(c2, d2);
      const double w = mu1[c1] * mu2[c2];
      ++out.pairs;
      for (std::size_t i = 0; i < n; ++i) differ[region[i]] = m1.space.label(i, d1[i]) != m2.space.label(i, d2[i]);
      if (joined(g, differ, A, B)) out.disagreement += w;

      std::vector<int> uncertain;
      ActivityPattern pattern(m1.factors.size(), 0);
      for (std::size_t b = 0; b < q.size(); ++b) {
        q[b] = detail::slice_activation(m1.factors[b], m2.factors[b], m1.space, m2.space, d1, d2);
        if (q[b] >= 1.0)
          pattern[b] = 1;
        else if (q[b] > 0.0)
          uncertain.push_back(static_cast<int>(b));
      }
      require(uncertain.size() <= 20, "too many undecided bonds");
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << uncertain.size()); ++s) {
        double p = w;
        for (std::size_t k = 0; k < uncertain.size(); ++k) {
          const bool on = (s >> k) & 1u;
          pattern[uncertain[k]] = on;
          p *= on ? q[uncertain[k]] : 1.0 - q[uncertain[k]];
        }
        if (connected(geo, pattern, A, B)) out.active += p;
      }
    }
  }
  return out;
}

RunResult hardcore_disagreement(const HardcoreOptions& opt) {
  RunResult r;
  r.experiment = "hardcore";
  r.config = {{"a", opt.a}, {"width", opt.width}, {"height", opt.height}, {"scan", opt.scan},
              {"scan_width", opt.scan_width}, {"scan_height", opt.scan_height}};

  // equivalence on small bipartite graphs, every slice and site pair
  std::vector<std::pair<std::string, GibbsSpec<double>>> cases;
  cases.emplace_back("grid_free", hardcore_spec(build_grid(opt.width, opt.height, false), opt.a));
  cases.emplace_back("grid_framed", framed_hardcore(opt.width, opt.height, opt.a, 0));
  cases.emplace_back("path8", hardcore_spec(build_path(8), opt.a));
  cases.emplace_back("ring6", hardcore_spec(ring(6), opt.a));
  cases.emplace_back("tree7", hardcore_spec(build_cayley_tree(2, 2), opt.a));
  cases.emplace_back("grid3x4", hardcore_spec(build_grid(3, 4, false), opt.a));
  Table eq{"equivalence", {"case", "sites", "slices", "pairs", "mismatches", "support_mismatches"}, {}};
  std::size_t mismatches = 0, support = 0, slices = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto e = hardcore_equivalence(cases[k].second);
    mismatches += e.mismatches;
    support += e.support_mismatches;
    slices += e.slices;
    eq.rows.push_back({double(k), double(cases[k].second.region.size()), double(e.slices), double(e.pairs_checked),
                       double(e.mismatches), double(e.support_mismatches)});
  }
  r.tables.push_back(std::move(eq));
  r.exact("equivalence_slices", double(slices));
  r.check_le("active_vs_disagreement_mismatches", double(mismatches), 0.0);
  r.check_le("slice_support_mismatches", double(support), 0.0);

  // opposite checkerboard frames under the product coupling
  const auto even = framed_hardcore(opt.width, opt.height, opt.a, 0);
  const auto odd = framed_hardcore(opt.width, opt.height, opt.a, 1);
  const Region A{even.region.front()}, B{even.region.back()};
  const auto cmp = disagreement_comparison(even, odd, A, B);
  r.exact("opposite_frames_disagreement", cmp.disagreement);
  r.exact("opposite_frames_active", cmp.active);
  r.check_le("opposite_frames_difference", std::abs(cmp.disagreement - cmp.active), 0.0, 1e-12);

  const auto zero_even = framed_hardcore(opt.width, opt.height, 0.0, 0);
  const auto zero_odd = framed_hardcore(opt.width, opt.height, 0.0, 1);
  const auto none = disagreement_comparison(zero_even, zero_odd, A, B);
  r.claim("zero_activity_no_disagreement", none.disagreement == 0.0 && none.active == 0.0, none.disagreement, 0.0);

  const double marker = kSitePercolationThreshold / (1.0 - kSitePercolationThreshold);
  r.exact("activity_marker", marker, ValueMode::ClosedForm);
  if (!opt.scan.empty()) {
    Table scan{"scan", {"a", "disagreement", "active", "below_marker"}, {}};
    const int W = opt.scan_width + 2;
    const Vertex center = (1 + opt.scan_height / 2) * W + 1 + opt.scan_width / 2;
    for (double a : opt.scan) {
      const auto e = framed_hardcore(opt.scan_width, opt.scan_height, a, 0);
      const auto o = framed_hardcore(opt.scan_width, opt.scan_height, a, 1);
      // sites next to the frame
      Region ring_sites;
      for (Vertex v : e.region) {
        const int x = v % W, y = v / W;
        if ((x == 1 || y == 1 || x == opt.scan_width || y == opt.scan_height) && v != center) ring_sites.push_back(v);
      }
      const auto c = disagreement_comparison(e, o, {center}, ring_sites);
      scan.rows.push_back({a, c.disagreement, c.active, a < marker ? 1.0 : 0.0});
    }
    r.tables.push_back(std::move(scan));
  }
  return r;
}

}  // namespace rcb
