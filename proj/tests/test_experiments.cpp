#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rcb/experiments.hpp"
#include "rcb/model_io.hpp"
#include "rcb/models.hpp"
#include "rcb/percolation.hpp"
#include "rcb/random_models.hpp"

using namespace rcb;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Ising model on n spins given as explicit pair couplings and fields.
struct SmallIsing {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> J;
  std::vector<double> h;

  double weight(const std::vector<int>& s) const {
    double e = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) e += J[k] * s[edges[k].first] * s[edges[k].second];
    for (int i = 0; i < n; ++i) e += h[i] * s[i];
    return std::exp(e);
  }
  double edge_factor(std::size_t k, int a, int b) const { return std::exp(J[k] * a * b); }
};

std::vector<int> spins_of(int code, int n) {
  std::vector<int> s(n);
  for (int i = 0; i < n; ++i) s[i] = (code >> i) & 1 ? 1 : -1;
  return s;
}

// Literal two-copy construction: pairs of configurations, then per edge an
// independent activation 1 - min w'/w'(x) over the edge's admissible local pairs.
// Site fields have a single admissible value at overlap sites and a constant
// symmetrized weight at non-overlap sites, so they never activate.
double brute_force_pbar(const SmallIsing& m, int A, int B) {
  const int states = 1 << m.n;
  std::vector<double> mu(states);
  double Z = 0.0;
  for (int c = 0; c < states; ++c) Z += mu[c] = m.weight(spins_of(c, m.n));
  for (double& w : mu) w /= Z;
  double total = 0.0;
  for (int c1 = 0; c1 < states; ++c1)
    for (int c2 = 0; c2 < states; ++c2) {
      const auto s1 = spins_of(c1, m.n), s2 = spins_of(c2, m.n);
      std::vector<double> q(m.edges.size());
      for (std::size_t k = 0; k < m.edges.size(); ++k) {
        const auto [i, j] = m.edges[k];
        const int si = s1[i] + s2[i], sj = s1[j] + s2[j];
        const double wx = m.edge_factor(k, s1[i], s1[j]) * m.edge_factor(k, s2[i], s2[j]);
        double wmin = wx;
        for (int a : {-1, 1})
          for (int b : {-1, 1}) {
            const int ma = si - a, mb = sj - b;
            if (std::abs(ma) != 1 || std::abs(mb) != 1) continue;
            wmin = std::min(wmin, m.edge_factor(k, a, b) * m.edge_factor(k, ma, mb));
          }
        q[k] = 1.0 - wmin / wx;
      }
      const std::size_t E = m.edges.size();
      for (std::uint64_t pat = 0; pat < (std::uint64_t{1} << E); ++pat) {
        double p = mu[c1] * mu[c2];
        std::vector<std::vector<int>> adj(m.n);
        std::vector<char> touched(m.n, 0);
        for (std::size_t k = 0; k < E; ++k) {
          const bool on = (pat >> k) & 1u;
          p *= on ? q[k] : 1.0 - q[k];
          if (on) {
            adj[m.edges[k].first].push_back(m.edges[k].second);
            adj[m.edges[k].second].push_back(m.edges[k].first);
            touched[m.edges[k].first] = touched[m.edges[k].second] = 1;
          }
        }
        if (p == 0.0 || !touched[A]) continue;
        std::vector<char> seen(m.n, 0);
        std::deque<int> queue{A};
        seen[A] = 1;
        while (!queue.empty()) {
          const int u = queue.front();
          queue.pop_front();
          for (int v : adj[u])
            if (!seen[v]) {
              seen[v] = 1;
              queue.push_back(v);
            }
        }
        if (seen[B]) total += p;
      }
    }
  return total;
}

GibbsSpec<double> to_spec(const SmallIsing& m) {
  std::vector<Hyperbond> bonds;
  GibbsSpec<double> spec;
  spec.alphabet = make_alphabet({-1, 1});
  for (std::size_t k = 0; k < m.edges.size(); ++k) {
    bonds.push_back(make_bond({m.edges[k].first, m.edges[k].second}));
    const auto [i, j] = m.edges[k];
    // local index: lower vertex least significant
    std::vector<double> t(4);
    for (int x = 0; x < 4; ++x) {
      const int a = x & 1 ? 1 : -1, b = x & 2 ? 1 : -1;
      t[x] = i < j ? m.edge_factor(k, a, b) : m.edge_factor(k, b, a);
    }
    spec.interaction.factors.push_back(t);
  }
  for (int i = 0; i < m.n; ++i) {
    bonds.push_back(make_bond({i}));
    spec.interaction.factors.push_back({std::exp(-m.h[i]), std::exp(m.h[i])});
  }
  spec.graph = Hypergraph(m.n, bonds);
  spec.region = all_vertices(spec.graph);
  return spec;
}

}  // namespace

TEST_CASE("integrated connection matches the literal two-copy construction") {
  Philox4x32 rng(101, 0);
  for (int trial = 0; trial < 25; ++trial) {
    SmallIsing m;
    m.n = 4;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (rng.bernoulli(0.6)) {
          m.edges.push_back({i, j});
          m.J.push_back(3.0 * (2.0 * rng.uniform() - 1.0));
        }
    for (int i = 0; i < 4; ++i) m.h.push_back(rng.bernoulli(0.5) ? 2.0 * rng.uniform() - 1.0 : 0.0);
    const auto tc = prepare_two_copy(to_spec(m));
    const auto irc = integrated_rc(tc);
    for (int A = 0; A < 4; ++A)
      for (int B = A + 1; B < 4; ++B)
        CHECK(integrated_connection(irc, {A}, {B}) == doctest::Approx(brute_force_pbar(m, A, B)).epsilon(1e-12));
  }
}

TEST_CASE("worst event value equals the brute-force supremum over event pairs") {
  Philox4x32 rng(5, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int ra = 1 + static_cast<int>(rng.below(5)), rb = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd joint(ra, rb);
    for (int a = 0; a < ra; ++a)
      for (int b = 0; b < rb; ++b) joint(a, b) = rng.uniform();
    joint /= joint.sum();
    const Eigen::VectorXd pa = joint.rowwise().sum(), pb = joint.colwise().sum().transpose();
    const Eigen::MatrixXd D = joint - pa * pb.transpose();
    double best = 0.0;
    for (int S = 0; S < (1 << ra); ++S)
      for (int T = 0; T < (1 << rb); ++T) {
        double s = 0.0;
        for (int a = 0; a < ra; ++a)
          for (int b = 0; b < rb; ++b)
            if ((S >> a & 1) && (T >> b & 1)) s += D(a, b);
        best = std::max(best, std::abs(s));
      }
    CHECK(worst_event_value(D) == doctest::Approx(best).epsilon(1e-12));
    CHECK(worst_event_value(D.transpose()) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("support pair bound on the three-spin example") {
  const auto spec = example1_spec(1.0, 1.0);
  const auto s = support_pair_bound(spec, {0}, {2});
  CHECK(s.worst_event > 0.0);
  CHECK(s.worst_event <= s.connection);
  CHECK(s.worst_covariance == doctest::Approx(4 * s.worst_event));
  CHECK(s.covariance_bound == doctest::Approx(4 * s.connection));
  CHECK_THROWS_AS(support_pair_bound(spec, {0}, {0}), Error);
  CHECK_THROWS_AS(support_pair_bound(spec, {0}, {7}), Error);
}

TEST_CASE("three-spin example across couplings") {
  for (double J12 : {0.5, 1.0, 2.0})
    for (double J23 : {0.5, 1.0, 2.0}) {
      const auto r = run_example1(J12, J23);
      CHECK(r.value("connection_13") == 0.0);
      CHECK(r.verdict("correlation_exceeds_connection")->holds);
      const auto r2 = run_example2(J12, J23);
      CHECK(r2.bounds_hold());
      CHECK(r2.value("ratio_integrated_over_abs_delta") == doctest::Approx(2.0).epsilon(1e-9));
      CHECK(r2.value("integrated_over_closed_form") == doctest::Approx(std::exp(J12 + J23)).epsilon(1e-9));
    }
}

TEST_CASE("sweep finds no violations and flags the free fixture") {
  SweepOptions opt;
  opt.models = 30;
  const auto r = covariance_sweep(opt);
  CHECK(r.bounds_hold());
  CHECK(r.verdict("zero_interaction_fixture_vanishes")->holds);
  CHECK(r.table("models")->rows.size() == 30);
}

TEST_CASE("symmetry suite and round trips on small settings") {
  SymmetrySuiteOptions opt;
  opt.instances = 20;
  opt.max_sites = 6;
  CHECK(symmetry_suite(opt).bounds_hold());
  CHECK(rcr_roundtrips().bounds_hold());
  CHECK(fk_identity(6).bounds_hold());
}

TEST_CASE("Cayley tree chain, roots and field bound") {
  const auto c = cayley_chain(0.7, 0.0, 0.0);
  CHECK(c.A.rowwise().sum().isApprox(Eigen::Vector2d::Ones()));
  CHECK(c.det() == doctest::Approx(std::tanh(0.7)));
  const auto roots = cayley_fixed_points(1.0, 0.0);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(-roots[2]));
  CHECK(std::abs(roots[1]) < 1e-12);
  for (double t : roots) CHECK(cayley_residual(1.0, 0.0, t) < 1e-12);
  CHECK(cayley_fixed_points(0.5, 0.0).size() == 1);
  // a strong field leaves one root even above the threshold
  CHECK(cayley_fixed_points(1.0, 3.0).size() == 1);
  const auto weak = cayley_field_bound(0.4);
  CHECK(weak.h == 0.0);
  const auto strong = cayley_field_bound(1.2);
  CHECK(strong.h > 0.0);
  CHECK(cayley_chain(1.2, strong.h, strong.t).det() == doctest::Approx(0.5).epsilon(1e-12));
  // at the bound the two non-central roots merge
  const auto merged = cayley_fixed_points(1.2, strong.h * (1 - 1e-6));
  CHECK(merged.size() == 3);
  const auto p = cayley_pbar(std::log(3.0) / 2, 0.0, 0.0);
  CHECK(p.det == doctest::Approx(0.5));
  CHECK(p.with_tanh4J == doctest::Approx(0.5 * 80.0 / 82.0));
  const auto r = run_cayley();
  CHECK(r.verdict("three_roots_at_J1")->holds);
  CHECK(r.verdict("boundary_det_is_half")->holds);
  CHECK(r.value("crossing_det") == doctest::Approx(std::log(3.0) / 2).epsilon(1e-9));
}

TEST_CASE("hard-core disagreement equivalence") {
  CHECK_THROWS_AS(hardcore_equivalence(hardcore_spec(Hypergraph(3, {make_bond({0, 1}), make_bond({1, 2}), make_bond({0, 2})}), 1.0)),
                  Error);
  const auto e = hardcore_equivalence(hardcore_spec(build_path(5), 0.7));
  CHECK(e.slices > 0);
  CHECK(e.mismatches == 0);
  CHECK(e.support_mismatches == 0);
  const auto framed = framed_hardcore(2, 2, 1.0, 0);
  CHECK(framed.region == Region{5, 6, 9, 10});
  CHECK(framed.boundary.at(0) == 1);
  CHECK(framed.boundary.at(1) == 0);
  CHECK(framed_hardcore(2, 2, 1.0, -1).boundary.at(0) == 0);
  const auto odd = framed_hardcore(2, 2, 1.0, 1);
  const auto c = disagreement_comparison(framed, odd, {5}, {10});
  CHECK(c.active == doctest::Approx(c.disagreement).epsilon(1e-12));
  CHECK(c.disagreement > 0.0);
  // identical frames: the copies agree in law but differ pointwise
  const auto same = disagreement_comparison(framed, framed, {5}, {10});
  CHECK(same.active == doctest::Approx(same.disagreement).epsilon(1e-12));
}

TEST_CASE("blue and red bonds follow both copies") {
  const Hypergraph g = build_path(3);
  MnsSample s;
  s.first = {1, 1, -1};
  s.second = {1, -1, -1};
  Philox4x32 rng(1, 1);
  draw_mns_bonds(g, {50.0, 50.0}, s, rng);
  // bond 0: copy one satisfied, copy two not; bond 1: the reverse
  CHECK(s.red_admissible == std::vector<std::uint8_t>{1, 1});
  CHECK(s.blue_admissible == std::vector<std::uint8_t>{0, 0});
  CHECK(s.red == std::vector<std::uint8_t>{1, 1});
  CHECK(s.nonoverlap == std::vector<std::uint8_t>{0, 1, 0});
  s.second = {1, 1, -1};
  draw_mns_bonds(g, {50.0, -50.0}, s, rng);
  CHECK(s.blue == std::vector<std::uint8_t>{1, 1});
  draw_mns_bonds(g, {-50.0, 50.0}, s, rng);
  CHECK(s.blue == std::vector<std::uint8_t>{0, 0});
  CHECK(s.red == std::vector<std::uint8_t>{0, 0});

  const auto q1 = quenched_couplings(build_grid(4, 4, false), 0.5, 9, 2);
  const auto q2 = quenched_couplings(build_grid(4, 4, false), 0.5, 9, 2);
  CHECK(q1.J == q2.J);
  for (double J : q1.J) CHECK(std::abs(J) == 0.5);
  CHECK(quenched_couplings(build_grid(4, 4, false), 0.5, 9, 3).J != q1.J);
}

TEST_CASE("Monte Carlo integrated connection agrees with enumeration") {
  const auto spec = example1_spec(1.0, 1.0);
  const double exact = integrated_connection(integrated_rc(prepare_two_copy(spec)), {0}, {2});
  McOptions opt;
  opt.samples = 64000;
  opt.seed = 17;
  opt.tasks = 16;
  set_num_threads(1);
  const auto a = integrated_connection_mc(spec, {0}, {2}, opt);
  set_num_threads(3);
  const auto b = integrated_connection_mc(spec, {0}, {2}, opt);
  set_num_threads(0);
  CHECK(a.value == b.value);
  CHECK(a.standard_error == b.standard_error);
  CHECK(a.samples == 64000);
  CHECK(std::abs(a.value - exact) < 4 * a.standard_error);
}

TEST_CASE("EA cross-check on a small budget") {
  EaCrossCheckOptions opt;
  opt.samples = 128000;
  opt.tasks = 16;
  const auto r = ea_cross_check(opt);
  CHECK(r.bounds_hold());
  CHECK(r.value("joint_cells") == 256);
}

TEST_CASE("report serialization") {
  RunResult r;
  r.experiment = "demo";
  r.config = {{"seed", 3}};
  r.exact("x", 0.25);
  r.estimate("y", 0.5, 0.01);
  r.exact("missing", std::nan(""));
  r.check_le("bound", 1.0, 2.0);
  r.claim("note", false, 1.0, 0.0);
  r.tables.push_back({"empty", {"a", "b"}, {}});
  CHECK(r.bounds_hold());
  r.check_le("broken", 3.0, 2.0, 0.5);
  CHECK_FALSE(r.bounds_hold());

  const auto j = to_json(r);
  CHECK(j["scalars"][1]["stderr"] == 0.01);
  CHECK(j["scalars"][2]["value"] == "nan");
  CHECK(j["provenance"]["seed"] == 3);
  CHECK(j["provenance"]["bounds_hold"] == false);
  CHECK_FALSE(j["provenance"].contains("wall_time"));
  CHECK(to_json_text(r) == to_json_text(r));

  CHECK(scalars_csv(r).rfind("name,value,stderr,mode\nx,0.25,,exact-float\n", 0) == 0);
  CHECK(verdicts_csv(r).rfind("name,holds,kind,lhs,rhs,slack\n", 0) == 0);
  CHECK(table_csv(r.tables[0]) == "a,b\n");
  CHECK(format_number(0.1) == "0.10000000000000001");

  const auto dir = std::filesystem::temp_directory_path() / "rcb_report_test";
  std::filesystem::remove_all(dir);
  const auto files = emit(r, dir, OutputFormat::Csv);
  CHECK(files.size() == 3);
  CHECK(slurp(dir / "demo_empty.csv") == "a,b\n");
  emit(r, dir, OutputFormat::Json);
  CHECK(slurp(dir / "demo.json") == to_json_text(r));
  std::filesystem::remove_all(dir);
  // a regular file where the directory should be
  const auto blocker = std::filesystem::temp_directory_path() / "rcb_report_blocker";
  std::ofstream(blocker) << "x";
  try {
    emit(r, blocker / "sub", OutputFormat::Json);
    FAIL("expected an Io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  std::filesystem::remove(blocker);
}

TEST_CASE("model files and region syntax") {
  CHECK(parse_region("0,3,5-7") == Region{0, 3, 5, 6, 7});
  CHECK(parse_region("4,1,1") == Region{1, 4});
  CHECK_THROWS_AS(parse_region("a"), Error);
  CHECK_THROWS_AS(parse_region("5-3"), Error);
  CHECK(parse_int_list("0,-2,2") == std::vector<int>{0, -2, 2});

  using nlohmann::json;
  const auto ising = spec_from_json(json::parse(R"({"model": "ising", "graph": {"grid": "3x2"}, "J": 0.5})"));
  CHECK(ising.graph.num_bonds() == 7);
  CHECK(ising.interaction.factors[0][0] == doctest::Approx(std::exp(0.5)));
  const auto hc = spec_from_json(json::parse(R"({"model": "hardcore", "graph": {"path": 3}, "a": 2})"));
  CHECK(hc.graph.num_bonds() == 5);
  const auto ea1 = spec_from_json(json::parse(R"({"model": "ea_pm_j", "graph": {"grid": "2x2"}, "J": 1, "seed": 4})"));
  const auto q = quenched_couplings(build_grid(2, 2, false), 1.0, 4, 0);
  for (std::size_t b = 0; b < q.J.size(); ++b)
    CHECK(ea1.interaction.factors[b][0] == doctest::Approx(std::exp(q.J[b])));
  const auto ex = spec_from_json(json::parse(R"({"model": "example1", "J12": 2})"));
  CHECK(ex.interaction.factors[0][0] == doctest::Approx(std::exp(2.0)));

  const auto table = spec_from_json(json::parse(R"({
    "model": "table", "alphabet": [0, 1],
    "graph": {"n": 3, "bonds": [[0, 1], [1, 2]]},
    "tables": [[0, 0, 0, "forbidden"], [0, 1, 1, 0]],
    "boundary": {"2": 1}})"));
  CHECK(table.region == Region{0, 1});
  CHECK(table.boundary.at(2) == 1);
  CHECK(table.interaction.factors[0][3] == 0.0);
  CHECK(table.interaction.factors[1][1] == doctest::Approx(std::exp(1.0)));

  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"model": "potts", "graph": {"path": 2}})")), Error);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"model": "ising"})")), Error);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"model": "ising", "graph": {"n": 2, "bonds": [[0, 5]]}})")), Error);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"model": "ising", "graph": {"path": 3}, "boundary": {"0": 7}})")),
                  Error);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"model": "ising", "graph": {"path": 3}, "J": "x"})")), Error);
}
