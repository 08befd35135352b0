#include <cmath>

#include "doctest.h"
#include "rcb/models.hpp"
#include "rcb/random_models.hpp"
#include "rcb/rcr.hpp"
#include "rcb/typed_rcr.hpp"

using namespace rcb;

namespace {

Rational rat(long p, long q = 1) { return Rational(p) / Rational(q); }

template <class Scalar>
bool same_law(const FiniteDistribution<Scalar>& a, const FiniteDistribution<Scalar>& b, double tol) {
  if (!(a.space() == b.space())) return false;
  for (std::uint64_t c = 0; c < a.size(); ++c)
    if (!near(a[c], b[c], tol)) return false;
  return true;
}

GibbsSpec<double> ea_spec(const Hypergraph& g, double J, std::uint64_t seed) {
  Philox4x32 rng(seed, 0);
  std::vector<double> couplings(g.num_bonds());
  for (auto& c : couplings) c = rng.bernoulli(0.5) ? J : -J;
  return ising_spec(g, couplings);
}

}  // namespace

TEST_CASE("monotone closed form") {
  const double J = 0.8;
  const auto p = monotone_rcr_potentials({J, 0.0});
  CHECK(p[0] == doctest::Approx(1 - std::exp(-J)));
  CHECK(monotone_rcr<Rational>({rat(5)}) == std::vector<Rational>{1});
  const auto ea = monotone_rcr_potentials({2 * J, 0.0, -2 * J});
  CHECK(ea[0] == doctest::Approx(1 - std::exp(-2 * J)));
  CHECK(ea[1] == doctest::Approx(std::exp(-2 * J) - std::exp(-4 * J)));
  CHECK(ea[2] == doctest::Approx(std::exp(-4 * J)));
  // levels (J, 0) with J = log 2
  CHECK(monotone_rcr<Rational>({rat(2), rat(1)}) == std::vector<Rational>{rat(1, 2), rat(1, 2)});
  CHECK_THROWS_AS(monotone_rcr<Rational>({rat(1), rat(2)}), Error);
}

TEST_CASE("Bernoulli solver reproduces the monotone closed form and solves the system") {
  const std::vector<Rational> levels{rat(9, 2), rat(2), rat(1, 3), rat(0)};
  const auto sol = solve_bernoulli_rcr(monotone_level_system(levels));
  const auto closed = monotone_rcr(levels);
  for (std::size_t i = 0; i < levels.size(); ++i) CHECK(sol.p[static_cast<Eigen::Index>(i)] == closed[i]);
  CHECK(sol.c == 1 / levels[0]);
  CHECK(sol.residual == 0.0);
  const auto single = solve_bernoulli_rcr(monotone_level_system<double>({2.5}));
  CHECK(single.p[0] == doctest::Approx(1.0));
}

TEST_CASE("Bernoulli solver on non-square and infeasible systems") {
  LevelSystem<double> sys;
  sys.levels = {3.0, 2.0, 1.0};
  sys.membership.resize(3, 4);
  // monotone family plus the subset {levels 1 and 3}
  sys.membership << 1, 1, 1, 1,
                    0, 1, 1, 0,
                    0, 0, 1, 1;
  const auto sol = solve_bernoulli_rcr(sys);
  CHECK(sol.degenerate);
  CHECK(sol.residual < 1e-10);
  CHECK(sol.p.minCoeff() >= 0.0);
  CHECK(sol.p.sum() == doctest::Approx(1.0));
  const Eigen::VectorXd w = Eigen::Vector3d(3, 2, 1);
  CHECK(((sys.membership * sol.p) - sol.c * w).cwiseAbs().maxCoeff() < 1e-10);

  LevelSystem<double> bad;
  bad.levels = {2.0, 1.0};
  bad.membership.resize(2, 1);
  bad.membership << 1, 0;
  try {
    solve_bernoulli_rcr(bad);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
  LevelSystem<Rational> square;
  square.levels = {rat(2), rat(1)};
  square.membership.resize(2, 2);
  square.membership << 1, 0, 0, 1;
  const auto diag = solve_bernoulli_rcr(square);
  CHECK(diag.p[0] == rat(2, 3));
  // unique solution needs negative mass on the first subset
  square.membership << 0, 1, 1, 1;
  CHECK_THROWS_AS(solve_bernoulli_rcr(square), Error);
}

TEST_CASE("example 1 base: restricted subsets, reconstruction and incompatible activity") {
  const Rational a = rat(5, 2), c = rat(4);
  const auto spec = example1_spec<Rational>(a, c);
  const auto model = compile(spec);
  const auto base = monotone_base(model);
  REQUIRE(base.bonds.size() == 2);
  CHECK(base.bonds[0].options[0].subset == 0b0001);
  CHECK(base.bonds[0].options[0].probability == 1 - 1 / a);
  CHECK(base.bonds[1].options[0].subset == 0b1000);
  CHECK(base.bonds[1].options[0].probability == 1 - 1 / c);
  CHECK(same_law(reconstruct(base), gibbs_measure(model), 0));
  const auto P = bond_marginal(base);
  // both restricted subsets chosen: no compatible spins
  CHECK(P[0] == 0);
  CHECK(count_compatible(base, std::vector<int>{0, 0}) == 0);
  CHECK(count_compatible(base, std::vector<int>{1, 1}) == 8);
  CHECK(count_compatible(base, std::vector<int>{0, 1}) == 2);
}

TEST_CASE("trivial bases") {
  RcrBase<double> base{ProductSpace({0, 1}, {{-1, 1}, {-1, 1}}), {}};
  RcrBond<double> rb;
  rb.bond = 0;
  rb.vertices = {0, 1};
  rb.radices = {2, 2};
  rb.indexer = LocalIndexer{{0, 1}, {1, 2}, 4};
  rb.options = {{0b1111, 1.0}};
  base.bonds.push_back(rb);
  const auto mu = reconstruct(base);
  for (std::uint64_t c = 0; c < 4; ++c) CHECK(mu[c] == doctest::Approx(0.25));
  const RcrBase<double> empty{ProductSpace({0}, {{-1, 1}}), {}};
  const auto P = bond_marginal(empty);
  CHECK(P.size() == 1);
  CHECK(P[0] == doctest::Approx(1.0));
}

TEST_CASE("single Ising bond: random-cluster activity") {
  const double J = 0.6;
  const auto base = monotone_base(ising_spec(build_path(2), J));
  const auto P = bond_marginal(base);
  const double p = 1 - std::exp(-2 * J);
  // option 0 is the agreement subset (active)
  CHECK(P[0] == doctest::Approx(2 * p / (2 * p + 4 * (1 - p))).epsilon(1e-12));
}

TEST_CASE("symmetrize_base") {
  const auto spec = example1_spec(1.0, 2.0);
  const auto tc = prepare_two_copy(spec);
  const auto s = make_slice(tc, {0, 0, 0});
  const auto sym_model = compile(symmetrized_spec(spec, s));
  const auto base = monotone_base(sym_model);
  const auto again = symmetrize_base(base, s);
  for (std::size_t b = 0; b < base.bonds.size(); ++b) {
    REQUIRE(again.bonds[b].options.size() == base.bonds[b].options.size());
    for (std::size_t j = 0; j < base.bonds[b].options.size(); ++j) {
      CHECK(again.bonds[b].options[j].subset == base.bonds[b].options[j].subset);
      CHECK(again.bonds[b].options[j].probability == doctest::Approx(base.bonds[b].options[j].probability));
    }
  }
  // the agreement subset is sigma-symmetric and carries 1 - e^{-J}
  CHECK(base.bonds[0].options[0].subset == 0b1001);
  CHECK(base.bonds[0].options[0].probability == doctest::Approx(1 - std::exp(-1.0)));

  RcrBase<double> lone = base;
  lone.bonds.resize(1);
  lone.bonds[0].weights.clear();
  lone.bonds[0].options = {{0b0001, 1.0}};
  const auto split = symmetrize_base(lone, s);
  REQUIRE(split.bonds[0].options.size() == 2);
  CHECK(split.bonds[0].options[0].subset == 0b0001);
  CHECK(split.bonds[0].options[1].subset == 0b1000);
  CHECK(split.bonds[0].options[1].probability == doctest::Approx(0.5));

  // a level-respecting subset whose mirror image splits a level
  RcrBase<double> skew = base;
  skew.bonds.resize(1);
  skew.bonds[0].weights = {3.0, 1.0, 1.0, 2.0};
  skew.bonds[0].options = {{0b0001, 1.0}};
  try {
    symmetrize_base(skew, std::vector<std::vector<int>>{{1, 0}, {0, 1}, {1, 0}});
    FAIL("expected NonSymmetrizable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonSymmetrizable);
  }
}

TEST_CASE("example 2 base reproduces the non-overlap law") {
  const auto spec = example1_spec<Rational>(rat(3), rat(2));
  const auto tc = prepare_two_copy(spec);
  const auto s = make_slice(tc, {0, 0, 0});
  const auto base = monotone_base(compile(symmetrized_spec(spec, s)));
  CHECK(same_law(reconstruct(base), nonoverlap_distribution(tc, s), 0));
  CHECK(base.bonds[0].options[0].probability == 1 - rat(1, 3));
}

TEST_CASE("property: monotone and general-subset bases round-trip, exactly") {
  Philox4x32 rng(31, 0);
  RandomModelOptions opt;
  opt.max_sites = 8;
  for (int trial = 0; trial < 60; ++trial) {
    const auto spec = random_spec<Rational>(rng, opt, [](Philox4x32& r) { return Rational(1 + static_cast<long>(r.below(60))) / 6; });
    const auto model = compile(spec);
    const auto mu = gibbs_measure(model);
    const auto base = monotone_base(model);
    REQUIRE(same_law(reconstruct(base), mu, 0));
    for (const auto& rb : base.bonds) {
      Rational total = 0;
      for (const auto& o : rb.options) total += o.probability;
      REQUIRE(total == 1);
    }
  }
  Philox4x32 frng(32, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto spec = random_spec<double>(frng, opt, exp_uniform_factor(3.0));
    const auto model = compile(spec);
    // monotone family plus each single level set that is not already in it
    std::vector<std::vector<LocalSet>> cand;
    for (const auto& f : model.factors) {
      const auto levels = distinct_levels<double>(f.table);
      std::vector<LocalSet> c;
      LocalSet acc = 0;
      for (const auto& l : levels) {
        LocalSet exact = 0;
        for (std::size_t x = 0; x < f.table.size(); ++x)
          if (f.table[x] == l) exact |= LocalSet{1} << x;
        acc |= exact;
        c.push_back(acc);
        if (exact != acc && l > 0) c.push_back(exact);
      }
      cand.push_back(c);
    }
    const auto base = subset_base(model, cand);
    REQUIRE(same_law(reconstruct(base), gibbs_measure(model), 1e-10));
  }
}

TEST_CASE("typed solver: blue/red closed form and generic systems") {
  const double J = 0.7;
  TypedLevelSystem mns;
  mns.levels = {std::exp(2 * J), 1.0, std::exp(-2 * J)};
  mns.alpha.resize(3, 2);
  mns.alpha << 1, 1, 0, 1, 0, 1;
  mns.beta.resize(3, 2);
  mns.beta << 0, 1, 1, 1, 0, 1;
  const auto sol = solve_typed_rcr(mns);
  CHECK(sol.closed_form);
  CHECK(sol.p_alpha[0] == doctest::Approx(1 - std::exp(-4 * J)).epsilon(1e-14));
  CHECK(sol.p_beta[0] == doctest::Approx(1 - std::exp(-2 * J)).epsilon(1e-14));
  CHECK(sol.residual < 1e-12);

  TypedLevelSystem flat;
  flat.levels = {1.0};
  flat.alpha = Eigen::MatrixXd::Ones(1, 1);
  flat.beta = Eigen::MatrixXd::Ones(1, 1);
  const auto f = solve_typed_rcr(flat);
  CHECK(f.p_alpha[0] == doctest::Approx(1.0));

  Philox4x32 rng(41, 0);
  for (int trial = 0; trial < 50; ++trial) {
    TypedLevelSystem sys;
    sys.alpha.resize(2, 2);
    sys.alpha << 1, 1, 0, 1;
    sys.beta.resize(2, 2);
    sys.beta << 1, 1, 0, 1;
    Eigen::Vector2d pa(rng.uniform(), 0), pb(rng.uniform(), 0);
    pa[1] = 1 - pa[0];
    pb[1] = 1 - pb[0];
    const Eigen::VectorXd prod = (sys.alpha * pa).cwiseProduct(sys.beta * pb);
    sys.levels = {prod[0], prod[1]};
    const auto s = solve_typed_rcr(sys);
    const Eigen::VectorXd got = (sys.alpha * s.p_alpha).cwiseProduct(sys.beta * s.p_beta);
    const Eigen::Vector2d w(1.0, prod[1] / prod[0]);
    CHECK((got - s.c * w).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(s.non_unique);
  }
  TypedLevelSystem impossible;
  impossible.levels = {2.0, 1.0};
  impossible.alpha = Eigen::MatrixXd::Ones(2, 1);
  impossible.beta = Eigen::MatrixXd::Ones(2, 1);
  CHECK_THROWS_AS(solve_typed_rcr(impossible), Error);
}

TEST_CASE("blue/red base reconstructs two independent copies") {
  for (const auto& g : {build_path(2), build_grid(2, 2, false)}) {
    const auto spec = ea_spec(g, 0.9, 3);
    const auto doubled = compile(doubled_spec(spec));
    const auto base = mns_base(doubled);
    for (const auto& rb : base.alpha.bonds) CHECK(rb.options[0].probability == doctest::Approx(1 - std::exp(-3.6)));
    for (const auto& rb : base.beta.bonds) CHECK(rb.options[0].probability == doctest::Approx(1 - std::exp(-1.8)));
    const auto typed = reconstruct_typed(base);
    const auto mu = gibbs_measure(spec);
    const std::uint64_t N = mu.size();
    for (std::uint64_t c = 0; c < typed.size(); ++c) CHECK(std::abs(typed[c] - mu[c % N] * mu[c / N]) < 1e-10);
    // the one-typed monotone base of the doubled model gives the same law
    CHECK(same_law(reconstruct(monotone_base(doubled)), typed, 1e-10));
  }
  const auto weak = mns_base(compile(doubled_spec(ea_spec(build_path(2), 1e-9, 1))));
  CHECK(weak.alpha.bonds[0].options[0].probability < 1e-8);
  CHECK(weak.beta.bonds[0].options[0].probability < 1e-8);
}

TEST_CASE("blue and red subsets follow the coupling sign") {
  const auto spec = ising_spec(build_path(2), std::vector<double>{-0.5});
  const auto base = mns_base(compile(doubled_spec(spec)));
  // local digits (copy1 i, copy1 j, copy2 i, copy2 j); satisfied means opposite spins
  const LocalSet blue = base.alpha.bonds[0].options[0].subset;
  const LocalSet red = base.beta.bonds[0].options[0].subset;
  for (int x = 0; x < 16; ++x) {
    const bool s1 = ((x & 1) != 0) != ((x & 2) != 0);
    const bool s2 = ((x & 4) != 0) != ((x & 8) != 0);
    CHECK(contains(blue, x) == (s1 && s2));
    CHECK(contains(red, x) == (s1 != s2));
  }
}
