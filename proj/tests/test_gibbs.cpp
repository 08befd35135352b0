#include <cmath>

#include "doctest.h"
#include "rcb/gibbs.hpp"
#include "rcb/models.hpp"
#include "rcb/random_models.hpp"

using namespace rcb;

namespace {

Rational rat(long p, long q = 1) { return Rational(p) / Rational(q); }

// mu(omega_1 = 1 and omega_3 = 1) - mu(omega_1 = 1) mu(omega_3 = 1)
template <class Scalar>
Scalar delta_mu(const FiniteDistribution<Scalar>& mu) {
  auto one = [](int v) { return [v](std::span<const int> s) { return s[v] == 1; }; };
  return probability(mu, [](std::span<const int> s) { return s[0] == 1 && s[2] == 1; }) -
         probability(mu, one(0)) * probability(mu, one(2));
}

}  // namespace

TEST_CASE("zero interaction gives the uniform law") {
  const auto mu = gibbs_measure(ising_spec(build_path(2), 0.0));
  REQUIRE(mu.size() == 4);
  for (std::uint64_t c = 0; c < 4; ++c) CHECK(mu[c] == doctest::Approx(0.25));
}

TEST_CASE("example 1 partition function and correlation, exact") {
  const Rational a = rat(3), c = rat(5, 2);
  const auto spec = example1_spec<Rational>(a, c);
  const Rational Z = partition_function(spec);
  CHECK(Z == 2 * (2 + a + c));
  const auto mu = gibbs_measure(spec);
  const Rational d = delta_mu(mu);
  CHECK(d == (1 - a) * (1 - c) / (Z * Z));
  auto s1 = [](std::span<const int> s) { return s[0]; };
  auto s3 = [](std::span<const int> s) { return s[2]; };
  CHECK(covariance(mu, s1, s3) == 4 * d);
}

TEST_CASE("example 1 at J12 = J23 = 1 in floating point") {
  const auto mu = gibbs_measure(example1_spec(1.0, 1.0));
  const double e = std::exp(1.0);
  const double expected = (1 - e) * (1 - e) / std::pow(2 * (2 + 2 * e), 2);
  CHECK(std::abs(delta_mu(mu) - expected) < 1e-12);
  auto s1 = [](std::span<const int> s) { return s[0]; };
  auto s3 = [](std::span<const int> s) { return s[2]; };
  CHECK(std::abs(covariance(mu, s1, s3) - 4 * expected) < 1e-12);
}

TEST_CASE("hard-core edge with unit activity") {
  const auto mu = gibbs_measure(hardcore_spec<Rational>(build_path(2), rat(1)));
  // codes: digit of vertex 0 least significant, digit 1 = occupied
  CHECK(mu[0] == rat(1, 3));
  CHECK(mu[1] == rat(1, 3));
  CHECK(mu[2] == rat(1, 3));
  CHECK(mu[3] == 0);
}

TEST_CASE("expectation and covariance basics") {
  const auto mu1 = gibbs_measure(ising_spec(Hypergraph(1, {}), 0.0));
  CHECK(expectation(mu1, [](std::span<const int> s) { return s[0]; }) == doctest::Approx(0.0));
  VectorX<double> w = VectorX<double>::Zero(4);
  w[2] = 1.0;
  const FiniteDistribution<double> point(ProductSpace({0, 1}, {{-1, 1}, {-1, 1}}), w);
  CHECK(expectation(point, [](std::span<const int> s) { return 10 * s[0] + s[1]; }) == doctest::Approx(-9.0));
  const auto indep = gibbs_measure(ising_spec(Hypergraph(2, {}), 0.0));
  auto x = [](std::span<const int> s) { return s[0]; };
  auto y = [](std::span<const int> s) { return s[1]; };
  CHECK(std::abs(covariance(indep, x, y)) < 1e-12);
  CHECK(std::abs(covariance(indep, [](auto) { return 2.0; }, [](auto) { return 2.0; })) < 1e-12);
}

TEST_CASE("errors: all forbidden and too large") {
  GibbsSpec<double> spec;
  spec.graph = Hypergraph(2, {Hyperbond{{0}}, Hyperbond{{0, 1}}});
  spec.alphabet = make_alphabet({0, 1});
  spec.region = {0, 1};
  spec.interaction.factors = {{1.0, 0.0}, {0.0, 0.0, 0.0, 1.0}};
  try {
    gibbs_measure(spec);
    FAIL("expected AllForbidden");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllForbidden);
  }
  try {
    gibbs_measure(ising_spec(build_path(25), 0.1));
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
  spec.interaction.factors = {{0.0, 0.0}, {0.0, 0.0, 0.0, 1.0}};
  CHECK_THROWS_AS(compile(spec), Error);
}

TEST_CASE("potentials map to Boltzmann factors with the plus sign") {
  const auto inter = from_potentials({{Potential::finite(1.0), Potential::forbidden()}});
  CHECK(inter.factors[0][0] == doctest::Approx(std::exp(1.0)));
  CHECK(inter.factors[0][1] == 0.0);
}

TEST_CASE("boundary spins enter straddling bonds; uncovered bonds are free") {
  // path 0-1-2, region {1}, boundary fixes vertex 0 to +1, vertex 2 is free
  GibbsSpec<Rational> spec = ising_spec<Rational>(build_path(3), {rat(2), rat(3)});
  spec.region = {1};
  spec.boundary = {{0, 1}};
  const auto mu = gibbs_measure(spec);
  // weight(+1) = 2, weight(-1) = 1/2
  CHECK(mu[1] == rat(4, 5));
  CHECK(mu[0] == rat(1, 5));
}

TEST_CASE("property: conditioning on the outside of a subregion gives the Gibbs measure there, exactly") {
  Philox4x32 rng(5, 1);
  RandomModelOptions opt;
  opt.max_sites = 8;
  opt.boundary_probability = 0.3;
  for (int trial = 0; trial < 40; ++trial) {
    auto spec = random_spec<Rational>(rng, opt, [](Philox4x32& r) { return Rational(1 + static_cast<long>(r.below(40))) / 8; });
    const auto model = compile(spec);
    const auto mu = gibbs_measure(model);
    const std::size_t n = spec.region.size();
    Region inner;
    for (Vertex v : spec.region)
      if (rng.bernoulli(0.5)) inner.push_back(v);
    if (inner.empty() || inner.size() == n) continue;
    // pick an outside configuration with positive mass
    std::uint64_t code = rng.below(mu.size());
    while (mu[code] == 0) code = (code + 1) % mu.size();
    const auto labels = model.space.labels_of(code);
    GibbsSpec<Rational> sub = spec;
    sub.region = inner;
    for (std::size_t i = 0; i < n; ++i)
      if (!region_contains(inner, spec.region[i])) sub.boundary[spec.region[i]] = spec.alphabet.index_of(labels[i]);
    const auto local = gibbs_measure(sub);
    Rational cond_total = 0;
    std::vector<Rational> cond(local.size(), Rational(0));
    std::vector<int> digits(n);
    for (std::uint64_t c = 0; c < mu.size(); ++c) {
      const auto l = model.space.labels_of(c);
      bool same_outside = true;
      std::vector<int> inner_digits;
      for (std::size_t i = 0; i < n; ++i) {
        if (region_contains(inner, spec.region[i])) inner_digits.push_back(local.space().digit_of(inner_digits.size(), l[i]));
        else if (l[i] != labels[i]) same_outside = false;
      }
      if (!same_outside) continue;
      cond[local.space().encode(inner_digits)] += mu[c];
      cond_total += mu[c];
    }
    for (std::uint64_t c = 0; c < local.size(); ++c) REQUIRE(cond[c] / cond_total == local[c]);
  }
}
