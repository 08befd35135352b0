#include <cmath>
#include <vector>

#include "doctest.h"
#include "rcb/models.hpp"
#include "rcb/rng.hpp"
#include "rcb/sampler.hpp"

using namespace rcb;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("Philox streams are reproducible and distinct") {
  Philox4x32 a(7, 3), b(7, 3), c(7, 4);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    differ = differ || x != c.next_u32();
  }
  CHECK(differ);
  Philox4x32 u(1, 0);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  int hist[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++hist[u.below(3)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("heat bath reproduces exact marginals") {
  const auto spec = ising_spec(build_grid(2, 2, false), std::vector<double>{0.4, -0.3, 0.7, 0.2});
  const auto model = compile(spec);
  const auto mu = gibbs_measure(model);
  HeatBath chain(model, Philox4x32(11, 0));
  chain.randomize();
  chain.sweeps(100);
  std::vector<double> freq(mu.size(), 0.0);
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    chain.sweep();
    std::uint64_t code = 0, stride = 1;
    for (std::size_t i = 0; i < model.space.dim(); ++i) {
      code += static_cast<std::uint64_t>(chain.digits()[i]) * stride;
      stride *= static_cast<std::uint64_t>(model.space.radix(i));
    }
    freq[code] += 1.0 / n;
  }
  for (std::uint64_t c = 0; c < mu.size(); ++c) CHECK(std::abs(freq[c] - mu[c]) < 0.01);
}

TEST_CASE("heat bath respects hard constraints") {
  const auto model = compile(hardcore_spec(build_path(5), 2.0));
  HeatBath chain(model, Philox4x32(12, 0));
  for (int t = 0; t < 2000; ++t) {
    chain.sweep();
    for (int v = 0; v + 1 < 5; ++v) REQUIRE(chain.value(v) * chain.value(v + 1) == 0);
    REQUIRE(std::isfinite(chain.log_weight()));
  }
}

TEST_CASE("autocorrelation and batch means") {
  Philox4x32 rng(13, 0);
  std::vector<double> white(20000);
  for (auto& x : white) x = rng.uniform();
  CHECK(integrated_autocorrelation(white) == doctest::Approx(0.5).epsilon(0.2));
  // AR(1) with coefficient r has tau = (1 + r) / (2 (1 - r))
  const double r = 0.8;
  std::vector<double> ar(200000);
  double x = 0;
  for (auto& v : ar) {
    x = r * x + (rng.uniform() - 0.5);
    v = x;
  }
  CHECK(integrated_autocorrelation(ar) == doctest::Approx((1 + r) / (2 * (1 - r))).epsilon(0.15));
  CHECK(integrated_autocorrelation(std::vector<double>(100, 3.0)) == 0.5);

  const auto bm = batch_means(white, 32);
  CHECK(bm.batches == 32);
  CHECK(bm.mean == doctest::Approx(0.5).epsilon(0.02));
  CHECK(bm.standard_error == doctest::Approx(std::sqrt(1.0 / 12 / 20000)).epsilon(0.35));
}
