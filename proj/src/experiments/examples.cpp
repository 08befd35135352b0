#include <cmath>

#include "rcb/experiments.hpp"
#include "rcb/models.hpp"
#include "rcb/percolation.hpp"
#include "rcb/random_models.hpp"
#include "rcb/typed_rcr.hpp"

namespace rcb {

namespace {

bool sigma_is_zero(const std::vector<int>& sigma) {
  for (int s : sigma)
    if (s != 0) return false;
  return true;
}

}  // namespace

RunResult run_example1(double J12, double J23) {
  RunResult r;
  r.experiment = "example1";
  r.config = {{"J12", J12}, {"J23", J23}};
  const auto spec = example1_spec(J12, J23);
  const auto mu = gibbs_measure(spec);
  const double p13 = probability(mu, [](std::span<const int> s) { return s[0] == 1 && s[2] == 1; });
  const double p1 = probability(mu, [](std::span<const int> s) { return s[0] == 1; });
  const double p3 = probability(mu, [](std::span<const int> s) { return s[2] == 1; });
  const double delta = p13 - p1 * p3;
  const double cov = covariance(mu, [](std::span<const int> s) { return s[0]; }, [](std::span<const int> s) { return s[2]; });

  const auto base = monotone_base(spec);
  const auto law = activity_distribution(base, mu);
  const double connection = connection_probability(law, geometry(base), {0}, {2});
  // mass of the assignment with both bonds on their restricted subsets
  const auto P = bond_marginal(base);
  double both_restricted = 0.0;
  if (base.bonds[0].options.size() > 1 && base.bonds[1].options.size() > 1) both_restricted = P[0];

  r.exact("delta_mu", delta);
  r.exact("cov_13", cov);
  r.exact("connection_13", connection);
  r.exact("both_restricted_mass", both_restricted);
  r.claim("connection_is_zero", connection == 0.0, connection, 0.0);
  r.claim("cov_is_four_delta", std::abs(cov - 4 * delta) <= 1e-12, cov, 4 * delta);
  r.claim("correlation_exceeds_connection", std::abs(cov) > connection, connection, std::abs(cov));
  return r;
}

RunResult run_example2(double J12, double J23) {
  RunResult r;
  r.experiment = "example2";
  r.config = {{"J12", J12}, {"J23", J23}};
  const auto spec = example1_spec(J12, J23);
  const auto tc = prepare_two_copy(spec);
  const auto rho = overlap_distribution(tc);

  Table slices{"slices", {"sigma1", "sigma2", "sigma3", "rho", "connection_13", "z_slice"}, {}};
  double other_max = 0.0, zero_slice_connection = 0.0, zero_slice_z = 0.0, rho_zero = 0.0;
  double restricted12 = 0.0, restricted23 = 0.0;
  bool uniform_020 = false;
  for (std::uint64_t code : overlap_support(rho)) {
    const auto sigma = rho.space().labels_of(code);
    const auto d = slice_data(tc, make_slice(tc, sigma), monotone_family<double>());
    const double p = slice_connection_prob(d, {0}, {2});
    const double z = configuration_weights(d.model).sum();
    slices.rows.push_back({double(sigma[0]), double(sigma[1]), double(sigma[2]), rho[code], p, z});
    if (sigma_is_zero(sigma)) {
      zero_slice_connection = p;
      zero_slice_z = z;
      rho_zero = rho[code];
      if (d.base.bonds[0].options.size() > 1) restricted12 = d.base.bonds[0].options[0].probability;
      if (d.base.bonds[1].options.size() > 1) restricted23 = d.base.bonds[1].options[0].probability;
    } else {
      other_max = std::max(other_max, p);
    }
    if (sigma == std::vector<int>{0, 2, 0}) {
      const auto law = nonoverlap_distribution(tc, d.slice);
      uniform_020 = true;
      for (std::uint64_t c = 0; c < law.size(); ++c) uniform_020 = uniform_020 && std::abs(law[c] - 0.25) < 1e-15;
    }
  }
  r.tables.push_back(std::move(slices));

  const auto irc = integrated_rc(tc);
  const double pbar = integrated_connection(irc, {0}, {2});
  const auto& mu = tc.mu;
  const double p13 = probability(mu, [](std::span<const int> s) { return s[0] == 1 && s[2] == 1; });
  const double p1 = probability(mu, [](std::span<const int> s) { return s[0] == 1; });
  const double p3 = probability(mu, [](std::span<const int> s) { return s[2] == 1; });
  const double delta = p13 - p1 * p3;
  const double cov = covariance(mu, [](std::span<const int> s) { return s[0]; }, [](std::span<const int> s) { return s[2]; });

  const double a = std::exp(J12), c = std::exp(J23);
  const double Z = 2 * (2 + a + c);
  const double pbar_closed = 2 * (1 - std::exp(-J12)) * (1 - std::exp(-J23)) / (Z * Z);
  const double slice_closed = 2 * (1 - std::exp(-J12)) * (1 - std::exp(-J23)) / zero_slice_z;

  r.exact("delta_mu", delta);
  r.exact("cov_13", cov);
  r.exact("rho_zero", rho_zero);
  r.exact("zero_slice_connection_13", zero_slice_connection);
  r.exact("integrated_connection_13", pbar);
  r.exact("zero_slice_restricted_probability_12", restricted12);
  r.exact("zero_slice_restricted_probability_23", restricted23);
  r.exact("other_slices_max_connection", other_max);
  if (delta != 0.0) r.exact("ratio_integrated_over_abs_delta", pbar / std::abs(delta));
  r.exact("published_factor", 2.0, ValueMode::ClosedForm);
  r.exact("integrated_over_closed_form", pbar / pbar_closed);
  r.exact("zero_slice_over_closed_form", zero_slice_connection / slice_closed);

  r.check_le("event_covariance_bound", std::abs(delta), pbar, 1e-12);
  r.check_le("covariance_bound", std::abs(cov), 4 * pbar, 1e-12);
  r.check_le("covariance_bound_zero_slice", std::abs(cov), 4 * zero_slice_connection, 1e-12);
  r.claim("other_slices_disconnected", other_max == 0.0, other_max, 0.0);
  r.claim("slice_020_uniform", uniform_020);
  r.claim("restricted_probability_12", std::abs(restricted12 - (1 - std::exp(-std::abs(J12)))) < 1e-12, restricted12,
          1 - std::exp(-std::abs(J12)));
  if (delta != 0.0)
    r.claim("ratio_matches_published_factor", std::abs(pbar / std::abs(delta) - 2.0) < 1e-9, pbar / std::abs(delta),
            2.0);
  return r;
}

RunResult fk_identity(int max_spins) {
  RunResult r;
  r.experiment = "fk_identity";
  r.config = {{"max_spins", max_spins}};
  std::vector<std::pair<std::string, Hypergraph>> graphs;
  for (int n = 2; n <= max_spins; ++n) graphs.emplace_back("path" + std::to_string(n), build_path(n));
  for (auto [w, h] : {std::pair{2, 2}, {2, 3}, {3, 3}, {2, 4}, {2, 5}})
    if (w * h <= max_spins) graphs.emplace_back("grid" + std::to_string(w) + "x" + std::to_string(h), build_grid(w, h, false));

  Table t{"pairs", {"graph", "i", "j", "covariance", "connection"}, {}};
  double worst = 0.0;
  std::size_t pairs = 0;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const auto& g = graphs[k].second;
    // heterogeneous ferromagnetic couplings e^J in {2, 3, 5/2}
    std::vector<Rational> f(g.num_bonds());
    for (std::size_t b = 0; b < f.size(); ++b) f[b] = b % 3 == 0 ? Rational(2) : b % 3 == 1 ? Rational(3) : Rational(5) / 2;
    const auto spec = ising_spec<Rational>(g, f);
    const auto mu = gibbs_measure(spec);
    const auto base = monotone_base(spec);
    const auto law = activity_distribution_literal(base);
    const BondGeometry geo = geometry(base);
    const int n = g.num_vertices();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Rational cov = covariance(mu, [i](std::span<const int> s) { return s[i]; },
                                        [j](std::span<const int> s) { return s[j]; });
        const Rational conn = connection_probability(law, geo, {i}, {j});
        const Rational diff = cov - conn;
        worst = std::max(worst, std::abs(to_double(diff)));
        if (diff != 0) r.warnings.push_back(graphs[k].first + ": covariance and connection differ for " +
                                            std::to_string(i) + "," + std::to_string(j));
        t.rows.push_back({double(k), double(i), double(j), to_double(cov), to_double(conn)});
        ++pairs;
      }
  }
  r.tables.push_back(std::move(t));
  r.exact("pairs", double(pairs), ValueMode::ExactRational);
  r.exact("max_abs_difference", worst, ValueMode::ExactRational);
  r.check_le("fk_identity", worst, 0.0, 1e-10);
  return r;
}

RunResult symmetry_suite(const SymmetrySuiteOptions& opt) {
  RunResult r;
  r.experiment = "symmetry_suite";
  r.config = {{"instances", opt.instances},
              {"seed", opt.seed},
              {"max_sites", opt.max_sites},
              {"all_slices_up_to", opt.all_slices_up_to},
              {"sampled_slices", opt.sampled_slices}};
  RandomModelOptions ropt;
  ropt.max_sites = opt.max_sites;
  ropt.max_bonds = 16;
  auto factor = [](Philox4x32& g) { return Rational(1 + static_cast<long>(g.below(60))) / 6; };

  struct Outcome {
    std::size_t slices = 0, symmetry_failures = 0, spec_failures = 0;
    int sites = 0;
  };
  std::vector<Outcome> out(static_cast<std::size_t>(opt.instances));
  parallel_for(out.size(), [&](std::size_t k) {
    Philox4x32 rng = task_stream(opt.seed, k);
    const auto spec = random_spec<Rational>(rng, ropt, factor);
    const auto tc = prepare_two_copy(spec);
    const std::size_t n = tc.model.space.dim();
    out[k].sites = static_cast<int>(n);

    std::vector<std::vector<int>> sigmas;
    if (static_cast<int>(n) <= opt.all_slices_up_to) {
      const auto rho = overlap_distribution(tc);
      for (std::uint64_t code : overlap_support(rho)) sigmas.push_back(rho.space().labels_of(code));
    } else {
      std::vector<std::uint64_t> support;
      for (std::uint64_t c = 0; c < tc.mu.size(); ++c)
        if (tc.mu[c] != 0) support.push_back(c);
      // sigma = 0 when it has mass, then sums of random support pairs
      std::vector<int> zero(n, 0);
      bool zero_ok = true;
      try {
        zero_ok = slice_weights(tc, make_slice(tc, zero)).sum() > 0;
      } catch (const Error&) {
        zero_ok = false;
      }
      if (zero_ok) sigmas.push_back(zero);
      while (static_cast<int>(sigmas.size()) < opt.sampled_slices) {
        const auto x = tc.model.space.labels_of(support[rng.below(support.size())]);
        const auto y = tc.model.space.labels_of(support[rng.below(support.size())]);
        std::vector<int> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + y[i];
        sigmas.push_back(std::move(s));
      }
    }
    std::vector<int> digits(n), image(n);
    for (const auto& sigma : sigmas) {
      const OverlapSlice s = make_slice(tc, sigma);
      const auto law = nonoverlap_distribution(tc, s);
      const auto sym = gibbs_measure(compile(symmetrized_spec(spec, s)));
      ++out[k].slices;
      bool same = sym.size() == law.size();
      for (std::uint64_t c = 0; same && c < law.size(); ++c) same = sym[c] == law[c];
      if (!same) ++out[k].spec_failures;
      bool symmetric = true;
      const auto& space = law.space();
      for (std::uint64_t c = 0; c < law.size() && symmetric; ++c) {
        space.decode(c, digits);
        for (std::size_t i = 0; i < n; ++i) image[i] = s.reflection[i][digits[i]];
        symmetric = law[c] == law[space.encode(image)];
      }
      if (!symmetric) ++out[k].symmetry_failures;
    }
  });

  std::size_t slices = 0, sym_fail = 0, spec_fail = 0;
  int largest = 0;
  Table t{"instances", {"instance", "sites", "slices", "symmetry_failures", "spec_failures"}, {}};
  for (std::size_t k = 0; k < out.size(); ++k) {
    slices += out[k].slices;
    sym_fail += out[k].symmetry_failures;
    spec_fail += out[k].spec_failures;
    largest = std::max(largest, out[k].sites);
    t.rows.push_back({double(k), double(out[k].sites), double(out[k].slices), double(out[k].symmetry_failures),
                      double(out[k].spec_failures)});
  }
  r.tables.push_back(std::move(t));
  r.exact("instances", double(out.size()), ValueMode::ExactRational);
  r.exact("slices_checked", double(slices), ValueMode::ExactRational);
  r.exact("largest_region", double(largest), ValueMode::ExactRational);
  r.check_le("sigma_symmetry_failures", double(sym_fail), 0.0);
  r.check_le("symmetrized_spec_failures", double(spec_fail), 0.0);
  return r;
}

RunResult rcr_roundtrips(double J, std::uint64_t seed) {
  RunResult r;
  r.experiment = "rcr_roundtrips";
  r.config = {{"J", J}, {"seed", seed}};
  const double tol = 1e-10;

  const auto ex1 = example1_spec(J, J);
  const double e1 = max_abs_difference(reconstruct(monotone_base(ex1)), gibbs_measure(ex1));
  r.exact("example1_monotone", e1);
  r.check_le("example1_monotone", e1, tol);

  const auto tc = prepare_two_copy(ex1);
  double e2 = 0.0;
  std::size_t slices = 0;
  for_each_slice(tc, monotone_family<double>(), [&](const SliceData<double>& d) {
    e2 = std::max(e2, max_abs_difference(reconstruct(d.base), nonoverlap_distribution(tc, d.slice)));
    ++slices;
  });
  r.exact("example2_slice_bases", e2);
  r.exact("example2_slices", double(slices));
  r.check_le("example2_slice_bases", e2, tol);

  // one EA bond seen by two copies: three levels e^{2J}, 1, e^{-2J}
  const auto bond = ising_spec(build_path(2), std::vector<double>{J});
  const auto doubled_bond = compile(doubled_spec(bond));
  const auto mono = monotone_base(doubled_bond);
  const auto& opts = mono.bonds[0].options;
  const double p_err = opts.size() != 3
                           ? 1.0
                           : std::max({std::abs(opts[0].probability - (1 - std::exp(-2 * J))),
                                       std::abs(opts[1].probability - (std::exp(-2 * J) - std::exp(-4 * J))),
                                       std::abs(opts[2].probability - std::exp(-4 * J))});
  r.exact("ea_three_level_probabilities", p_err);
  r.check_le("ea_three_level_probabilities", p_err, 1e-14);

  auto product_error = [](const FiniteDistribution<double>& joint, const FiniteDistribution<double>& mu) {
    const std::uint64_t N = mu.size();
    double worst = 0.0;
    for (std::uint64_t c = 0; c < joint.size(); ++c) worst = std::max(worst, std::abs(joint[c] - mu[c % N] * mu[c / N]));
    return worst;
  };
  const auto mu_bond = gibbs_measure(bond);
  const double e3 = product_error(reconstruct(mono), mu_bond);
  r.exact("ea_bond_monotone", e3);
  r.check_le("ea_bond_monotone", e3, tol);
  const double e4 = product_error(reconstruct_typed(mns_base(doubled_bond)), mu_bond);
  r.exact("ea_bond_blue_red", e4);
  r.check_le("ea_bond_blue_red", e4, tol);

  const auto grid = build_grid(2, 2, false);
  const auto couplings = quenched_couplings(grid, J, seed, 0);
  const auto ea = ising_spec(grid, couplings.J);
  const auto doubled = compile(doubled_spec(ea));
  const auto mu = gibbs_measure(ea);
  const double e5 = product_error(reconstruct_typed(mns_base(doubled)), mu);
  r.exact("ea_2x2_blue_red", e5);
  r.check_le("ea_2x2_blue_red", e5, tol);
  const double e6 = product_error(reconstruct(monotone_base(doubled)), mu);
  r.exact("ea_2x2_monotone", e6);
  r.check_le("ea_2x2_monotone", e6, tol);
  return r;
}

}  // namespace rcb
