#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include <boost/math/distributions/normal.hpp>

#include "rcb/experiments.hpp"
#include "rcb/models.hpp"
#include "rcb/percolation.hpp"
#include "rcb/sampler.hpp"
#include "rcb/typed_rcr.hpp"

namespace rcb {

namespace {

// Stream ids below 2^32 belong to coupling draws; chains get their own block.
Philox4x32 chain_stream(std::uint64_t seed, std::uint64_t task, int k) {
  return Philox4x32(seed, (std::uint64_t{1} << 32) | (task << 2) | static_cast<std::uint64_t>(k));
}

void read_spins(const HeatBath& chain, std::vector<int>& out) {
  out.resize(chain.digits().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = chain.value(i);
}

struct BlueClusters {
  int largest_overlap = 0;
  int largest_nonoverlap = 0;
  bool spans = false;
  std::vector<int> sizes;  // every blue cluster with at least one bond
};

// Spanning: a cluster touching both x = 0 and x = L - 1 (open), or occupying
// every column (periodic).
BlueClusters blue_clusters(const Hypergraph& g, const MnsSample& s, int L, bool periodic) {
  const int n = g.num_vertices();
  DisjointSets ds(n);
  std::vector<std::uint8_t> touched(n, 0);
  for (std::size_t b = 0; b < g.num_bonds(); ++b)
    if (s.blue[b]) {
      const auto& v = g.bond(b).vertices;
      ds.unite(v[0], v[1]);
      touched[v[0]] = touched[v[1]] = 1;
    }
  BlueClusters out;
  std::map<int, std::vector<int>> members;
  for (int v = 0; v < n; ++v)
    if (touched[v]) members[ds.find(v)].push_back(v);
  for (const auto& [root, vs] : members) {
    const int size = static_cast<int>(vs.size());
    out.sizes.push_back(size);
    if (s.nonoverlap[root])
      out.largest_nonoverlap = std::max(out.largest_nonoverlap, size);
    else
      out.largest_overlap = std::max(out.largest_overlap, size);
    std::vector<std::uint8_t> column(L, 0);
    for (int v : vs) column[v % L] = 1;
    const bool spans = periodic ? std::all_of(column.begin(), column.end(), [](auto c) { return c != 0; })
                                : column.front() && column.back();
    out.spans = out.spans || spans;
  }
  return out;
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

}  // namespace

QuenchedCouplings quenched_couplings(const Hypergraph& g, double J, std::uint64_t seed, std::uint64_t realization) {
  require(realization < (std::uint64_t{1} << 32), "realization index out of range");
  QuenchedCouplings q{{}, seed, realization};
  Philox4x32 rng(seed, realization);
  for (std::size_t b = 0; b < g.num_bonds(); ++b) q.J.push_back(rng.bernoulli(0.5) ? J : -J);
  return q;
}

RunResult ea_mns_percolation(const EaOptions& opt) {
  require(opt.L >= 2 && opt.samples >= 32 && opt.realizations >= 1, "need L >= 2, samples >= 32, realizations >= 1");
  require(opt.burn_in >= 0 && opt.gap >= 0, "burn-in and gap must be nonnegative");
  RunResult r;
  r.experiment = "ea";
  r.config = {{"L", opt.L},           {"J", opt.J},           {"beta", opt.beta},       {"periodic", opt.periodic},
              {"seed", opt.seed},     {"realizations", opt.realizations},                {"burn_in", opt.burn_in},
              {"samples", opt.samples}, {"gap", opt.gap}};
  const Hypergraph g = build_grid(opt.L, opt.L, opt.periodic);
  const double sites = static_cast<double>(g.num_vertices());
  const double bonds = static_cast<double>(g.num_bonds());
  constexpr int kBins = 24;

  struct Realization {
    int gap = 0;
    double tau = 0.0;
    BatchMeans blue, red, blue_given_admissible, red_given_admissible, nonoverlap, largest_nonoverlap, largest_overlap, spans;
    std::vector<double> histogram = std::vector<double>(kBins, 0.0);
  };
  std::vector<Realization> out(static_cast<std::size_t>(opt.realizations));
  parallel_for(out.size(), [&](std::size_t k) {
    auto& res = out[k];
    auto q = quenched_couplings(g, opt.J, opt.seed, k);
    for (double& J : q.J) J *= opt.beta;
    const auto model = compile(ising_spec(g, q.J));
    HeatBath one(model, chain_stream(opt.seed, k, 0)), two(model, chain_stream(opt.seed, k, 1));
    Philox4x32 bond_rng = chain_stream(opt.seed, k, 2);
    one.randomize();
    two.randomize();
    one.sweeps(opt.burn_in);
    two.sweeps(opt.burn_in);

    MnsSample s;
    auto overlap = [&] {
      double v = 0.0;
      for (std::size_t i = 0; i < one.digits().size(); ++i) v += one.value(i) * two.value(i);
      return v / sites;
    };
    res.gap = opt.gap;
    if (res.gap == 0) {
      std::vector<double> pilot;
      for (int t = 0; t < 256; ++t) {
        one.sweep();
        two.sweep();
        pilot.push_back(overlap());
      }
      res.gap = std::max(1, static_cast<int>(std::ceil(2.0 * integrated_autocorrelation(pilot))));
    }

    std::vector<double> blue, red, blue_adm, red_adm, nonoverlap, lno, lo, spans, qseries;
    for (int t = 0; t < opt.samples; ++t) {
      one.sweeps(res.gap);
      two.sweeps(res.gap);
      read_spins(one, s.first);
      read_spins(two, s.second);
      draw_mns_bonds(g, q.J, s, bond_rng);
      const auto c = blue_clusters(g, s, opt.L, opt.periodic);
      blue.push_back(std::count(s.blue.begin(), s.blue.end(), 1) / bonds);
      red.push_back(std::count(s.red.begin(), s.red.end(), 1) / bonds);
      // given the spins, each admissible bond is kept independently, so these ratios are unbiased
      const auto nb = std::count(s.blue_admissible.begin(), s.blue_admissible.end(), 1);
      const auto nr = std::count(s.red_admissible.begin(), s.red_admissible.end(), 1);
      if (nb > 0) blue_adm.push_back(double(std::count(s.blue.begin(), s.blue.end(), 1)) / double(nb));
      if (nr > 0) red_adm.push_back(double(std::count(s.red.begin(), s.red.end(), 1)) / double(nr));
      nonoverlap.push_back(std::count(s.nonoverlap.begin(), s.nonoverlap.end(), 1) / sites);
      lno.push_back(c.largest_nonoverlap / sites);
      lo.push_back(c.largest_overlap / sites);
      spans.push_back(c.spans ? 1.0 : 0.0);
      qseries.push_back(overlap());
      for (int size : c.sizes)
        res.histogram[std::min(kBins - 1, static_cast<int>(std::bit_width(static_cast<unsigned>(size))) - 1)] += 1.0 / opt.samples;
    }
    res.tau = std::max(integrated_autocorrelation(qseries), integrated_autocorrelation(blue));
    res.blue = batch_means(blue);
    res.red = batch_means(red);
    res.blue_given_admissible = batch_means(blue_adm);
    res.red_given_admissible = batch_means(red_adm);
    res.nonoverlap = batch_means(nonoverlap);
    res.largest_nonoverlap = batch_means(lno);
    res.largest_overlap = batch_means(lo);
    res.spans = batch_means(spans);
  });

  Table t{"realizations",
          {"realization", "gap", "tau", "blue_density", "blue_se", "red_density", "red_se", "nonoverlap_fraction",
           "largest_blue_nonoverlap", "largest_blue_overlap", "spanning_fraction"},
          {}};
  Table h{"cluster_sizes", {"size_from", "size_to", "clusters_per_sample"}, {}};
  std::vector<double> histogram(kBins, 0.0);
  auto combine = [&](BatchMeans Realization::*field, const std::string& name) {
    std::vector<double> means;
    double var = 0.0;
    for (const auto& res : out) {
      means.push_back((res.*field).mean);
      var += (res.*field).standard_error * (res.*field).standard_error;
    }
    const double R = static_cast<double>(out.size());
    r.estimate(name, mean_of(means), std::sqrt(var) / R);
    return std::pair{mean_of(means), std::sqrt(var) / R};
  };
  double max_tau = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& res = out[k];
    max_tau = std::max(max_tau, res.tau);
    t.rows.push_back({double(k), double(res.gap), res.tau, res.blue.mean, res.blue.standard_error, res.red.mean,
                      res.red.standard_error, res.nonoverlap.mean, res.largest_nonoverlap.mean,
                      res.largest_overlap.mean, res.spans.mean});
    for (int b = 0; b < kBins; ++b) histogram[b] += res.histogram[b] / static_cast<double>(out.size());
  }
  for (int b = 0; b < kBins; ++b)
    if (histogram[b] > 0.0) h.rows.push_back({double(1 << b), double((1 << (b + 1)) - 1), histogram[b]});
  combine(&Realization::blue, "blue_density");
  combine(&Realization::red, "red_density");
  combine(&Realization::nonoverlap, "nonoverlap_fraction");
  combine(&Realization::largest_nonoverlap, "largest_blue_cluster_nonoverlap");
  combine(&Realization::largest_overlap, "largest_blue_cluster_overlap");
  combine(&Realization::spans, "blue_spanning_fraction");
  r.exact("max_tau", max_tau);
  const double p_blue = 1.0 - std::exp(-4.0 * opt.beta * std::abs(opt.J));
  const double p_red = 1.0 - std::exp(-2.0 * opt.beta * std::abs(opt.J));
  r.exact("blue_probability", p_blue, ValueMode::ClosedForm);
  r.exact("red_probability", p_red, ValueMode::ClosedForm);
  const auto [blue_adm, blue_se] = combine(&Realization::blue_given_admissible, "blue_per_admissible_bond");
  const auto [red_adm, red_se] = combine(&Realization::red_given_admissible, "red_per_admissible_bond");
  r.check_le("blue_per_admissible_z", blue_se > 0.0 ? std::abs(blue_adm - p_blue) / blue_se : 0.0, 3.0);
  r.check_le("red_per_admissible_z", red_se > 0.0 ? std::abs(red_adm - p_red) / red_se : 0.0, 3.0);
  if (max_tau * 50.0 > opt.samples)
    r.warnings.push_back("integrated autocorrelation time " + format_number(max_tau) +
                         " is large against the sample count; errors may be underestimated");
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(h));
  return r;
}

RunResult ea_cross_check(const EaCrossCheckOptions& opt) {
  require(opt.tasks >= 2 && opt.samples >= static_cast<std::uint64_t>(opt.tasks), "need at least two tasks");
  RunResult r;
  r.experiment = "ea_cross_check";
  r.config = {{"J", opt.J}, {"samples", opt.samples}, {"seed", opt.seed}, {"tasks", opt.tasks}, {"burn_in", opt.burn_in}};
  const Hypergraph g = build_grid(2, 2, false);
  const auto q = quenched_couplings(g, opt.J, opt.seed, 0);
  const auto spec = ising_spec(g, q.J);
  const auto doubled = compile(doubled_spec(spec));
  const auto exact = typed_pattern_distribution(mns_base(doubled), gibbs_measure(doubled));
  const std::size_t m = g.num_bonds();
  const std::size_t cells = exact.size();

  const auto model = compile(spec);
  const std::uint64_t per_task = opt.samples / static_cast<std::uint64_t>(opt.tasks);
  std::vector<std::vector<double>> freq(static_cast<std::size_t>(opt.tasks), std::vector<double>(cells, 0.0));
  parallel_for(freq.size(), [&](std::size_t k) {
    HeatBath one(model, chain_stream(opt.seed, k, 0)), two(model, chain_stream(opt.seed, k, 1));
    Philox4x32 bond_rng = chain_stream(opt.seed, k, 2);
    one.randomize();
    two.randomize();
    one.sweeps(opt.burn_in);
    two.sweeps(opt.burn_in);
    MnsSample s;
    for (std::uint64_t t = 0; t < per_task; ++t) {
      one.sweep();
      two.sweep();
      read_spins(one, s.first);
      read_spins(two, s.second);
      draw_mns_bonds(g, q.J, s, bond_rng);
      std::uint64_t code = 0;
      for (std::size_t b = 0; b < m; ++b) code |= std::uint64_t(s.blue[b] | (s.red[b] << 1)) << (2 * b);
      freq[k][code] += 1.0 / static_cast<double>(per_task);
    }
  });

  const double T = static_cast<double>(opt.tasks);
  const double N = T * static_cast<double>(per_task);
  auto estimate = [&](auto&& cell_value) {
    double mean = 0.0, var = 0.0;
    for (const auto& f : freq) mean += cell_value(f);
    mean /= T;
    for (const auto& f : freq) var += (cell_value(f) - mean) * (cell_value(f) - mean);
    return std::pair{mean, std::sqrt(var / (T - 1.0) / T)};
  };
  auto z_of = [&](double est, double se, double p) {
    const double s = se > 0.0 ? se : std::sqrt(p * (1.0 - p) / N);
    if (s > 0.0) return std::abs(est - p) / s;
    return est == p ? 0.0 : std::numeric_limits<double>::infinity();
  };

  // per-bond outcome marginals: 4 bonds x 4 outcomes
  Table marg{"bond_outcomes", {"bond", "outcome", "exact", "estimate", "stderr", "z"}, {}};
  double max_bond_z = 0.0;
  for (std::size_t b = 0; b < m; ++b)
    for (std::uint64_t o = 0; o < 4; ++o) {
      auto cell = [&](const std::vector<double>& f) {
        double v = 0.0;
        for (std::uint64_t c = 0; c < cells; ++c)
          if (((c >> (2 * b)) & 3u) == o) v += f[c];
        return v;
      };
      double p = 0.0;
      for (std::uint64_t c = 0; c < cells; ++c)
        if (((c >> (2 * b)) & 3u) == o) p += exact[c];
      const auto [est, se] = estimate(cell);
      const double z = z_of(est, se, p);
      max_bond_z = std::max(max_bond_z, z);
      marg.rows.push_back({double(b), double(o), p, est, se, z});
    }
  double max_joint_z = 0.0;
  std::size_t impossible_seen = 0;
  for (std::uint64_t c = 0; c < cells; ++c) {
    const auto [est, se] = estimate([&](const std::vector<double>& f) { return f[c]; });
    if (exact[c] == 0.0) {
      impossible_seen += est > 0.0;
      continue;
    }
    max_joint_z = std::max(max_joint_z, z_of(est, se, exact[c]));
  }
  // two-sided Bonferroni threshold at family level 1% over the joint cells
  const boost::math::normal unit;
  const double threshold = boost::math::quantile(boost::math::complement(unit, 0.01 / (2.0 * double(cells))));
  r.exact("samples", N);
  r.exact("joint_cells", double(cells));
  r.exact("bonferroni_threshold", threshold, ValueMode::ClosedForm);
  r.check_le("max_bond_outcome_z", max_bond_z, 3.0);
  r.check_le("max_joint_cell_z", max_joint_z, threshold);
  r.check_le("impossible_cells_sampled", double(impossible_seen), 0.0);
  r.tables.push_back(std::move(marg));
  return r;
}

}  // namespace rcb
