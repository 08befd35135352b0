#include <cmath>

#include "rcb/experiments.hpp"
#include "rcb/percolation.hpp"
#include "rcb/sampler.hpp"
#include "slice_activation.hpp"

namespace rcb {

McEstimate integrated_connection_mc(const GibbsSpec<double>& spec, const Region& A, const Region& B,
                                   const McOptions& opt) {
  require(opt.tasks >= 2, "need at least two tasks for an error estimate");
  require(opt.samples >= static_cast<std::uint64_t>(opt.tasks), "fewer samples than tasks");
  const auto model = compile(spec);
  BondGeometry geo;
  geo.num_vertices = spec.graph.num_vertices();
  for (const auto& f : model.factors) {
    geo.bonds.push_back(f.vertices);
    geo.bond_ids.push_back(f.bond);
  }
  const std::uint64_t per_task = opt.samples / static_cast<std::uint64_t>(opt.tasks);
  std::vector<double> means(static_cast<std::size_t>(opt.tasks), 0.0), taus(means.size(), 0.5);
  parallel_for(means.size(), [&](std::size_t k) {
    const std::uint64_t base = (std::uint64_t{2} << 32) | (static_cast<std::uint64_t>(k) << 2);
    HeatBath one(model, Philox4x32(opt.seed, base)), two(model, Philox4x32(opt.seed, base | 1u));
    Philox4x32 bond_rng(opt.seed, base | 2u);
    one.randomize();
    two.randomize();
    one.sweeps(opt.burn_in);
    two.sweeps(opt.burn_in);
    std::vector<double> series;
    series.reserve(per_task);
    ActivityPattern pattern(model.factors.size());
    for (std::uint64_t t = 0; t < per_task; ++t) {
      one.sweep();
      two.sweep();
      for (std::size_t b = 0; b < pattern.size(); ++b) {
        const auto& f = model.factors[b];
        pattern[b] = bond_rng.bernoulli(
            detail::slice_activation(f, f, model.space, model.space, one.digits(), two.digits()));
      }
      series.push_back(connected(geo, pattern, A, B) ? 1.0 : 0.0);
    }
    double s = 0.0;
    for (double v : series) s += v;
    means[k] = s / static_cast<double>(per_task);
    taus[k] = integrated_autocorrelation(series);
  });
  McEstimate out;
  const double T = static_cast<double>(means.size());
  for (double m : means) out.value += m / T;
  double var = 0.0;
  for (double m : means) var += (m - out.value) * (m - out.value);
  out.standard_error = std::sqrt(var / (T - 1.0) / T);
  out.samples = per_task * means.size();
  for (double t : taus) out.max_tau = std::max(out.max_tau, t);
  return out;
}

}  // namespace rcb
