#include "rcb/sampler.hpp"

#include <cmath>
#include <numeric>

namespace rcb {

HeatBath::HeatBath(const CompiledModel<double>& model, Philox4x32 rng)
    : model_(&model), rng_(rng), digits_(model.space.dim(), 0) {}

void HeatBath::randomize() {
  for (std::size_t i = 0; i < digits_.size(); ++i)
    digits_[i] = static_cast<int>(rng_.below(static_cast<std::uint64_t>(model_->space.radix(i))));
}

void HeatBath::sweep() {
  const auto& m = *model_;
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    const int r = m.space.radix(i);
    scratch_.assign(r, 1.0);
    for (int fi : m.site_factors[i]) {
      const auto& f = m.factors[fi];
      int stride = 0;
      for (std::size_t k = 0; k < f.indexer.coords.size(); ++k)
        if (f.indexer.coords[k] == static_cast<int>(i)) stride = f.indexer.strides[k];
      const int base = f.indexer.index(digits_) - digits_[i] * stride;
      for (int d = 0; d < r; ++d) scratch_[d] *= f.table[base + d * stride];
    }
    double total = 0.0;
    for (double w : scratch_) total += w;
    if (!(total > 0.0)) continue;
    double u = rng_.uniform() * total;
    int d = 0;
    for (; d + 1 < r; ++d) {
      if (u < scratch_[d]) break;
      u -= scratch_[d];
    }
    digits_[i] = d;
  }
}

double HeatBath::log_weight() const {
  double s = 0.0;
  for (const auto& f : model_->factors) s += std::log(f.table[f.indexer.index(digits_)]);
  return s;
}

double integrated_autocorrelation(std::span<const double> x, double window_factor) {
  const std::size_t n = x.size();
  if (n < 2) return 0.5;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  auto autocov = [&](std::size_t t) {
    double s = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) s += (x[i] - mean) * (x[i + t] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 0.5;
  double tau = 0.5;
  for (std::size_t M = 1; M < n; ++M) {
    tau += autocov(M) / c0;
    if (static_cast<double>(M) >= window_factor * tau) break;
  }
  return std::max(tau, 0.5);
}

BatchMeans batch_means(std::span<const double> x, int batches) {
  BatchMeans out;
  const std::size_t n = x.size();
  if (n == 0) return out;
  out.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const std::size_t size = n / static_cast<std::size_t>(batches);
  if (batches < 2 || size == 0) return out;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < size; ++i) means[b] += x[b * size + i];
    means[b] /= static_cast<double>(size);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(batches - 1);
  out.standard_error = std::sqrt(var / batches);
  out.batches = batches;
  return out;
}

}  // namespace rcb
