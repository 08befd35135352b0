#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcb/gibbs.hpp"
#include "rcb/rng.hpp"

namespace rcb {

/// Single-site heat-bath chain over a compiled model: each update redraws one
/// site from its conditional law given the others, sites visited in order.
class HeatBath {
 public:
  HeatBath(const CompiledModel<double>& model, Philox4x32 rng);

  void sweep();
  void sweeps(int n) {
    for (int i = 0; i < n; ++i) sweep();
  }
  /// Independent uniform start over each site's domain.
  void randomize();

  std::span<const int> digits() const { return digits_; }
  int value(std::size_t site) const { return model_->space.label(site, digits_[site]); }
  Philox4x32& rng() { return rng_; }
  const CompiledModel<double>& model() const { return *model_; }
  /// Sum of log-factors of the current state (the +phi energy).
  double log_weight() const;

 private:
  const CompiledModel<double>* model_;
  Philox4x32 rng_;
  std::vector<int> digits_;
  std::vector<double> scratch_;
};

/// Integrated autocorrelation time with Sokal's automatic window (smallest M
/// with M >= c * tau(M)). Returns 0.5 for an uncorrelated or constant series.
double integrated_autocorrelation(std::span<const double> series, double window_factor = 6.0);

struct BatchMeans {
  double mean = 0.0;
  double standard_error = 0.0;
  int batches = 0;
};

/// Mean and standard error from non-overlapping batch means.
BatchMeans batch_means(std::span<const double> series, int batches = 32);

}  // namespace rcb
