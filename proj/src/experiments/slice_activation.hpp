#pragma once

#include <span>
#include <vector>

#include "rcb/gibbs.hpp"

namespace rcb::detail {

/// Activation probability of one factor in the overlap slice of a pair of
/// configurations (digits d1 of m1, d2 of m2). The slice factor is
/// w'(y) = f1(y) f2(sigma - y) on admissible local y, and its monotone
/// representation activates with probability 1 - min w' / w'(x1).
inline double slice_activation(const Factor<double>& f1, const Factor<double>& f2, const ProductSpace& s1,
                               const ProductSpace& s2, std::span<const int> d1, std::span<const int> d2) {
  const double wx = f1.table[f1.indexer.index(d1)] * f2.table[f2.indexer.index(d2)];
  if (wx <= 0.0) return 0.0;
  const auto& coords = f1.indexer.coords;
  const std::size_t k = coords.size();
  // admissible (own digit, mirrored digit) pairs per coordinate
  std::vector<std::vector<std::pair<int, int>>> opts(k);
  for (std::size_t j = 0; j < k; ++j) {
    const int c = coords[j];
    const int sigma = s1.label(c, d1[c]) + s2.label(c, d2[c]);
    for (int a = 0; a < s1.radix(c); ++a)
      for (int b = 0; b < s2.radix(c); ++b)
        if (s1.label(c, a) + s2.label(c, b) == sigma) opts[j].push_back({a, b});
  }
  std::vector<std::size_t> pos(k, 0);
  double wmin = wx;
  for (;;) {
    int l1 = 0, l2 = 0;
    for (std::size_t j = 0; j < k; ++j) {
      l1 += opts[j][pos[j]].first * f1.indexer.strides[j];
      l2 += opts[j][pos[j]].second * f2.indexer.strides[j];
    }
    wmin = std::min(wmin, f1.table[l1] * f2.table[l2]);
    std::size_t j = 0;
    for (; j < k; ++j) {
      if (++pos[j] < opts[j].size()) break;
      pos[j] = 0;
    }
    if (j == k) break;
  }
  return 1.0 - wmin / wx;
}

}  // namespace rcb::detail
