#include "rcb/two_copy.hpp"

#include <set>

namespace rcb {

std::vector<int> sum_values(std::span<const int> values) {
  std::set<int> sums;
  for (int a : values)
    for (int b : values) sums.insert(a + b);
  return {sums.begin(), sums.end()};
}

OverlapSlice make_slice(const Alphabet& alphabet, const Region& region,
                        const std::vector<std::vector<int>>& domains, std::vector<int> sigma) {
  require(sigma.size() == region.size(), "sigma must assign every region site");
  OverlapSlice s;
  const std::size_t n = region.size();
  s.admissible.resize(n);
  s.reflection.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& dom = domains.empty() ? std::vector<int>{} : domains[i];
    std::vector<int> allowed = dom;
    if (domains.empty())
      for (int k = 0; k < alphabet.size(); ++k) allowed.push_back(k);
    auto allowed_value = [&](int v) {
      const int k = alphabet.index_of(v);
      return k >= 0 && std::find(allowed.begin(), allowed.end(), k) != allowed.end();
    };
    for (int k : allowed)
      if (allowed_value(sigma[i] - alphabet.value(k))) s.admissible[i].push_back(k);
    if (s.admissible[i].empty())
      fail(ErrorKind::ZeroSlice, "sigma value " + std::to_string(sigma[i]) + " at vertex " +
                                     std::to_string(region[i]) + " is not a sum of two allowed spins");
    for (int k : s.admissible[i]) {
      const int image = alphabet.index_of(sigma[i] - alphabet.value(k));
      const auto& adm = s.admissible[i];
      s.reflection[i].push_back(static_cast<int>(std::find(adm.begin(), adm.end(), image) - adm.begin()));
    }
    (s.admissible[i].size() == 1 ? s.overlap_region : s.nonoverlap_region).push_back(region[i]);
  }
  s.sigma = std::move(sigma);
  return s;
}

ProductSpace slice_space(const Alphabet& alphabet, const Region& region, const OverlapSlice& s) {
  std::vector<std::vector<int>> labels(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int k : s.admissible[i]) labels[i].push_back(alphabet.value(k));
  return ProductSpace(std::vector<int>(region.begin(), region.end()), std::move(labels));
}

}  // namespace rcb
