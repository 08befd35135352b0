#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rcb {

/// Finite product of per-coordinate label lists, enumerated in mixed radix with
/// coordinate 0 as the least significant digit. A digit is an index into that
/// coordinate's label list. `keys` tag coordinates with an external id (vertex,
/// bond, ...).
class ProductSpace {
 public:
  ProductSpace() = default;
  ProductSpace(std::vector<int> keys, std::vector<std::vector<int>> labels);

  std::size_t dim() const { return labels_.size(); }
  int radix(std::size_t i) const { return static_cast<int>(labels_[i].size()); }

  /// Number of points; throws TooLarge when it does not fit in 62 bits.
  std::uint64_t size() const;
  bool fits(std::uint64_t max_states) const;

  const std::vector<int>& keys() const { return keys_; }
  const std::vector<int>& labels(std::size_t i) const { return labels_[i]; }
  int label(std::size_t i, int digit) const { return labels_[i][digit]; }
  /// Digit carrying `label` at coordinate i, or -1.
  int digit_of(std::size_t i, int label) const;
  /// Coordinate tagged with `key`, or -1.
  int coordinate_of(int key) const;

  std::uint64_t stride(std::size_t i) const { return strides_[i]; }
  void decode(std::uint64_t code, std::span<int> digits) const;
  std::uint64_t encode(std::span<const int> digits) const;
  std::vector<int> labels_of(std::uint64_t code) const;

  /// Odometer increment; returns false after wrapping past the last point.
  bool next(std::span<int> digits) const;

  friend bool operator==(const ProductSpace&, const ProductSpace&) = default;

 private:
  std::vector<int> keys_;
  std::vector<std::vector<int>> labels_;
  std::vector<std::uint64_t> strides_;
  bool overflow_ = false;
  std::uint64_t size_ = 1;
};

/// Product of `n` binary coordinates labelled {0, 1}; codes are bitmasks.
ProductSpace binary_space(std::vector<int> keys);

}  // namespace rcb
