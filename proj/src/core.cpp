#include <algorithm>
#include <limits>
#include <string>

#include "rcb/error.hpp"
#include "rcb/parallel.hpp"
#include "rcb/product_space.hpp"

namespace rcb {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::AllForbidden: return "AllForbidden";
    case ErrorKind::ZeroSlice: return "ZeroSlice";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NonSymmetrizable: return "NonSymmetrizable";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {
std::atomic<int> g_threads{0};
}

int num_threads() {
  const int n = g_threads.load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_num_threads(int n) { g_threads.store(std::max(0, n)); }

ProductSpace::ProductSpace(std::vector<int> keys, std::vector<std::vector<int>> labels)
    : keys_(std::move(keys)), labels_(std::move(labels)) {
  require(keys_.size() == labels_.size(), "ProductSpace: keys/labels size mismatch");
  constexpr std::uint64_t limit = std::uint64_t{1} << 62;
  strides_.resize(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    require(!labels_[i].empty(), "ProductSpace: empty coordinate");
    strides_[i] = overflow_ ? 0 : size_;
    const auto r = static_cast<std::uint64_t>(labels_[i].size());
    if (!overflow_ && size_ > limit / r) overflow_ = true;
    if (!overflow_) size_ *= r;
  }
}

std::uint64_t ProductSpace::size() const {
  if (overflow_) fail(ErrorKind::TooLarge, "product space exceeds 2^62 points");
  return size_;
}

bool ProductSpace::fits(std::uint64_t max_states) const {
  return !overflow_ && size_ <= max_states;
}

int ProductSpace::digit_of(std::size_t i, int label) const {
  const auto& l = labels_[i];
  for (std::size_t d = 0; d < l.size(); ++d)
    if (l[d] == label) return static_cast<int>(d);
  return -1;
}

int ProductSpace::coordinate_of(int key) const {
  for (std::size_t i = 0; i < keys_.size(); ++i)
    if (keys_[i] == key) return static_cast<int>(i);
  return -1;
}

void ProductSpace::decode(std::uint64_t code, std::span<int> digits) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto r = static_cast<std::uint64_t>(labels_[i].size());
    digits[i] = static_cast<int>(code % r);
    code /= r;
  }
}

std::uint64_t ProductSpace::encode(std::span<const int> digits) const {
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    code += strides_[i] * static_cast<std::uint64_t>(digits[i]);
  return code;
}

std::vector<int> ProductSpace::labels_of(std::uint64_t code) const {
  std::vector<int> digits(dim());
  decode(code, digits);
  for (std::size_t i = 0; i < dim(); ++i) digits[i] = labels_[i][digits[i]];
  return digits;
}

bool ProductSpace::next(std::span<int> digits) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (++digits[i] < static_cast<int>(labels_[i].size())) return true;
    digits[i] = 0;
  }
  return false;
}

ProductSpace binary_space(std::vector<int> keys) {
  std::vector<std::vector<int>> labels(keys.size(), std::vector<int>{0, 1});
  return ProductSpace(std::move(keys), std::move(labels));
}

}  // namespace rcb
