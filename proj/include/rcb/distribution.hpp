#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rcb/error.hpp"
#include "rcb/parallel.hpp"
#include "rcb/product_space.hpp"
#include "rcb/scalar.hpp"

namespace rcb {

/// Dense probability table over a ProductSpace, indexed by mixed-radix code.
/// Carries every measure in the library: spin laws, overlap laws, hyperbond
/// laws and activity-pattern laws.
template <class Scalar>
class FiniteDistribution {
 public:
  FiniteDistribution() = default;
  FiniteDistribution(ProductSpace space, VectorX<Scalar> weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    require(static_cast<std::uint64_t>(weights_.size()) == space_.size(),
            "FiniteDistribution: weight count does not match the space");
  }

  /// Normalizes nonnegative weights; zero total mass throws AllForbidden.
  static FiniteDistribution normalized(ProductSpace space, VectorX<Scalar> weights) {
    const Scalar total = weights.sum();
    if (!(total > Scalar(0)))
      fail(ErrorKind::AllForbidden, "every configuration has zero weight");
    weights /= total;
    return FiniteDistribution(std::move(space), std::move(weights));
  }

  const ProductSpace& space() const { return space_; }
  const VectorX<Scalar>& weights() const { return weights_; }
  std::uint64_t size() const { return static_cast<std::uint64_t>(weights_.size()); }
  const Scalar& operator[](std::uint64_t code) const { return weights_[static_cast<Eigen::Index>(code)]; }
  Scalar total() const { return weights_.sum(); }

 private:
  ProductSpace space_;
  VectorX<Scalar> weights_;
};

/// Visits (labels, weight) for every point of positive weight.
template <class Scalar, class Fn>
void for_each_point(const FiniteDistribution<Scalar>& d, Fn&& fn) {
  const auto& space = d.space();
  std::vector<int> digits(space.dim(), 0);
  std::vector<int> labels(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) labels[i] = space.label(i, 0);
  for (std::uint64_t code = 0; code < d.size(); ++code) {
    if (d[code] != Scalar(0)) fn(std::span<const int>(labels), d[code]);
    for (std::size_t i = 0; i < space.dim(); ++i) {
      if (++digits[i] < space.radix(i)) {
        labels[i] = space.label(i, digits[i]);
        break;
      }
      digits[i] = 0;
      labels[i] = space.label(i, 0);
    }
  }
}

/// Sum of X(labels) * weight. X receives the label of every coordinate.
template <class Scalar, class Observable>
Scalar expectation(const FiniteDistribution<Scalar>& d, Observable&& X) {
  Scalar acc(0);
  for_each_point(d, [&](std::span<const int> labels, const Scalar& w) {
    acc += Scalar(X(labels)) * w;
  });
  return acc;
}

template <class Scalar, class Event>
Scalar probability(const FiniteDistribution<Scalar>& d, Event&& event) {
  Scalar acc(0);
  for_each_point(d, [&](std::span<const int> labels, const Scalar& w) {
    if (event(labels)) acc += w;
  });
  return acc;
}

template <class Scalar, class X, class Y>
Scalar covariance(const FiniteDistribution<Scalar>& d, X&& x, Y&& y) {
  Scalar ex(0), ey(0), exy(0);
  for_each_point(d, [&](std::span<const int> labels, const Scalar& w) {
    const Scalar vx(x(labels));
    const Scalar vy(y(labels));
    ex += vx * w;
    ey += vy * w;
    exy += vx * vy * w;
  });
  return exy - ex * ey;
}

template <class Scalar>
double max_abs_difference(const FiniteDistribution<Scalar>& a, const FiniteDistribution<Scalar>& b) {
  require(a.size() == b.size(), "max_abs_difference: size mismatch");
  double worst = 0.0;
  for (std::uint64_t c = 0; c < a.size(); ++c)
    worst = std::max(worst, std::abs(to_double(Scalar(a[c] - b[c]))));
  return worst;
}

}  // namespace rcb
