#pragma once

#include <cmath>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace rcb {

/// Exact backing for weights of the form e^{k J} with e^J rational.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
inline constexpr bool is_exact_v = !std::is_floating_point_v<Scalar>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <class Scalar>
Scalar abs_value(const Scalar& x) {
  return x < Scalar(0) ? Scalar(-x) : x;
}

/// base^k for integer k (negative k allowed when base != 0).
template <class Scalar>
Scalar ipow(const Scalar& base, int k) {
  Scalar result(1);
  Scalar factor = k < 0 ? Scalar(Scalar(1) / base) : base;
  for (int n = k < 0 ? -k : k; n > 0; --n) result *= factor;
  return result;
}

/// Equality for rationals, |a - b| <= tol for floats.
template <class Scalar>
bool near(const Scalar& a, const Scalar& b, double tol) {
  if constexpr (is_exact_v<Scalar>) {
    return a == b;
  } else {
    return std::abs(a - b) <= tol;
  }
}

inline const char* backing_name(double) { return "float"; }
inline const char* backing_name(const Rational&) { return "rational"; }

}  // namespace rcb
