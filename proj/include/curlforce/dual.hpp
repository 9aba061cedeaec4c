#pragma once

#include <cmath>

#include <Eigen/Core>

namespace curlforce {

/// Forward-mode dual number carrying up to four partial derivatives.
///
/// The partials vector has dynamic size bounded at compile time, so arithmetic
/// never touches the heap. All operands in one expression must share the same
/// number of partials.
template <typename Scalar>
struct Dual {
  using Partials = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

  Scalar value{0};
  Partials partials;

  Dual() = default;
  Dual(Scalar v, Partials d) : value(v), partials(std::move(d)) {}

  static Dual constant(Scalar v, Eigen::Index n) { return Dual(v, Partials::Zero(n)); }

  static Dual variable(Scalar v, Eigen::Index index, Eigen::Index n) {
    Partials d = Partials::Zero(n);
    d(index) = Scalar(1);
    return Dual(v, d);
  }

  Eigen::Index size() const { return partials.size(); }
  bool has_zero_partials() const { return (partials.array() == Scalar(0)).all(); }
};

using DualValue = Dual<double>;

template <typename S>
Dual<S> operator-(const Dual<S>& a) {
  return {-a.value, -a.partials};
}

template <typename S>
Dual<S> operator+(const Dual<S>& a, const Dual<S>& b) {
  return {a.value + b.value, a.partials + b.partials};
}

template <typename S>
Dual<S> operator-(const Dual<S>& a, const Dual<S>& b) {
  return {a.value - b.value, a.partials - b.partials};
}

template <typename S>
Dual<S> operator*(const Dual<S>& a, const Dual<S>& b) {
  return {a.value * b.value, b.value * a.partials + a.value * b.partials};
}

template <typename S>
Dual<S> operator/(const Dual<S>& a, const Dual<S>& b) {
  const S q = a.value / b.value;
  return {q, (a.partials - q * b.partials) / b.value};
}

template <typename S>
Dual<S> sin(const Dual<S>& a) {
  using std::cos, std::sin;
  return {sin(a.value), cos(a.value) * a.partials};
}

template <typename S>
Dual<S> cos(const Dual<S>& a) {
  using std::cos, std::sin;
  return {cos(a.value), -sin(a.value) * a.partials};
}

template <typename S>
Dual<S> tan(const Dual<S>& a) {
  using std::cos, std::tan;
  const S c = cos(a.value);
  return {tan(a.value), a.partials / (c * c)};
}

template <typename S>
Dual<S> exp(const Dual<S>& a) {
  using std::exp;
  const S e = exp(a.value);
  return {e, e * a.partials};
}

template <typename S>
Dual<S> log(const Dual<S>& a) {
  using std::log;
  return {log(a.value), a.partials / a.value};
}

template <typename S>
Dual<S> sqrt(const Dual<S>& a) {
  using std::sqrt;
  const S r = sqrt(a.value);
  return {r, a.partials / (S(2) * r)};
}

// Derivative at 0 taken as 0.
template <typename S>
Dual<S> abs(const Dual<S>& a) {
  using std::abs;
  const S sign = a.value > S(0) ? S(1) : (a.value < S(0) ? S(-1) : S(0));
  return {abs(a.value), sign * a.partials};
}

template <typename S>
Dual<S> pow(const Dual<S>& base, const Dual<S>& exponent) {
  using std::log, std::pow;
  const S v = pow(base.value, exponent.value);
  if (exponent.has_zero_partials()) {
    if (exponent.value == S(0)) return Dual<S>::constant(v, base.size());
    return {v, exponent.value * pow(base.value, exponent.value - S(1)) * base.partials};
  }
  return {v, v * (exponent.partials * log(base.value) +
                  exponent.value * base.partials / base.value)};
}

}  // namespace curlforce
