#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>

namespace uncertainty {

/// Neumaier-compensated accumulator. Grid sums and ensemble reductions go
/// through this so that the result does not depend on summation order
/// beyond a few ulps.
class CompensatedSum {
 public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      carry_ += (sum_ - t) + value;
    } else {
      carry_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) noexcept {
    add(value);
    return *this;
  }

  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class ComplexCompensatedSum {
 public:
  ComplexCompensatedSum& operator+=(std::complex<double> value) noexcept {
    re_.add(value.real());
    im_.add(value.imag());
    return *this;
  }

  std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// Exact non-negative ratio of counts, always stored in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::uint64_t numerator, std::uint64_t denominator) : num_(numerator), den_(denominator) {
    const std::uint64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::uint64_t numerator() const noexcept { return num_; }
  std::uint64_t denominator() const noexcept { return den_; }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator*(const Rational& a, const Rational& b) {
    // cross-cancel first so the products stay small
    const std::uint64_t g1 = std::gcd(a.num_, b.den_);
    const std::uint64_t g2 = std::gcd(b.num_, a.den_);
    const std::uint64_t an = g1 ? a.num_ / g1 : a.num_;
    const std::uint64_t bd = g1 ? b.den_ / g1 : b.den_;
    const std::uint64_t bn = g2 ? b.num_ / g2 : b.num_;
    const std::uint64_t ad = g2 ? a.den_ / g2 : a.den_;
    return Rational(an * bn, ad * bd);
  }

  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

}  // namespace uncertainty
