#pragma once

#include <complex>
#include <span>

namespace uncertainty::fft {

enum class Direction { Forward, Inverse };

/// In-place iterative radix-2 transform.
///   Forward:  X_m = sum_k x_k exp(-2 pi i m k / n)
///   Inverse:  x_k = (1/n) sum_m X_m exp(+2 pi i m k / n)
/// The length must be a power of two.
void transform(std::span<std::complex<double>> data, Direction direction);

/// Signed frequency index of bin m for an n-point transform: m for m < n/2,
/// m - n otherwise.
inline long signed_index(std::size_t m, std::size_t n) noexcept {
  return m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

}  // namespace uncertainty::fft
