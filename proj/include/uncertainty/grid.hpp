#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace uncertainty {

using Complex = std::complex<double>;

/// Tolerance on sum |psi_k|^2 dx = 1.
inline constexpr double kNormalizationTolerance = 1e-10;
/// Edge amplitudes must fall below this fraction of the peak amplitude.
inline constexpr double kBoundaryDecayTolerance = 1e-10;

/// Uniform periodic grid on [x_min, x_max); x_max itself is not a sample.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n_points);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return dx_; }
  std::size_t size() const noexcept { return n_; }
  double length() const noexcept { return x_max_ - x_min_; }

  double point(std::size_t k) const noexcept { return x_min_ + static_cast<double>(k) * dx_; }
  std::vector<double> points() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

/// Throws NonPowerOfTwo or EmptyInterval.
Grid make_grid(double x_min, double x_max, std::size_t n_points);

/// Action unit. The uncertainty bound is (h / 4 pi)^2 = (hbar / 2)^2.
class UnitSystem {
 public:
  explicit UnitSystem(double hbar = 1.0);

  double hbar() const noexcept { return hbar_; }
  double h() const noexcept;
  double bound() const noexcept { return 0.25 * hbar_ * hbar_; }

  friend bool operator==(const UnitSystem&, const UnitSystem&) = default;

 private:
  double hbar_;
};

/// (i, j) pair identifying |psi^ij>: electron index i, configuration index j.
struct StateLabel {
  int i = 0;
  int j = 0;
  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

/// Normalized complex amplitudes sampled on a Grid.
class WaveFunction {
 public:
  /// Throws GridMismatch on length mismatch and NotNormalized when the
  /// amplitudes are not unit-norm within kNormalizationTolerance.
  WaveFunction(Grid grid, std::vector<Complex> amplitudes, std::optional<StateLabel> label = {});

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t k) const noexcept { return amplitudes_[k]; }
  std::size_t size() const noexcept { return amplitudes_.size(); }

  const std::optional<StateLabel>& label() const noexcept { return label_; }
  WaveFunction with_label(StateLabel label) const;

  /// max(|psi_0|, |psi_{n-1}|) <= tolerance * max_k |psi_k|
  bool decays_at_boundary(double tolerance = kBoundaryDecayTolerance) const noexcept;
  /// Throws BoundaryLeakage unless decays_at_boundary().
  void require_boundary_decay(double tolerance = kBoundaryDecayTolerance) const;

 private:
  Grid grid_;
  std::vector<Complex> amplitudes_;
  std::optional<StateLabel> label_;
};

/// sum_k |v_k|^2 dx
double squared_norm(std::span<const Complex> values, const Grid& grid);

/// raw / sqrt(sum |raw_k|^2 dx). Throws ZeroNorm, GridMismatch.
WaveFunction normalize(std::span<const Complex> raw, const Grid& grid);

/// sum_k conj(a_k) b_k dx. Throws GridMismatch.
Complex inner_product(const WaveFunction& a, const WaveFunction& b);
Complex inner_product(std::span<const Complex> a, std::span<const Complex> b, const Grid& grid);

}  // namespace uncertainty
