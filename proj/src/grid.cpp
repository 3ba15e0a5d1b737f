#include "uncertainty/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "uncertainty/error.hpp"
#include "uncertainty/numeric.hpp"

namespace uncertainty {

namespace {

constexpr std::size_t kMinPoints = 8;

}  // namespace

Grid::Grid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), dx_(0.0) {
  if (n_points < kMinPoints || !std::has_single_bit(n_points)) {
    throw Error(ErrorCode::NonPowerOfTwo,
                "n_points must be a power of two >= 8, got " + std::to_string(n_points));
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw Error(ErrorCode::EmptyInterval, "grid requires x_max > x_min");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n_points);
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(n_);
  for (std::size_t k = 0; k < n_; ++k) xs[k] = point(k);
  return xs;
}

Grid make_grid(double x_min, double x_max, std::size_t n_points) { return Grid(x_min, x_max, n_points); }

UnitSystem::UnitSystem(double hbar) : hbar_(hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error(ErrorCode::InvalidParameter, "hbar must be positive");
}

double UnitSystem::h() const noexcept { return 2.0 * std::numbers::pi * hbar_; }

double squared_norm(std::span<const Complex> values, const Grid& grid) {
  CompensatedSum sum;
  for (const auto& v : values) sum += std::norm(v);
  return sum.value() * grid.dx();
}

WaveFunction::WaveFunction(Grid grid, std::vector<Complex> amplitudes, std::optional<StateLabel> label)
    : grid_(grid), amplitudes_(std::move(amplitudes)), label_(label) {
  if (amplitudes_.size() != grid_.size()) {
    throw Error(ErrorCode::GridMismatch, "amplitude count " + std::to_string(amplitudes_.size()) +
                                             " does not match grid size " + std::to_string(grid_.size()));
  }
  const double norm = squared_norm(amplitudes_, grid_);
  if (!(std::abs(norm - 1.0) <= kNormalizationTolerance)) {
    throw Error(ErrorCode::NotNormalized, "squared norm deviates from 1");
  }
}

WaveFunction WaveFunction::with_label(StateLabel label) const {
  WaveFunction copy = *this;
  copy.label_ = label;
  return copy;
}

bool WaveFunction::decays_at_boundary(double tolerance) const noexcept {
  double peak = 0.0;
  for (const auto& v : amplitudes_) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(amplitudes_.front()), std::abs(amplitudes_.back()));
  return edge <= tolerance * peak;
}

void WaveFunction::require_boundary_decay(double tolerance) const {
  if (!decays_at_boundary(tolerance)) {
    throw Error(ErrorCode::BoundaryLeakage, "state does not decay at the grid boundary");
  }
}

WaveFunction normalize(std::span<const Complex> raw, const Grid& grid) {
  if (raw.size() != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "raw amplitude count does not match grid size");
  }
  const double norm = squared_norm(raw, grid);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorCode::ZeroNorm, "cannot normalize a zero vector");
  const double scale = 1.0 / std::sqrt(norm);
  std::vector<Complex> amplitudes(raw.begin(), raw.end());
  for (auto& v : amplitudes) v *= scale;
  return WaveFunction(grid, std::move(amplitudes));
}

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b, const Grid& grid) {
  if (a.size() != grid.size() || b.size() != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "inner product operands differ in length");
  }
  ComplexCompensatedSum sum;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::conj(a[k]) * b[k];
  return sum.value() * grid.dx();
}

Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "inner product across different grids");
  return inner_product(a.amplitudes(), b.amplitudes(), a.grid());
}

}  // namespace uncertainty
