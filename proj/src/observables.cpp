#include "uncertainty/observables.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "uncertainty/error.hpp"
#include "uncertainty/fft.hpp"
#include "uncertainty/numeric.hpp"

namespace uncertainty {

std::string_view to_string(Classification c) noexcept {
  return c == Classification::Equilibrium ? "equilibrium" : "non-equilibrium";
}

namespace {

Moments weighted_moments(std::span<const double> values, std::span<const double> weights) {
  CompensatedSum total;
  CompensatedSum first;
  for (std::size_t k = 0; k < values.size(); ++k) {
    total += weights[k];
    first += values[k] * weights[k];
  }
  const double mean = first.value() / total.value();
  CompensatedSum second;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double d = values[k] - mean;
    second += d * d * weights[k];
  }
  return {mean, second.value() / total.value()};
}

}  // namespace

MomentumDensity momentum_density(const WaveFunction& psi, const UnitSystem& units) {
  const Grid& grid = psi.grid();
  const std::size_t n = grid.size();
  std::vector<Complex> spectrum(psi.amplitudes().begin(), psi.amplitudes().end());
  fft::transform(spectrum, fft::Direction::Forward);

  MomentumDensity out;
  out.dp = 2.0 * std::numbers::pi * units.hbar() / (static_cast<double>(n) * grid.dx());
  out.momenta.resize(n);
  out.density.resize(n);
  // |psi~|^2 = dx^2 / (2 pi hbar) |DFT|^2 ; the phase from x_min drops out.
  const double scale = grid.dx() * grid.dx() / (2.0 * std::numbers::pi * units.hbar());
  for (std::size_t m = 0; m < n; ++m) {
    out.momenta[m] = out.dp * static_cast<double>(fft::signed_index(m, n));
    out.density[m] = scale * std::norm(spectrum[m]);
  }
  return out;
}

Moments position_moments(const WaveFunction& psi) {
  const Grid& grid = psi.grid();
  std::vector<double> xs = grid.points();
  std::vector<double> weights(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) weights[k] = std::norm(psi[k]);
  return weighted_moments(xs, weights);
}

Moments momentum_moments(const WaveFunction& psi, const UnitSystem& units) {
  psi.require_boundary_decay();
  const MomentumDensity md = momentum_density(psi, units);
  return weighted_moments(md.momenta, md.density);
}

StateStats uncertainty_product(const WaveFunction& psi, const UnitSystem& units) {
  const Moments x = position_moments(psi);
  const Moments p = momentum_moments(psi, units);
  StateStats stats{x.mean, x.variance, p.mean, p.variance, x.variance * p.variance};
  if (stats.product < units.bound() * (1.0 - kBoundSlack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "uncertainty product " << stats.product << " below bound " << units.bound()
        << "; grid too coarse or too narrow for this state";
    throw Error(ErrorCode::BoundViolation, msg.str());
  }
  return stats;
}

EquilibriumVerdict classify(double product, const UnitSystem& units, double rel_tol) {
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "rel_tol must be positive");
  const double bound = units.bound();
  if (!(product >= (1.0 - rel_tol) * bound)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "product " << product << " lies below the uncertainty bound " << bound;
    throw Error(ErrorCode::BoundViolation, msg.str());
  }
  const Classification c =
      std::abs(product - bound) <= rel_tol * bound ? Classification::Equilibrium : Classification::NonEquilibrium;
  return {c, product, bound, product - bound};
}

}  // namespace uncertainty
