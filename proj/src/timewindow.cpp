#include "uncertainty/timewindow.hpp"

#include <cmath>
#include <numbers>

#include "uncertainty/error.hpp"
#include "uncertainty/fft.hpp"
#include "uncertainty/numeric.hpp"

namespace uncertainty {

namespace {

double kinetic_mass(const Potential& v) {
  return std::visit([](const auto& pot) { return pot.mass; }, v);
}

double potential_at(const Potential& v, std::size_t k, double x) {
  if (const auto* h = std::get_if<HarmonicPotential>(&v)) return 0.5 * h->mass * h->omega * h->omega * x * x;
  if (const auto* t = std::get_if<TabulatedPotential>(&v)) return t->values[k];
  return 0.0;
}

EnergyMoments clamp(EnergyMoments m) {
  if (std::abs(m.variance) <= kEnergyVarianceFloor) m.variance = 0.0;
  return m;
}

}  // namespace

std::vector<Complex> apply_hamiltonian(const WaveFunction& psi, const Potential& v, const UnitSystem& units) {
  const Grid& grid = psi.grid();
  const std::size_t n = grid.size();
  const double mass = kinetic_mass(v);
  if (!(mass > 0.0)) throw Error(ErrorCode::InvalidParameter, "kinetic mass must be positive");
  if (const auto* h = std::get_if<HarmonicPotential>(&v); h && !(h->omega > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "harmonic omega must be positive");
  }
  if (const auto* t = std::get_if<TabulatedPotential>(&v)) {
    if (t->values.size() != n) throw Error(ErrorCode::GridMismatch, "tabulated potential length differs from grid");
    for (double value : t->values) {
      if (!std::isfinite(value)) throw Error(ErrorCode::InvalidParameter, "tabulated potential has non-finite values");
    }
  }

  std::vector<Complex> kinetic(psi.amplitudes().begin(), psi.amplitudes().end());
  fft::transform(kinetic, fft::Direction::Forward);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid.dx());
  const double hbar = units.hbar();
  for (std::size_t m = 0; m < n; ++m) {
    const double p = hbar * dk * static_cast<double>(fft::signed_index(m, n));
    kinetic[m] *= p * p / (2.0 * mass);
  }
  fft::transform(kinetic, fft::Direction::Inverse);

  for (std::size_t k = 0; k < n; ++k) kinetic[k] += potential_at(v, k, grid.point(k)) * psi[k];
  return kinetic;
}

EnergyMoments energy_moments(const WaveFunction& psi, const Potential& v, const UnitSystem& units) {
  psi.require_boundary_decay();
  const std::vector<Complex> h_psi = apply_hamiltonian(psi, v, units);
  const double mean = inner_product(psi.amplitudes(), h_psi, psi.grid()).real();
  // <H^2> - <H>^2 evaluated as |(H - <H>) psi|^2, which cannot go negative
  std::vector<Complex> residual(h_psi.size());
  for (std::size_t k = 0; k < h_psi.size(); ++k) residual[k] = h_psi[k] - mean * psi[k];
  return clamp({mean, squared_norm(residual, psi.grid())});
}

EnergyMoments ensemble_energy_moments(const Ensemble& e, const Potential& v) {
  std::vector<double> weights;
  std::vector<EnergyMoments> parts;
  for (std::size_t g = 0; g < e.groups().size(); ++g) {
    const auto& components = e.groups()[g].components;
    for (std::size_t c = 0; c < components.size(); ++c) {
      weights.push_back(e.flat_weight(g, c));
      parts.push_back(energy_moments(components[c].state, v, e.units()));
    }
  }
  CompensatedSum mean;
  for (std::size_t k = 0; k < parts.size(); ++k) mean += weights[k] * parts[k].mean;
  CompensatedSum variance;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const double d = parts[k].mean - mean.value();
    variance += weights[k] * parts[k].variance;
    variance += weights[k] * d * d;
  }
  return clamp({mean.value(), variance.value()});
}

TimeWindow time_window(double delta_e, const UnitSystem& units) {
  if (!(delta_e >= 0.0)) throw Error(ErrorCode::NegativeSpread, "energy spread must be non-negative");
  if (delta_e == 0.0) return {0.0, std::nullopt};
  return {delta_e, units.hbar() / (2.0 * delta_e)};
}

}  // namespace uncertainty
