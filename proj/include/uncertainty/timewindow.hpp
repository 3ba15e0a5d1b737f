#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "uncertainty/ensemble.hpp"
#include "uncertainty/grid.hpp"

namespace uncertainty {

struct HarmonicPotential {
  double mass = 1.0;
  double omega = 1.0;
  friend bool operator==(const HarmonicPotential&, const HarmonicPotential&) = default;
};

struct FreeParticle {
  double mass = 1.0;
  friend bool operator==(const FreeParticle&, const FreeParticle&) = default;
};

struct TabulatedPotential {
  std::vector<double> values;  // V(x_k), one per grid point
  double mass = 1.0;
  friend bool operator==(const TabulatedPotential&, const TabulatedPotential&) = default;
};

/// H = p^2 / (2 m) + V(x). The kinetic mass travels with the potential.
using Potential = std::variant<HarmonicPotential, FreeParticle, TabulatedPotential>;

/// Variances this close to zero are reported as exactly zero.
inline constexpr double kEnergyVarianceFloor = 1e-12;

struct EnergyMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// H|psi> with the kinetic term applied in momentum space and V pointwise.
/// Throws InvalidParameter, GridMismatch.
std::vector<Complex> apply_hamiltonian(const WaveFunction& psi, const Potential& v, const UnitSystem& units);

/// <H> and <H^2> - <H>^2 from a single application of H. Throws
/// BoundaryLeakage, GridMismatch.
EnergyMoments energy_moments(const WaveFunction& psi, const Potential& v, const UnitSystem& units);

/// Flat-weighted total energy variance of a mixture:
/// sum_c w_c var_c + sum_c w_c (mean_c - mean)^2.
EnergyMoments ensemble_energy_moments(const Ensemble& e, const Potential& v);

struct TimeWindow {
  double delta_e = 0.0;
  std::optional<double> delta_t;  // empty means unbounded (delta_e == 0)
  bool unbounded() const noexcept { return !delta_t.has_value(); }
};

/// delta_t = h / (4 pi delta_e) = hbar / (2 delta_e). Throws NegativeSpread.
TimeWindow time_window(double delta_e, const UnitSystem& units);

}  // namespace uncertainty
