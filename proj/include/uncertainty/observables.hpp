#pragma once

#include <string_view>
#include <vector>

#include "uncertainty/grid.hpp"

namespace uncertainty {

/// Default relative tolerance for deciding equality with the bound.
inline constexpr double kDefaultClassifyTolerance = 1e-6;
/// uncertainty_product() rejects products below bound * (1 - this).
inline constexpr double kBoundSlack = 1e-9;

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

struct StateStats {
  double mean_x = 0.0;
  double var_x = 0.0;
  double mean_p = 0.0;
  double var_p = 0.0;
  double product = 0.0;
};

enum class Classification { Equilibrium, NonEquilibrium };

std::string_view to_string(Classification c) noexcept;

struct EquilibriumVerdict {
  Classification classification = Classification::Equilibrium;
  double product = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // product - bound
};

/// Momentum-space density on the signed-frequency grid p_m = 2 pi hbar m / (n dx),
/// scaled so that sum_m density_m dp = sum_k |psi_k|^2 dx. Bins are in FFT order.
struct MomentumDensity {
  std::vector<double> momenta;
  std::vector<double> density;
  double dp = 0.0;
};

MomentumDensity momentum_density(const WaveFunction& psi, const UnitSystem& units);

/// <x> and <(x - <x>)^2> from |psi_k|^2 dx.
Moments position_moments(const WaveFunction& psi);

/// Moments of |psi~(p)|^2 computed spectrally. Throws BoundaryLeakage.
Moments momentum_moments(const WaveFunction& psi, const UnitSystem& units);

/// Both moment pairs and their product. Throws BoundViolation when the product
/// falls below (hbar/2)^2 (1 - kBoundSlack), which means the grid cannot
/// resolve the state.
StateStats uncertainty_product(const WaveFunction& psi, const UnitSystem& units);

/// Equality with (hbar/2)^2 within rel_tol classifies Equilibrium, a larger
/// product classifies NonEquilibrium, and a smaller one throws BoundViolation.
EquilibriumVerdict classify(double product, const UnitSystem& units, double rel_tol = kDefaultClassifyTolerance);

}  // namespace uncertainty
