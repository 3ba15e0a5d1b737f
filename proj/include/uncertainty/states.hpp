#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "uncertainty/grid.hpp"

namespace uncertainty {

struct GaussianPacket {
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma = 1.0;
  friend bool operator==(const GaussianPacket&, const GaussianPacket&) = default;
};

struct HarmonicEigenstate {
  int n = 0;
  double mass = 1.0;
  double omega = 1.0;
  friend bool operator==(const HarmonicEigenstate&, const HarmonicEigenstate&) = default;
};

struct StateRecipe;

struct Superposition {
  std::vector<Complex> coefficients;
  std::vector<StateRecipe> terms;
  friend bool operator==(const Superposition&, const Superposition&);
};

/// Serializable description of a single-particle state. Materialized onto a
/// grid by build_state().
struct StateRecipe {
  std::variant<GaussianPacket, HarmonicEigenstate, Superposition> variant;
  friend bool operator==(const StateRecipe&, const StateRecipe&) = default;
};

/// psi(x) ~ exp(-(x-x0)^2 / (4 sigma^2)) exp(i p0 x / hbar), so that
/// <x> = x0, <p> = p0, var_x = sigma^2 and var_p = hbar^2 / (4 sigma^2).
/// Throws NonPositiveSigma, BoundaryLeakage.
WaveFunction gaussian_packet(double x0, double p0, double sigma, const Grid& grid, const UnitSystem& units);

/// Samples of the n-th normalized Hermite function h_n(xi) with
/// xi = sqrt(m omega / hbar) x. h_n is generated by the normalized three-term
/// recurrence
///   h_0 = pi^{-1/4} exp(-xi^2/2)
///   h_{k+1} = sqrt(2/(k+1)) xi h_k - sqrt(k/(k+1)) h_{k-1}
/// which never forms H_n or n! explicitly.
/// Throws NegativeQuantumNumber, InvalidParameter, BoundaryLeakage.
WaveFunction ho_eigenstate(int n, double mass, double omega, const Grid& grid, const UnitSystem& units);

/// Normalized sum_k c_k |psi_k>. Throws EmptyTermList, GridMismatch, ZeroNorm.
WaveFunction superpose(std::span<const std::pair<Complex, WaveFunction>> terms);

WaveFunction build_state(const StateRecipe& recipe, const Grid& grid, const UnitSystem& units);

}  // namespace uncertainty
