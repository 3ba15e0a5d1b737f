#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uncertainty/grid.hpp"
#include "uncertainty/numeric.hpp"
#include "uncertainty/observables.hpp"

namespace uncertainty {

/// Weight sums must equal one within this tolerance at both levels.
inline constexpr double kWeightSumTolerance = 1e-12;

struct ComponentSpec {
  WaveFunction state;
  std::optional<double> weight;  // rho_ij; may be omitted when counts are given
  int j_index = 0;               // 0 means "position + 1"
};

struct GroupSpec {
  std::vector<ComponentSpec> components;
  std::optional<double> weight;  // rho_i; may be omitted when counts are given
  int i_index = 0;
};

/// Occupation numbers N, N_i and N_ij. When supplied the weights are the
/// exact ratios rho_i = N_i / N and rho_ij = N_ij / N_i.
struct EnsembleCounts {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> group_totals;
  std::vector<std::vector<std::uint64_t>> component_counts;
};

struct EnsembleComponent {
  int i_index;
  int j_index;
  double weight;
  std::optional<Rational> exact_weight;
  std::optional<std::uint64_t> count;
  WaveFunction state;
  StateStats stats;
};

struct EnsembleGroup {
  int i_index;
  double weight;
  std::optional<Rational> exact_weight;
  std::optional<std::uint64_t> count;
  std::vector<EnsembleComponent> components;
};

/// Diagonal mixture rho = sum_i rho_i sum_j rho_ij |psi^ij><psi^ij|. The
/// operator itself is never formed; everything is computed from the weighted
/// component list.
class Ensemble {
 public:
  const std::vector<EnsembleGroup>& groups() const noexcept { return groups_; }
  const UnitSystem& units() const noexcept { return units_; }
  const Grid& grid() const noexcept { return groups_.front().components.front().state.grid(); }
  std::optional<std::uint64_t> total_count() const noexcept { return total_; }

  std::size_t component_count() const noexcept;

  /// rho_i rho_ij
  double flat_weight(std::size_t group, std::size_t component) const;
  /// rho_i rho_ij as an exact rational; present only when built from counts.
  std::optional<Rational> exact_flat_weight(std::size_t group, std::size_t component) const;

 private:
  friend Ensemble build_ensemble(std::vector<GroupSpec>, UnitSystem, std::optional<EnsembleCounts>);
  Ensemble(std::vector<EnsembleGroup> groups, UnitSystem units, std::optional<std::uint64_t> total)
      : groups_(std::move(groups)), units_(units), total_(total) {}

  std::vector<EnsembleGroup> groups_;
  UnitSystem units_;
  std::optional<std::uint64_t> total_;
};

/// Throws WeightSumError, GridMismatch, CountInconsistency, EmptyTermList.
Ensemble build_ensemble(std::vector<GroupSpec> groups, UnitSystem units, std::optional<EnsembleCounts> counts = {});

/// sum_i sum_j rho_i rho_ij <psi^ij|psi^ij>
double trace_density(const Ensemble& e);

/// sum_j rho_ij (dx_ij)^2 (dp_ij)^2 for the group at position `group`.
/// Throws IndexOutOfRange.
double group_product(const Ensemble& e, std::size_t group);

struct EnsembleMeans {
  double mean_x;
  double mean_p;
};

/// <x> = sum_i rho_i <x_i>, <p> likewise; group averages are formed first.
EnsembleMeans ensemble_means(const Ensemble& e);

/// sum_i rho_i group_product(e, i), classified against (hbar/2)^2.
EquilibriumVerdict ensemble_product(const Ensemble& e, double rel_tol = kDefaultClassifyTolerance);

/// Moments of the mixture distributions themselves (law of total variance).
/// Differs from ensemble_product() whenever component means differ.
StateStats mixed_state_moments(const Ensemble& e);

}  // namespace uncertainty
