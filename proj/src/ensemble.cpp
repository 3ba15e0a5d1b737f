#include "uncertainty/ensemble.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "uncertainty/error.hpp"

namespace uncertainty {

namespace {

void check_unit_sum(const CompensatedSum& sum, const std::string& what) {
  if (!(std::abs(sum.value() - 1.0) <= kWeightSumTolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " sum to " << sum.value() << ", expected 1";
    throw Error(ErrorCode::WeightSumError, msg.str());
  }
}

void check_weight_range(double w, const std::string& what) {
  if (!(w > 0.0 && w <= 1.0)) throw Error(ErrorCode::WeightSumError, what + " must lie in (0, 1]");
}

// A weight given alongside counts must agree with the count ratio.
double reconcile(const std::optional<double>& given, const Rational& exact, const std::string& what) {
  const double derived = exact.to_double();
  if (given && !(std::abs(*given - derived) <= kWeightSumTolerance)) {
    throw Error(ErrorCode::CountInconsistency, what + " disagrees with the supplied counts");
  }
  return derived;
}

}  // namespace

std::size_t Ensemble::component_count() const noexcept {
  std::size_t total = 0;
  for (const auto& g : groups_) total += g.components.size();
  return total;
}

double Ensemble::flat_weight(std::size_t group, std::size_t component) const {
  const EnsembleGroup& g = groups_.at(group);
  const EnsembleComponent& c = g.components.at(component);
  if (g.exact_weight && c.exact_weight) return (*g.exact_weight * *c.exact_weight).to_double();
  return g.weight * c.weight;
}

std::optional<Rational> Ensemble::exact_flat_weight(std::size_t group, std::size_t component) const {
  const EnsembleGroup& g = groups_.at(group);
  const EnsembleComponent& c = g.components.at(component);
  if (g.exact_weight && c.exact_weight) return *g.exact_weight * *c.exact_weight;
  return std::nullopt;
}

Ensemble build_ensemble(std::vector<GroupSpec> specs, UnitSystem units, std::optional<EnsembleCounts> counts) {
  if (specs.empty()) throw Error(ErrorCode::EmptyTermList, "ensemble needs at least one group");

  if (counts) {
    if (counts->group_totals.size() != specs.size() || counts->component_counts.size() != specs.size()) {
      throw Error(ErrorCode::CountInconsistency, "count lists do not match the group structure");
    }
    std::uint64_t total = 0;
    for (std::size_t g = 0; g < specs.size(); ++g) {
      if (counts->component_counts[g].size() != specs[g].components.size()) {
        throw Error(ErrorCode::CountInconsistency,
                    "group " + std::to_string(g + 1) + ": component counts do not match components");
      }
      std::uint64_t group_total = 0;
      for (std::uint64_t n : counts->component_counts[g]) {
        if (n == 0) throw Error(ErrorCode::CountInconsistency, "component counts must be positive");
        group_total += n;
      }
      if (group_total != counts->group_totals[g]) {
        throw Error(ErrorCode::CountInconsistency,
                    "group " + std::to_string(g + 1) + ": N_i differs from the sum of its N_ij");
      }
      total += group_total;
    }
    if (total != counts->total) throw Error(ErrorCode::CountInconsistency, "N differs from the sum of N_i");
  }

  if (specs.front().components.empty()) throw Error(ErrorCode::EmptyTermList, "group 1 is empty");
  const Grid grid = specs.front().components.front().state.grid();

  std::vector<EnsembleGroup> groups;
  groups.reserve(specs.size());
  CompensatedSum group_sum;
  for (std::size_t g = 0; g < specs.size(); ++g) {
    GroupSpec& spec = specs[g];
    const std::string group_name = "group " + std::to_string(g + 1);
    if (spec.components.empty()) throw Error(ErrorCode::EmptyTermList, group_name + " is empty");

    EnsembleGroup group{spec.i_index > 0 ? spec.i_index : static_cast<int>(g + 1), 0.0, std::nullopt, std::nullopt, {}};
    if (counts) {
      group.exact_weight = Rational(counts->group_totals[g], counts->total);
      group.count = counts->group_totals[g];
      group.weight = reconcile(spec.weight, *group.exact_weight, group_name + " weight");
    } else {
      if (!spec.weight) throw Error(ErrorCode::WeightSumError, group_name + " has no weight");
      group.weight = *spec.weight;
    }
    check_weight_range(group.weight, group_name + " weight");
    group_sum += group.weight;

    CompensatedSum component_sum;
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
      ComponentSpec& cs = spec.components[c];
      const std::string component_name = group_name + " component " + std::to_string(c + 1);
      if (!(cs.state.grid() == grid)) throw Error(ErrorCode::GridMismatch, component_name + " uses a different grid");

      std::optional<Rational> exact;
      std::optional<std::uint64_t> count;
      double weight = 0.0;
      if (counts) {
        count = counts->component_counts[g][c];
        exact = Rational(*count, counts->group_totals[g]);
        weight = reconcile(cs.weight, *exact, component_name + " weight");
      } else {
        if (!cs.weight) throw Error(ErrorCode::WeightSumError, component_name + " has no weight");
        weight = *cs.weight;
      }
      check_weight_range(weight, component_name + " weight");
      component_sum += weight;

      const int j_index = cs.j_index > 0 ? cs.j_index : static_cast<int>(c + 1);
      WaveFunction state = cs.state.with_label({group.i_index, j_index});
      StateStats stats = uncertainty_product(state, units);
      group.components.push_back({group.i_index, j_index, weight, exact, count, std::move(state), stats});
    }
    check_unit_sum(component_sum, group_name + " component weights");
    groups.push_back(std::move(group));
  }
  check_unit_sum(group_sum, "group weights");

  return Ensemble(std::move(groups), units, counts ? std::optional<std::uint64_t>(counts->total) : std::nullopt);
}

double trace_density(const Ensemble& e) {
  CompensatedSum trace;
  for (std::size_t g = 0; g < e.groups().size(); ++g) {
    const auto& components = e.groups()[g].components;
    for (std::size_t c = 0; c < components.size(); ++c) {
      trace += e.flat_weight(g, c) * inner_product(components[c].state, components[c].state).real();
    }
  }
  return trace.value();
}

double group_product(const Ensemble& e, std::size_t group) {
  if (group >= e.groups().size()) {
    throw Error(ErrorCode::IndexOutOfRange, "group index " + std::to_string(group) + " out of range");
  }
  CompensatedSum sum;
  for (const auto& c : e.groups()[group].components) sum += c.weight * c.stats.product;
  return sum.value();
}

EnsembleMeans ensemble_means(const Ensemble& e) {
  CompensatedSum mean_x;
  CompensatedSum mean_p;
  for (const auto& g : e.groups()) {
    CompensatedSum group_x;
    CompensatedSum group_p;
    for (const auto& c : g.components) {
      group_x += c.weight * c.stats.mean_x;
      group_p += c.weight * c.stats.mean_p;
    }
    mean_x += g.weight * group_x.value();
    mean_p += g.weight * group_p.value();
  }
  return {mean_x.value(), mean_p.value()};
}

EquilibriumVerdict ensemble_product(const Ensemble& e, double rel_tol) {
  CompensatedSum sum;
  for (std::size_t g = 0; g < e.groups().size(); ++g) sum += e.groups()[g].weight * group_product(e, g);
  return classify(sum.value(), e.units(), rel_tol);
}

StateStats mixed_state_moments(const Ensemble& e) {
  CompensatedSum mean_x;
  CompensatedSum mean_p;
  for (std::size_t g = 0; g < e.groups().size(); ++g) {
    const auto& components = e.groups()[g].components;
    for (std::size_t c = 0; c < components.size(); ++c) {
      const double w = e.flat_weight(g, c);
      mean_x += w * components[c].stats.mean_x;
      mean_p += w * components[c].stats.mean_p;
    }
  }
  const double mx = mean_x.value();
  const double mp = mean_p.value();

  CompensatedSum var_x;
  CompensatedSum var_p;
  for (std::size_t g = 0; g < e.groups().size(); ++g) {
    const auto& components = e.groups()[g].components;
    for (std::size_t c = 0; c < components.size(); ++c) {
      const double w = e.flat_weight(g, c);
      const StateStats& s = components[c].stats;
      const double dx = s.mean_x - mx;
      const double dp = s.mean_p - mp;
      var_x += w * s.var_x;
      var_x += w * dx * dx;
      var_p += w * s.var_p;
      var_p += w * dp * dp;
    }
  }
  return {mx, var_x.value(), mp, var_p.value(), var_x.value() * var_p.value()};
}

}  // namespace uncertainty
