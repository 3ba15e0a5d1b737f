#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uncertainty/fluctuations.hpp"
#include "uncertainty/states.hpp"
#include "uncertainty/timewindow.hpp"

namespace uncertainty {

enum class OutputFormat { Csv, JsonLines };

std::string_view to_string(OutputFormat f) noexcept;

struct GridSpec {
  double x_min = -12.0;
  double x_max = 12.0;
  std::size_t n_points = 2048;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// A named state. For superpositions `term_names` keeps the referenced state
/// names so the declaration can be written back out; `recipe` holds the
/// resolved tree.
struct StateDecl {
  std::string name;
  StateRecipe recipe;
  std::vector<std::string> term_names;
  friend bool operator==(const StateDecl&, const StateDecl&) = default;
};

struct GroupDecl {
  std::optional<double> weight;
  std::vector<std::string> states;
  std::vector<double> weights;         // empty when counts carry the weights
  std::vector<std::uint64_t> counts;   // empty when weights are explicit
  friend bool operator==(const GroupDecl&, const GroupDecl&) = default;
};

struct EnsembleDecl {
  std::string name;
  std::vector<GroupDecl> groups;
  std::optional<std::uint64_t> total;
  friend bool operator==(const EnsembleDecl&, const EnsembleDecl&) = default;
};

struct StatsTask {
  std::string state;
  friend bool operator==(const StatsTask&, const StatsTask&) = default;
};

struct ClassifyTask {
  std::string target;  // state or ensemble
  double rel_tol = kDefaultClassifyTolerance;
  friend bool operator==(const ClassifyTask&, const ClassifyTask&) = default;
};

struct FluctuationSampleTask {
  std::string source;  // state
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> samples_path;
  friend bool operator==(const FluctuationSampleTask&, const FluctuationSampleTask&) = default;
};

struct CltStudyTask {
  MicroDistribution micro = UniformMicro{-1.0, 1.0};
  std::vector<int> m_list;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const CltStudyTask&, const CltStudyTask&) = default;
};

struct TimeWindowTask {
  std::string target;  // state or ensemble
  Potential potential = HarmonicPotential{};
  friend bool operator==(const TimeWindowTask&, const TimeWindowTask&) = default;
};

using TaskKind = std::variant<StatsTask, ClassifyTask, FluctuationSampleTask, CltStudyTask, TimeWindowTask>;

struct TaskDecl {
  std::string id;
  TaskKind task;
  friend bool operator==(const TaskDecl&, const TaskDecl&) = default;
};

std::string_view task_kind_name(const TaskKind& task) noexcept;
bool is_stochastic(const TaskKind& task) noexcept;

struct Scenario {
  std::string name = "scenario";
  OutputFormat format = OutputFormat::Csv;
  GridSpec grid;
  double hbar = 1.0;
  std::vector<StateDecl> states;
  std::vector<EnsembleDecl> ensembles;
  std::vector<TaskDecl> tasks;

  const StateDecl* find_state(std::string_view name) const noexcept;
  const EnsembleDecl* find_ensemble(std::string_view name) const noexcept;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Line-oriented scenario document:
///
///   # comment
///   [scenario NAME]       format = csv | jsonl
///   [grid]                x_min, x_max, n_points
///   [units]               hbar
///   [state NAME]          kind = gaussian | harmonic | superposition, ...
///   [ensemble NAME]       groupK.weight / .states / .weights / .counts, total
///   [task ID]             kind = stats | classify | fluctuation_sample | clt_study | time_window, ...
///
/// Parsing also validates: every state is built on the grid and every
/// ensemble goes through build_ensemble(). Throws ParseError (1-based
/// line/column), Error{UnknownReference}, or the domain error found during
/// validation with the source line in its message.
Scenario parse_scenario(std::string_view text);

/// Canonical text form; parse_scenario(to_text(s)) == s.
std::string to_text(const Scenario& s);

Grid make_scenario_grid(const Scenario& s);

/// Materializes an ensemble declaration against already-built states.
Ensemble build_declared_ensemble(const Scenario& s, const EnsembleDecl& decl, const Grid& grid, const UnitSystem& units);

}  // namespace uncertainty
