#include "uncertainty/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

#include "uncertainty/error.hpp"
#include "uncertainty/format.hpp"
#include "uncertainty/version.hpp"

namespace uncertainty {

namespace {

using Values = std::vector<std::pair<std::string, ReportValue>>;

ReportValue optional_value(const std::optional<double>& v) {
  if (v) return *v;
  return std::string("undefined");
}

void append_moment_report(Values& values, const MomentReport& m) {
  values.emplace_back("count", static_cast<std::int64_t>(m.count));
  values.emplace_back("mean_x", m.mean_x);
  values.emplace_back("var_x", m.var_x);
  values.emplace_back("mean_p", m.mean_p);
  values.emplace_back("var_p", m.var_p);
  values.emplace_back("corr_xp", optional_value(m.corr_xp));
  values.emplace_back("skew_x", optional_value(m.skew_x));
  values.emplace_back("skew_p", optional_value(m.skew_p));
  values.emplace_back("excess_kurt_x", optional_value(m.excess_kurt_x));
  values.emplace_back("excess_kurt_p", optional_value(m.excess_kurt_p));
}

class Runner {
 public:
  Runner(const Scenario& s, const RunOptions& options)
      : scenario_(s),
        options_(options),
        grid_(make_scenario_grid(s)),
        units_(options.hbar_override ? *options.hbar_override : s.hbar) {}

  RunResult run() {
    RunResult result;
    std::uint64_t stochastic_ordinal = 0;
    for (const auto& task : scenario_.tasks) {
      std::optional<std::uint64_t> seed_override;
      if (is_stochastic(task.task)) {
        if (options_.seed_override) seed_override = *options_.seed_override + stochastic_ordinal;
        ++stochastic_ordinal;
      }
      try {
        run_task(task, seed_override, result);
      } catch (const Error& e) {
        throw Error(e.code(), "task " + task.id + ": " + e.message());
      }
    }
    return result;
  }

 private:
  ReportRow row(const TaskDecl& task) const {
    ReportRow r;
    r.task_id = task.id;
    r.kind = std::string(task_kind_name(task.task));
    r.scenario = scenario_.name;
    r.version = kArtifactVersion;
    return r;
  }

  const WaveFunction& state(const std::string& name) {
    auto it = states_.find(name);
    if (it != states_.end()) return it->second;
    const StateDecl* decl = scenario_.find_state(name);
    if (decl == nullptr) throw Error(ErrorCode::UnknownReference, name);
    return states_.emplace(name, build_state(decl->recipe, grid_, units_)).first->second;
  }

  const Ensemble& ensemble(const std::string& name) {
    auto it = ensembles_.find(name);
    if (it != ensembles_.end()) return it->second;
    const EnsembleDecl* decl = scenario_.find_ensemble(name);
    if (decl == nullptr) throw Error(ErrorCode::UnknownReference, name);
    return ensembles_.emplace(name, build_declared_ensemble(scenario_, *decl, grid_, units_)).first->second;
  }

  void run_task(const TaskDecl& task, std::optional<std::uint64_t> seed_override, RunResult& result) {
    if (const auto* t = std::get_if<StatsTask>(&task.task)) {
      const StateStats s = uncertainty_product(state(t->state), units_);
      const EquilibriumVerdict v = classify(s.product, units_);
      ReportRow r = row(task);
      r.values = {{"mean_x", s.mean_x}, {"var_x", s.var_x}, {"mean_p", s.mean_p}, {"var_p", s.var_p},
                  {"product", s.product}, {"bound", v.bound},   {"slack", v.slack}};
      r.classification = std::string(to_string(v.classification));
      result.rows.push_back(std::move(r));
    } else if (const auto* t = std::get_if<ClassifyTask>(&task.task)) {
      ReportRow r = row(task);
      if (scenario_.find_state(t->target) != nullptr) {
        const StateStats s = uncertainty_product(state(t->target), units_);
        const EquilibriumVerdict v = classify(s.product, units_, t->rel_tol);
        r.values = {{"product", v.product}, {"bound", v.bound}, {"slack", v.slack}, {"rel_tol", t->rel_tol}};
        r.classification = std::string(to_string(v.classification));
      } else {
        const Ensemble& e = ensemble(t->target);
        const EquilibriumVerdict v = ensemble_product(e, t->rel_tol);
        const EnsembleMeans means = ensemble_means(e);
        const StateStats mixed = mixed_state_moments(e);
        r.values = {{"trace", trace_density(e)}, {"mean_x", means.mean_x}, {"mean_p", means.mean_p},
                    {"product", v.product},      {"bound", v.bound},       {"slack", v.slack},
                    {"rel_tol", t->rel_tol}};
        for (std::size_t g = 0; g < e.groups().size(); ++g) {
          r.values.emplace_back("group" + std::to_string(e.groups()[g].i_index) + "_product", group_product(e, g));
        }
        r.values.emplace_back("mixed_var_x", mixed.var_x);
        r.values.emplace_back("mixed_var_p", mixed.var_p);
        r.values.emplace_back("mixed_product", mixed.product);
        r.classification = std::string(to_string(v.classification));
      }
      result.rows.push_back(std::move(r));
    } else if (const auto* t = std::get_if<FluctuationSampleTask>(&task.task)) {
      const std::uint64_t seed = seed_override.value_or(t->seed);
      const PhaseSpaceGaussian g = from_stats(uncertainty_product(state(t->source), units_));
      SampleBatch batch = sample(g, t->n, seed);
      ReportRow r = row(task);
      r.seed = seed;
      r.values = {{"sigma_x", g.sigma_x()}, {"sigma_p", g.sigma_p()}};
      append_moment_report(r.values, estimate_moments(batch));
      result.rows.push_back(std::move(r));
      if (t->samples_path) result.samples.push_back({*t->samples_path, std::move(batch)});
    } else if (const auto* t = std::get_if<CltStudyTask>(&task.task)) {
      const std::uint64_t seed = seed_override.value_or(t->seed);
      for (int m : t->m_list) {
        ReportRow r = row(task);
        r.seed = seed;
        r.values = {{"m_terms", static_cast<std::int64_t>(m)}};
        append_moment_report(r.values, clt_aggregate(t->micro, m, t->n, seed));
        result.rows.push_back(std::move(r));
      }
    } else {
      const auto& tw = std::get<TimeWindowTask>(task.task);
      const bool is_state = scenario_.find_state(tw.target) != nullptr;
      const EnergyMoments em = is_state ? energy_moments(state(tw.target), tw.potential, units_)
                                        : ensemble_energy_moments(ensemble(tw.target), tw.potential);
      const double delta_e = std::sqrt(em.variance);
      const TimeWindow w = time_window(delta_e, units_);
      ReportRow r = row(task);
      r.values = {{"energy_path", std::string(is_state ? "state" : "ensemble_total")},
                  {"mean_E", em.mean},
                  {"var_E", em.variance},
                  {"delta_E", delta_e},
                  {"delta_t", w.delta_t ? ReportValue(*w.delta_t) : ReportValue(std::string("unbounded"))},
                  {"h_over_4pi", units_.h() / (4.0 * std::numbers::pi)}};
      result.rows.push_back(std::move(r));
    }
  }

  const Scenario& scenario_;
  RunOptions options_;
  Grid grid_;
  UnitSystem units_;
  std::map<std::string, WaveFunction> states_;
  std::map<std::string, Ensemble> ensembles_;
};

std::string value_text(const ReportValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_real(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(static_cast<unsigned char>(c)));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string json_value(const ReportValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return std::isfinite(*d) ? format_real(*d) : "null";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return json_string(std::get<std::string>(v));
}

}  // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& options) { return Runner(s, options).run(); }

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "format_version,artifact_version,scenario,task,kind,seed,quantity,value,classification\n";
  for (const auto& r : rows) {
    const std::string seed = r.seed ? std::to_string(*r.seed) : "";
    for (const auto& [name, value] : r.values) {
      out << kReportFormatVersion << ',' << csv_field(r.version) << ',' << csv_field(r.scenario) << ','
          << csv_field(r.task_id) << ',' << csv_field(r.kind) << ',' << seed << ',' << csv_field(name) << ','
          << csv_field(value_text(value)) << ',' << csv_field(r.classification) << '\n';
    }
  }
}

void write_jsonl(std::ostream& out, const std::vector<ReportRow>& rows) {
  for (const auto& r : rows) {
    out << "{\"format_version\":" << kReportFormatVersion << ",\"artifact_version\":" << json_string(r.version)
        << ",\"scenario\":" << json_string(r.scenario) << ",\"task\":" << json_string(r.task_id)
        << ",\"kind\":" << json_string(r.kind) << ",\"seed\":" << (r.seed ? std::to_string(*r.seed) : "null")
        << ",\"classification\":" << (r.classification.empty() ? "null" : json_string(r.classification))
        << ",\"values\":{";
    for (std::size_t k = 0; k < r.values.size(); ++k) {
      if (k) out << ',';
      out << json_string(r.values[k].first) << ':' << json_value(r.values[k].second);
    }
    out << "}}\n";
  }
}

void write_report(std::ostream& out, const std::vector<ReportRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    write_csv(out, rows);
  } else {
    write_jsonl(out, rows);
  }
}

}  // namespace uncertainty
