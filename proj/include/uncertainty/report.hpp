#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "uncertainty/fluctuations.hpp"
#include "uncertainty/scenario.hpp"

namespace uncertainty {

/// Text values cover "unbounded" windows and "undefined" estimates.
using ReportValue = std::variant<double, std::int64_t, std::string>;

struct ReportRow {
  std::string task_id;
  std::string kind;
  std::vector<std::pair<std::string, ReportValue>> values;
  std::string classification;  // empty when not applicable
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string version;
};

struct SampleExport {
  std::string path;
  SampleBatch batch;
};

struct RunOptions {
  std::optional<std::uint64_t> seed_override;  // task k (0-based among stochastic tasks) uses override + k
  std::optional<double> hbar_override;
};

struct RunResult {
  std::vector<ReportRow> rows;
  std::vector<SampleExport> samples;
};

/// Rows come out in task declaration order; a failing task raises its error
/// with the task id prepended to the message.
RunResult run_scenario(const Scenario& s, const RunOptions& options = {});

/// Long format, one record per (row, quantity):
///   format_version,artifact_version,scenario,task,kind,seed,quantity,value,classification
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
/// One JSON object per row.
void write_jsonl(std::ostream& out, const std::vector<ReportRow>& rows);
void write_report(std::ostream& out, const std::vector<ReportRow>& rows, OutputFormat format);

}  // namespace uncertainty
