// uncert: run and validate uncertainty-relation scenarios.
//
//   uncert run <scenario> [--out PATH] [--format csv|jsonl] [--seed-override N] [--hbar X]
//   uncert validate <scenario>
//   uncert version
//
// Exit codes: 0 success, 1 domain error, 2 parse or usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "uncertainty/error.hpp"
#include "uncertainty/report.hpp"
#include "uncertainty/scenario.hpp"
#include "uncertainty/version.hpp"

namespace fs = std::filesystem;
using namespace uncertainty;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << contents;
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::ParseError || e.code() == ErrorCode::UnknownReference ? kExitUsage : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-relation scenario runner"};
  app.require_subcommand(1);

  std::string run_path;
  std::string out_path;
  std::string format_name;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> hbar_override;
  auto* run = app.add_subcommand("run", "Run a scenario and emit its report");
  run->add_option("scenario", run_path, "Scenario file")->required();
  run->add_option("--out", out_path, "Report destination (default: stdout)");
  run->add_option("--format", format_name, "Override the scenario's output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  run->add_option("--seed-override", seed_override, "Base seed replacing every stochastic task's seed");
  run->add_option("--hbar", hbar_override, "Override the scenario's hbar");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("scenario", validate_path, "Scenario file")->required();

  auto* version = app.add_subcommand("version", "Print the artifact and report format versions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (version->parsed()) {
      std::cout << "uncert " << kArtifactVersion << " (report format " << kReportFormatVersion << ")\n";
      return 0;
    }

    if (validate->parsed()) {
      const Scenario s = parse_scenario(read_file(validate_path));
      std::cout << "ok: " << s.states.size() << " states, " << s.ensembles.size() << " ensembles, "
                << s.tasks.size() << " tasks\n";
      return 0;
    }

    if (run->parsed()) {
      Scenario s = parse_scenario(read_file(run_path));
      if (!format_name.empty()) s.format = format_name == "csv" ? OutputFormat::Csv : OutputFormat::JsonLines;
      const RunResult result = run_scenario(s, RunOptions{seed_override, hbar_override});

      std::ostringstream report;
      write_report(report, result.rows, s.format);
      const fs::path base = out_path.empty() ? fs::path{} : fs::path(out_path).parent_path();
      for (const auto& exported : result.samples) {
        std::ostringstream csv;
        write_csv(csv, exported.batch);
        const fs::path target = fs::path(exported.path).is_absolute() ? fs::path(exported.path) : base / exported.path;
        write_file(target, csv.str());
      }
      if (out_path.empty()) {
        std::cout << report.str();
      } else {
        write_file(out_path, report.str());
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitUsage;
}
