#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hext/ext_engine.hpp"

namespace hext {

/// Invalid or incomplete configuration; names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Flat key=value experiment description.
struct ExperimentConfig {
  std::map<std::string, std::string> values;
  std::string source = "<memory>";  // file name for diagnostics

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
};

ExperimentConfig parse_config(std::istream& in, std::string source);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::uint64_t> seed;           // overrides the config seed
  std::optional<std::filesystem::path> out;    // overrides the config output path
};

struct ExperimentResult {
  std::string status;  // an engine status, a predicate verdict, or "Error"
  std::optional<double> value;
  int levels = 0;
  double wall_ms = 0.0;
  int exit_code = 1;
  std::string message;  // diagnostics and notes, one per line
  std::optional<Witness> witness;
  std::filesystem::path csv_path;

  std::string summary_line() const;
};

/// Validates the config, runs it, writes the trace CSV atomically. Never throws;
/// failures come back as exit code 1 with a message naming the field.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Real formatting used in all CSV output: shortest round-trip, '.', inf/-inf/nan.
std::string format_real(double v);
/// Trace CSV with the standard header; the final row carries `final_status`.
std::string trace_csv(const std::vector<TraceRow>& rows, const std::string& final_status);
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct SuiteMember {
  std::string config;
  ExperimentResult result;
};
struct SuiteReport {
  std::vector<SuiteMember> members;
  int exit_code = 0;
  std::string table() const;  // machine-readable CSV, no timings
};
/// Runs every *.cfg in `dir` (sorted by name) with up to `jobs` workers. Member
/// CSVs go to `out_dir`/<stem>.csv; the table goes to `out_dir`/suite_summary.csv.
SuiteReport run_suite(const std::filesystem::path& dir, const std::filesystem::path& out_dir, int jobs,
                      const RunOptions& options = {});

/// Names of the supported experiments.
const std::vector<std::string>& experiment_names();

}  // namespace hext
