// Config-driven scenario runner behind the `cascade` command-line tool.
#ifndef CASCADE_SCENARIO_HPP
#define CASCADE_SCENARIO_HPP

#include "cascade/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cascade {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // default: next to the scenario file
  bool reproducible = false;
  int threads = 1;
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  bool write_files = true;
};

struct PointRecord {
  double sweep_value = 0.0;
  bool ok = false;
  std::string error_kind;
  std::string message;
  Complex I{0.0, 0.0};  // discrete engine: (1/n) * I
  Complex boundary_term{0.0, 0.0};
  double est_error = 0.0;
  Complex reference{0.0, 0.0};
  bool has_reference = false;
  bool has_phase = false;
  PhaseReport phase;
  std::vector<std::string> warnings;
};

struct RunResult {
  std::string name;
  std::string digest;
  std::string sweep_variable;
  std::vector<PointRecord> points;
  double wall_seconds = 0.0;
  std::filesystem::path report_path;
  std::filesystem::path csv_path;
};

struct CheckResult {
  std::string column;
  std::size_t point = 0;
  double actual = 0.0;
  double target = 0.0;
  std::string rule;  // "abs<=tol", "rel<=tol", "max", "min"
  double bound = 0.0;
  bool pass = false;
};

/// FNV-1a 64 over a canonical text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Runs every sweep point of a scenario given as JSON text. Relative paths
/// (cloud files, output directory) resolve against base_dir.
RunResult run_scenario_text(const std::string& json_text, const std::filesystem::path& base_dir,
                            const RunOptions& opts);

RunResult run_scenario_file(const std::filesystem::path& file, const RunOptions& opts);

/// Runs the scenario, evaluates its "expect" block and prints one line per
/// check. Returns 0 iff all checks pass.
int verify_scenario_text(const std::string& json_text, const std::filesystem::path& base_dir,
                         const RunOptions& opts, std::ostream& out, std::vector<CheckResult>* checks = nullptr);

int verify_scenario_file(const std::filesystem::path& file, const RunOptions& opts, std::ostream& out);

/// Digest of the scenario after overrides; stable across reruns.
std::string scenario_digest(const std::string& json_text, const RunOptions& opts);

/// plotdata.csv body for a finished run.
void write_plot_csv(std::ostream& out, const RunResult& run);

}  // namespace cascade

#endif  // CASCADE_SCENARIO_HPP
