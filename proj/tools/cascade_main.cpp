// cascade: run or verify scenario files.
//
//   cascade run SCENARIO [--out DIR] [--reproducible] [--threads N] [--seed S]
//   cascade run --case {1,2,3,discrete}
//   cascade verify SCENARIO
//
// Exit status: 0 success, 1 failed expectations, 2 configuration error, 3 I/O error,
// 4 numerical error.
#include "builtin_scenarios.hpp"
#include "cascade/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int status_for(const cascade::Error& e) {
  switch (e.kind()) {
    case cascade::ErrorKind::IoError: return 3;
    case cascade::ErrorKind::ConfigError: return 2;
    default: return 4;
  }
}

std::string builtin_name(const std::string& key) {
  if (key == "1") return "case1_ball";
  if (key == "2") return "case2_disk";
  if (key == "3") return "case3_cylinder";
  return "discrete_disk";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascading versus direct nonlinear-optical signal calculator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  std::string quick_case;
  bool reproducible = false;
  int threads = 1;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario, "Scenario JSON file");
    sub->add_option("--out", out_dir, "Output directory (default: next to the scenario)");
    sub->add_flag("--reproducible", reproducible, "Fixed-order compensated summation");
    sub->add_option("--threads", threads, "Concurrent sweep points")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--case", quick_case, "Run a shipped scenario")->check(CLI::IsMember({"1", "2", "3", "discrete"}));
  };
  CLI::App* run = app.add_subcommand("run", "Execute all sweep points and write report.json / plotdata.csv");
  CLI::App* verify = app.add_subcommand("verify", "Run and check the scenario's expect block");
  add_common(run);
  add_common(verify);

  CLI11_PARSE(app, argc, argv);

  cascade::RunOptions opts;
  opts.reproducible = reproducible;
  opts.threads = threads;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  CLI::App* active = run->parsed() ? run : verify;
  if (active->count("--seed") > 0) opts.seed = seed;

  if (scenario.empty() && quick_case.empty()) {
    std::cerr << "error: give a scenario file or --case\n";
    return 2;
  }
  try {
    if (!quick_case.empty()) {
      const std::string name = builtin_name(quick_case);
      const std::string& text = cascade_tool::builtin_scenarios().at(name);
      if (!opts.out_dir) opts.out_dir = std::filesystem::current_path() / name;
      if (active == verify) return cascade::verify_scenario_text(text, std::filesystem::current_path(), opts, std::cout);
      const auto res = cascade::run_scenario_text(text, std::filesystem::current_path(), opts);
      std::cout << res.report_path.string() << '\n' << res.csv_path.string() << '\n';
      return 0;
    }
    if (active == verify) return cascade::verify_scenario_file(scenario, opts, std::cout);
    const auto res = cascade::run_scenario_file(scenario, opts);
    std::size_t errors = 0;
    for (const auto& p : res.points) errors += p.ok ? 0 : 1;
    std::cout << res.report_path.string() << '\n' << res.csv_path.string() << '\n';
    if (errors > 0) std::cerr << errors << " sweep point(s) failed; see report.json\n";
    return 0;
  } catch (const cascade::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return status_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
