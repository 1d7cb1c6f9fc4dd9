#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "symctrl/pipeline.hpp"
#include "symctrl/scenario.hpp"
#include "symctrl/types.hpp"

namespace {

struct CommandSpec {
  const char* name;
  const char* help;
  symctrl::RunResult (*run)(const symctrl::Scenario&, const symctrl::RunOptions&);
  bool has_bounds;
};

constexpr CommandSpec commands[] = {
    {"synth-safety", "synthesize the maximal safety controller for the scenario",
     symctrl::run_synth_safety, true},
    {"synth-reach", "synthesize the time-optimal reachability controller for the scenario",
     symctrl::run_synth_reach, true},
    {"simulate", "roll the exact flow forward under a previously synthesized controller",
     symctrl::run_simulate, false},
    {"validate", "check the configured precision against a refined abstraction",
     symctrl::run_validate, false},
    {"export-grid", "rewrite synthesis artifacts as dense two-dimensional plotting grids",
     symctrl::run_export_grid, false},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"controller synthesis for switched systems on uniform grids"};
  app.require_subcommand(1);

  std::string scenario_path;
  symctrl::RunOptions opt;
  const CommandSpec* chosen = nullptr;

  for (const CommandSpec& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("scenario", scenario_path, "scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out-dir", opt.out_dir, "artifact directory, created when missing")
        ->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads; results do not depend on this")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
    sub->add_option("--seed", opt.seed, "seed for the sampled checks")
        ->capture_default_str();
    if (cmd.has_bounds) {
      sub->add_flag("--bounds", opt.bounds,
                    "also synthesize against the expanded specification and export the "
                    "resulting bound artifacts");
      sub->add_flag("--force", opt.force,
                    "proceed despite relation-gate violations");
    }
    sub->callback([&chosen, &cmd] { chosen = &cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return symctrl::exit_config;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    const symctrl::Scenario sc = symctrl::load_scenario(scenario_path);
    const symctrl::RunResult res = chosen->run(sc, opt);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cout << res.report.render();
    std::cout << "elapsed " << symctrl::format_double(elapsed.count()) << " s\n";
    return res.exit_code;
  } catch (const symctrl::blocking_state_error& e) {
    std::cerr << "error: blocking state " << e.state << ": " << e.what() << "\n";
    return symctrl::exit_blocking;
  } catch (const symctrl::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return symctrl::exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return symctrl::exit_config;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return symctrl::exit_config;
  }
}
