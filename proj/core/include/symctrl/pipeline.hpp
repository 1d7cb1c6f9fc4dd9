#ifndef SYMCTRL_PIPELINE_HPP_
#define SYMCTRL_PIPELINE_HPP_

#include <cstdint>
#include <string>

#include "symctrl/exports.hpp"
#include "symctrl/scenario.hpp"

namespace symctrl {

/* process exit contract shared by every command */
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_empty_domain = 2;
inline constexpr int exit_blocking = 3;
inline constexpr int exit_uncovered = 4;

struct RunOptions {
  std::string out_dir = "out";
  unsigned threads = 1;
  std::uint64_t seed = 0;
  /* synthesis commands: also compute the expanded-specification side */
  bool bounds = false;
  /* synthesis commands: demote relation-gate violations to a warning */
  bool force = false;
};

struct RunResult {
  int exit_code = exit_ok;
  Report report;
};

/* Each command materializes its artifacts under out_dir, writes its report
 * both into the result and to report_<command>.txt, and returns the exit
 * code. Artifacts are pure functions of (scenario, options), so identical
 * invocations are byte-identical. config_error and invalid_argument map to
 * exit 1 and blocking_state_error to exit 3 at the CLI boundary.
 *
 * synth-safety: abstraction, relation gate, maximal controller against the
 * epsilon-contracted safe region, controller.csv; with bounds also the
 * epsilon-expanded synthesis as controller_upper.csv.
 *
 * synth-reach: abstraction, relation gate, time-optimal controller against
 * the contracted problem, controller.csv + value.csv; with bounds also
 * value_upper.csv (the deployed values) and value_lower.csv from the
 * expanded problem.
 *
 * simulate: reads the exported controller artifacts, runs the exact-flow
 * closed loop from the scenario's x0, writes trajectory.csv, and verifies
 * the objective along the trace.
 *
 * validate: empirical precision check of the (tau, epsilon, eta) choice plus
 * the domain-margin report when a specification region is present.
 *
 * export-grid: re-reads the exported artifacts of a two-dimensional scenario
 * and writes the dense controller_grid.csv (and value_grid.csv for
 * reachability scenarios). */
RunResult run_synth_safety(const Scenario& sc, const RunOptions& opt);
RunResult run_synth_reach(const Scenario& sc, const RunOptions& opt);
RunResult run_simulate(const Scenario& sc, const RunOptions& opt);
RunResult run_validate(const Scenario& sc, const RunOptions& opt);
RunResult run_export_grid(const Scenario& sc, const RunOptions& opt);

}  // namespace symctrl

#endif
