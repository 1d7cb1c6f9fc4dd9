#ifndef SYMCTRL_SCENARIO_HPP_
#define SYMCTRL_SCENARIO_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "symctrl/affine.hpp"
#include "symctrl/region.hpp"
#include "symctrl/simulate.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

/* one closed-loop run request from a [simulate] section */
struct SimulateSpec {
  std::vector<double> x0;
  std::uint64_t steps = 0;
  SimPolicy policy = SimPolicy::lazy;
  std::uint64_t seed = 0;
};

/* precision-validation knobs from a [validate] section */
struct ValidateSpec {
  int refinement = 2;
  std::uint64_t samples = 1000;
};

/* Parsed scenario file: the switched system, the abstraction parameters,
 * and exactly one synthesis objective. A scenario is a safety scenario or a
 * reachability scenario, never both. Regions live in the output space of the
 * system under the l2 norm. */
struct Scenario {
  std::string name;
  SwitchedSystem system;

  double tau = 0.0;
  double epsilon = 0.0;
  /* one spacing per dimension; a single configured value is broadcast */
  std::vector<double> eta;
  Box domain;

  std::optional<Region> safety_region;
  std::optional<Region> reach_safe;
  std::optional<Region> reach_target;

  std::optional<SimulateSpec> simulate;
  ValidateSpec validate;

  int dim() const { return system.dim; }
  bool is_reach() const { return reach_safe.has_value(); }
};

/* Parses the sectioned key-value scenario format:
 *
 *   [system]       dim = n; a_k, b_k per mode, row-major, 1-based
 *   [abstraction]  tau, epsilon, eta (1 or n values), domain = lo.. hi..
 *   [safety]       box = lo.. hi..            (repeatable, unioned)
 *   [reach]        safe_box, target_box       (repeatable, unioned)
 *   [simulate]     x0, steps, policy lazy|min|random, seed
 *   [validate]     refinement, samples
 *
 * '#' starts a comment, blank lines are skipped, repeated scalar keys and
 * unknown sections or keys are rejected. Every violation raises config_error
 * naming the line. The name tags reports and defaults to the file stem. */
Scenario parse_scenario(std::istream& in, std::string name);

/* reads the file and parses it; the scenario name is the basename without
 * its extension */
Scenario load_scenario(const std::string& path);

}  // namespace symctrl

#endif
