#ifndef SYMCTRL_REACHABILITY_HPP_
#define SYMCTRL_REACHABILITY_HPP_

#include <cstdint>
#include <vector>

#include "symctrl/controller.hpp"
#include "symctrl/region.hpp"
#include "symctrl/relation.hpp"
#include "symctrl/transition_system.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

/* per-state worst-case step count to the target, time_infinity when the
 * target cannot be forced */
struct ValueFunction {
  std::vector<std::uint32_t> values;

  bool operator==(const ValueFunction&) const = default;
};

/* Worst-case entry time of the system as controlled, taking every enabled
 * transition as adversarial: 0 on target states, time_infinity outside the
 * safe set and on states that can be steered away from the target forever,
 * otherwise one more than the worst successor. Computed by synchronous value
 * iteration from the all-infinite-except-targets start.
 *
 * The target view must be contained in the safe view. With
 * require_nonblocking set, a blocking state whose output is in the safe set
 * but not the target raises blocking_state_error; without it such states
 * simply take value infinity, which is what evaluating a controller that
 * gives up near the boundary needs. */
ValueFunction entry_time(const TransitionSystem& ts, const RegionView& safe,
                         const RegionView& target, bool require_nonblocking = true,
                         unsigned threads = 1);

struct ReachSynthesisResult {
  Controller controller;
  ValueFunction value;
  /* sweeps that changed at least one value */
  std::uint32_t sweeps = 0;
  /* the terminal sweep that confirmed stability, always 1 */
  std::uint32_t confirming_sweeps = 1;
  /* states whose output lies in the safe set */
  state_t domain_size = 0;
};

/* Time-optimal controller by min-max value iteration: the value of a state
 * in the safe set is the least over enabled actions of one more than the
 * worst successor value, infinity outside the safe set, zero on targets.
 * The controller keeps exactly the actions attaining the minimum, which on
 * states with infinite value inside the safe set is every enabled action, so
 * the controller never blocks inside the safe set. Every state with output
 * in the safe set must be non-blocking (blocking_state_error otherwise).
 * No controller reaches the target faster from any state. */
ReachSynthesisResult time_optimal_controller(const TransitionSystem& ts,
                                             const RegionView& safe, const RegionView& target,
                                             unsigned threads = 1);

/* Controller transfer across a relation: each concrete state adopts the
 * action set of its best related abstract state, the one of least value,
 * ties broken toward the smallest state index. States with an empty image
 * get the empty set. Sound when r is a verified bisimulation at the
 * contraction radius used for s2 and j2. */
Controller concretize_reachability(const Controller& s2, const ValueFunction& j2,
                                   const FiniteRelation& r, const TransitionSystem& t1,
                                   unsigned threads = 1);

/* Both ends of the reachability bracket obtained through an abstraction:
 * time-optimal synthesis on t2 against the contracted and the expanded
 * problem, both concretized onto t1, with the entry times that bound the
 * concrete optimum from above and below. */
struct ReachSandwich {
  /* concretized from synthesis against contract(epsilon) */
  Controller s1;
  /* concretized from synthesis against expand(epsilon) */
  Controller s1_expanded;
  ReachSynthesisResult t2_contracted;
  ReachSynthesisResult t2_expanded;
  /* entry time of t1 under s1 for the plain problem */
  ValueFunction j_upper;
  /* entry time of t1 under s1_expanded for the expand(2 epsilon) problem */
  ValueFunction j_lower;
  /* j_lower <= j_upper at every state */
  bool lower_le_upper = false;
  /* the full bound chain was evaluated (t1 within chain_limit states) */
  bool chain_checked = false;
  /* j_lower <= image minimum of the expanded values <= optimum on t1
   * <= j_upper <= image minimum of the contracted values, at every state */
  bool chain_ok = false;
};

ReachSandwich reachability_sandwich(const TransitionSystem& t1, const TransitionSystem& t2,
                                    const FiniteRelation& r, double epsilon,
                                    const Region& safe, const Region& target,
                                    unsigned threads = 1, state_t chain_limit = 20000);

}  // namespace symctrl

#endif
