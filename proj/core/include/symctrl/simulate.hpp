#ifndef SYMCTRL_SIMULATE_HPP_
#define SYMCTRL_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>

#include "symctrl/transition_system.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

/* action selection along a run */
enum class SimPolicy {
  lazy,          /* keep the previous action while it stays enabled */
  min_action,    /* always the lowest enabled action */
  random_action, /* seeded uniform draw from the enabled set */
};

/* successor selection within a nondeterministic step */
enum class SuccessorRule {
  lowest,        /* smallest successor id */
  random_choice, /* seeded uniform draw from the successor set */
};

struct SimulateResult {
  Trajectory trajectory;
  /* q0 had no enabled action although steps > 0; trajectory is just [q0] */
  bool blocking_start = false;
  /* a blocking state was reached before the step budget ran out */
  bool stopped_blocked = false;
  /* the blocking state, valid when either flag is set */
  state_t blocked_state = 0;
};

/* Rolls ts forward from q0 for at most steps transitions. The lazy policy
 * starts with the lowest enabled action. Identical arguments give identical
 * results; the seed only matters for the random policy and random successor
 * rule, which share one generator drawn in step order. */
SimulateResult simulate(const TransitionSystem& ts, state_t q0, std::size_t steps,
                        SimPolicy policy = SimPolicy::lazy,
                        SuccessorRule rule = SuccessorRule::lowest,
                        std::uint64_t seed = 0);

/* true iff states/actions lengths agree and every consecutive triple is a
 * stored transition of ts */
bool is_valid_trajectory(const TransitionSystem& ts, const Trajectory& traj);

}  // namespace symctrl

#endif
