#include "symctrl/simulate.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <stdexcept>

#include "symctrl/random.hpp"

namespace symctrl {

SimulateResult simulate(const TransitionSystem& ts, state_t q0, std::size_t steps,
                        SimPolicy policy, SuccessorRule rule, std::uint64_t seed) {
  if (q0 >= ts.num_states())
    throw std::out_of_range("start state " + std::to_string(q0) + " out of range");

  SimulateResult result;
  result.trajectory.states.push_back(q0);
  if (steps == 0) return result;
  if (ts.is_blocking(q0)) {
    result.blocking_start = true;
    result.blocked_state = q0;
    return result;
  }

  std::mt19937_64 eng(seed);
  std::optional<action_t> previous;
  state_t q = q0;
  for (std::size_t k = 0; k < steps; ++k) {
    if (ts.is_blocking(q)) {
      result.stopped_blocked = true;
      result.blocked_state = q;
      break;
    }
    action_t chosen;
    switch (policy) {
      case SimPolicy::lazy:
        if (previous && ts.is_enabled(q, *previous)) {
          chosen = *previous;
        } else {
          chosen = ts.enabled(q).front();
        }
        break;
      case SimPolicy::min_action:
        chosen = ts.enabled(q).front();
        break;
      case SimPolicy::random_action: {
        const auto options = ts.enabled(q);
        chosen = options[bounded_rand(eng, options.size())];
        break;
      }
    }
    const auto succ = ts.successors(q, chosen);
    const state_t next = rule == SuccessorRule::lowest
                             ? succ.front()
                             : succ[bounded_rand(eng, succ.size())];
    result.trajectory.actions.push_back(chosen);
    result.trajectory.states.push_back(next);
    previous = chosen;
    q = next;
  }
  return result;
}

bool is_valid_trajectory(const TransitionSystem& ts, const Trajectory& traj) {
  if (traj.states.empty() || traj.states.size() != traj.actions.size() + 1) return false;
  for (state_t q : traj.states)
    if (q >= ts.num_states()) return false;
  for (std::size_t i = 0; i < traj.actions.size(); ++i) {
    if (traj.actions[i] >= ts.num_actions()) return false;
    const auto succ = ts.successors(traj.states[i], traj.actions[i]);
    if (!std::binary_search(succ.begin(), succ.end(), traj.states[i + 1])) return false;
  }
  return true;
}

}  // namespace symctrl
