#ifndef SYMCTRL_CONTROLLER_HPP_
#define SYMCTRL_CONTROLLER_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "symctrl/transition_system.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

/* Static state-feedback controller: one action set per state, stored as a
 * 64-bit mask, so action ids must stay below 64. An empty set at q marks q
 * blocking under the controller. Concurrent reads are safe once filling is
 * done; writes need external synchronization. */
class Controller {
 public:
  static constexpr action_t max_actions = 64;

  /* every action set starts empty */
  Controller(state_t num_states, action_t num_actions);

  /* adopts prebuilt masks; bits at or above num_actions must be clear */
  Controller(state_t num_states, action_t num_actions, std::vector<std::uint64_t> masks);

  state_t num_states() const { return num_states_; }
  action_t num_actions() const { return num_actions_; }

  bool contains(state_t q, action_t l) const;
  void insert(state_t q, action_t l);
  void erase(state_t q, action_t l);

  std::uint64_t mask(state_t q) const;
  /* bits at or above num_actions must be clear */
  void set_mask(state_t q, std::uint64_t m);
  std::span<const std::uint64_t> masks() const { return masks_; }

  /* ascending list of enabled actions at q */
  std::vector<action_t> actions(state_t q) const;
  bool is_blocking(state_t q) const;

  /* number of states with a nonempty action set */
  state_t domain_size() const;
  /* total count of enabled (state, action) pairs */
  std::size_t num_enabled_pairs() const;

  bool operator==(const Controller&) const = default;

 private:
  void check_state(state_t q) const;
  void check_action(action_t l) const;

  state_t num_states_;
  action_t num_actions_;
  std::vector<std::uint64_t> masks_;
};

/* result of is_well_defined; when ok is false, (state, action) name the
 * first enabled action, in (state, action) order, that the system disables */
struct WellDefinedCheck {
  bool ok = true;
  state_t state = 0;
  action_t action = 0;
};

/* a controller is well-defined for t when it only enables enabled actions */
WellDefinedCheck is_well_defined(const TransitionSystem& t, const Controller& s);

/* Restriction of t to the actions s enables: slot (q, l) keeps its successor
 * set iff l is in s(q). Outputs, norm, and action names are unchanged.
 * Requires a well-defined s and matching state and action counts. */
TransitionSystem apply_controller(const TransitionSystem& t, const Controller& s);

/* true iff s2(q) is a subset of s1(q) at every state, so s2 sits at or below
 * s1 in the permissivity order; counts must match */
bool is_more_permissive(const Controller& s1, const Controller& s2);

}  // namespace symctrl

#endif
