#ifndef SYMCTRL_SAFETY_HPP_
#define SYMCTRL_SAFETY_HPP_

#include <cstdint>
#include <optional>

#include "symctrl/controller.hpp"
#include "symctrl/region.hpp"
#include "symctrl/relation.hpp"
#include "symctrl/transition_system.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

/* why a controller fails the safety conditions */
struct SafetyWitness {
  enum class Kind {
    output_outside,  /* state is enabled but its output leaves the safe set */
    dead_successor,  /* an enabled action can reach a state the controller blocks */
  };
  Kind kind = Kind::output_outside;
  state_t state = 0;
  /* valid for dead_successor only */
  action_t action = 0;
  state_t successor = 0;
};

struct SafetyCheckResult {
  bool ok = true;
  std::optional<SafetyWitness> witness;
};

/* True iff every non-blocking state of the controlled system has its output
 * in the safe set and can only step to non-blocking states. The scan runs in
 * (state, action, successor) order, so the witness is the first failure in
 * that order. Requires a well-defined controller. */
SafetyCheckResult is_safety_controller(const TransitionSystem& ts, const Controller& s,
                                       const RegionView& safe);

struct SafetySynthesisResult {
  Controller controller;
  /* sweeps that changed at least one action set */
  std::uint32_t sweeps = 0;
  /* the terminal sweep that confirmed stability, always 1 */
  std::uint32_t confirming_sweeps = 1;
  /* states whose output lies in the safe set */
  state_t domain_size = 0;
};

/* Maximal safety controller by synchronous fixed point: start from the
 * enabled sets of states whose output is in the safe set, then repeatedly
 * drop every action that can reach a state with an empty set, sweeping all
 * states against the previous iterate until nothing changes. Safe-set
 * membership is evaluated once per state up front. Sweeps may be
 * data-parallel; the result is bit-identical to the sequential run. */
SafetySynthesisResult maximal_safety_controller(const TransitionSystem& ts,
                                                const RegionView& safe,
                                                unsigned threads = 1);

/* Worklist variant of the same fixed point. Returns the identical unique
 * maximal controller but no sweep count. */
Controller maximal_safety_controller_worklist(const TransitionSystem& ts,
                                              const RegionView& safe);

/* Controller transfer across a relation: s1(q1) is the union of s2 over the
 * image of q1, and empty where the image is empty. Sound (the result is a
 * safety controller on t1 for the uncontracted set) when r is a verified
 * bisimulation at the contraction radius used for s2. */
Controller concretize_safety(const Controller& s2, const FiniteRelation& r,
                             const TransitionSystem& t1);

/* Both ends of the safety bracket obtained through an abstraction: synthesis
 * on t2 against the contracted and the expanded safe set, both concretized
 * onto t1, with the certificates that make the bracket usable. */
struct SafetySandwich {
  /* concretized from synthesis against contract(epsilon) */
  Controller s1;
  /* concretized from synthesis against expand(epsilon) */
  Controller s1_expanded;
  SafetySynthesisResult t2_contracted;
  SafetySynthesisResult t2_expanded;
  /* s1 below s1_expanded in the permissivity order */
  bool ordered = false;
  /* s1 is a safety controller for the plain safe set on t1 */
  SafetyCheckResult s1_safe;
  /* s1_expanded is a safety controller for expand(2 epsilon) on t1 */
  SafetyCheckResult s1_expanded_safe;
};

SafetySandwich safety_sandwich(const TransitionSystem& t1, const TransitionSystem& t2,
                               const FiniteRelation& r, double epsilon,
                               const Region& safe, unsigned threads = 1);

}  // namespace symctrl

#endif
