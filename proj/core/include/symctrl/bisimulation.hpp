#ifndef SYMCTRL_BISIMULATION_HPP_
#define SYMCTRL_BISIMULATION_HPP_

#include <optional>

#include "symctrl/relation.hpp"
#include "symctrl/transition_system.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

enum class BisimViolationKind {
  output_distance,   /* d(H1(q1), H2(q2)) > epsilon + slack */
  forward_matching,  /* q1 -l-> successor has no related match under l from q2 */
  backward_matching, /* q2 -l-> successor has no related match under l from q1 */
  uncovered_left,    /* left state q1 related to nothing */
  uncovered_right,   /* right state q2 related to nothing */
};

/* Lexicographically smallest violation. For the matching kinds, successor is
 * the unmatched left (forward) or right (backward) successor and action the
 * label; distance is set only for output_distance. Uncovered witnesses carry
 * the state in q1 or q2 and leave the other fields zero. */
struct BisimWitness {
  BisimViolationKind kind = BisimViolationKind::output_distance;
  state_t q1 = 0;
  state_t q2 = 0;
  action_t action = 0;
  state_t successor = 0;
  double distance = 0.0;
};

/* relation_ok: the three per-pair conditions hold on every stored pair.
 * bisimilar_ok: relation_ok and both totality conditions hold (every left
 * and every right state is covered). witness is set when relation_ok fails,
 * and also when only totality fails (an uncovered kind). */
struct BisimVerdict {
  bool relation_ok = false;
  bool bisimilar_ok = false;
  std::optional<BisimWitness> witness;
};

/* Checks whether r is an epsilon-approximate bisimulation between t1 and t2.
 * Output distances compare non-strictly against epsilon + slack. The systems
 * must agree on action count, dimension, and norm. The pair scan may be
 * partitioned across threads; the verdict equals the sequential one because
 * workers report their earliest candidate and the smallest wins. */
BisimVerdict check_bisimulation(const TransitionSystem& t1, const TransitionSystem& t2,
                                const FiniteRelation& r, double epsilon,
                                double slack = 0.0, unsigned threads = 1);

}  // namespace symctrl

#endif
