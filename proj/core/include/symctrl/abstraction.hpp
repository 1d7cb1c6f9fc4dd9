#ifndef SYMCTRL_ABSTRACTION_HPP_
#define SYMCTRL_ABSTRACTION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "symctrl/affine.hpp"
#include "symctrl/bisimulation.hpp"
#include "symctrl/controller.hpp"
#include "symctrl/grid.hpp"
#include "symctrl/reachability.hpp"
#include "symctrl/region.hpp"
#include "symctrl/relation.hpp"
#include "symctrl/simulate.hpp"
#include "symctrl/transition_system.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

/* sampling period, quantization precision, and the grid they act on */
struct AbstractionConfig {
  double tau;
  double epsilon;
  UniformGrid grid;
};

/* Deterministic grid abstraction of a switched system: one state per grid
 * point, one action per mode, output the grid point itself under the l2
 * norm. The single successor of (q, mode) is the nearest grid point to the
 * exact flow from the center of q, ties toward the lower index; the mode is
 * disabled at q when the flow leaves the grid domain. Construction is
 * parallel over grid states and the result is identical for every thread
 * count. */
TransitionSystem build_abstraction(const SwitchedSystem& sys, const AbstractionConfig& cfg,
                                   unsigned threads = 1);

/* Implicit relation {(x, q) : |x - center(q)| <= epsilon in l2} between
 * concrete points and grid states. */
class QuantizerRelation {
 public:
  /* epsilon must be nonnegative and finite */
  QuantizerRelation(UniformGrid grid, double epsilon);

  const UniformGrid& grid() const { return grid_; }
  double epsilon() const { return epsilon_; }

  /* ascending grid states within epsilon of x */
  std::vector<state_t> image(std::span<const double> x) const;
  bool relates(std::span<const double> x, state_t q) const;

  /* true when every point of the domain box has a nonempty image, which
   * holds exactly when epsilon reaches the half diagonal of one cell */
  bool covers_domain() const;

 private:
  UniformGrid grid_;
  double epsilon_;
};

/* materializes the relation pairing every state of left, through its output
 * point, with the grid states within epsilon; meant for small instances */
FiniteRelation quantizer_pairs(const TransitionSystem& left, const QuantizerRelation& r);

/* Empirical consistency report for a (tau, epsilon, grid) choice. A refined
 * abstraction at spacing / refinement stands in for the concrete system and
 * is paired with the coarse one through the quantizer. Small instances get
 * the full relation check; large ones get a seeded sample of fine states
 * whose pairs are tested directly against the matching conditions, with
 * enabled-set mismatches caused by domain truncation counted separately
 * instead of failing the check. On top of
 * that, seeded concrete trajectories under exact flow are raced against the
 * abstract ones with the same mode sequence and the worst point deviation is
 * compared with epsilon. */
struct PrecisionReport {
  bool pass = false;

  /* full relation check, run when the refined system is small enough */
  bool explicit_check = false;
  bool relation_ok = false;
  bool relation_total = false;

  /* first violation in scan order, from either mode of checking */
  std::optional<BisimWitness> witness;
  std::uint64_t pairs_checked = 0;
  std::uint64_t pair_failures = 0;
  /* sampled check only: enabled-set mismatches whose missing transition is
   * domain truncation (the flow leaves the grid), not a matching failure */
  std::uint64_t boundary_skips = 0;

  std::uint64_t trajectories = 0;
  double max_deviation = 0.0;
  bool deviation_ok = false;
};

PrecisionReport validate_precision(const SwitchedSystem& sys, const AbstractionConfig& cfg,
                                   int refinement, std::uint64_t samples,
                                   std::uint64_t seed, unsigned threads = 1,
                                   state_t explicit_limit = 40000);

/* Margin between a specification region and the grid domain. The domain
 * must contain the region expanded by twice the precision, and should keep
 * containing it after adding a one-step flow bound estimated from seeded
 * samples, so that synthesized behavior never depends on out-of-domain
 * truncation. */
struct DomainMarginReport {
  bool contains_expansion = false;
  /* per dimension, the largest sampled |flow(x) - x| over all modes */
  std::vector<double> flow_step_bound;
  bool contains_flow_margin = false;
};

DomainMarginReport check_domain_margin(const SwitchedSystem& sys, const AbstractionConfig& cfg,
                                       const Region& spec, std::uint64_t samples,
                                       std::uint64_t seed);

enum class ControlObjective {
  safety,
  reach,
};

/* answer of a concrete controller at one point */
struct ConcreteQuery {
  /* some grid state lies within epsilon of the point */
  bool covered = false;
  /* permitted modes; zero with covered set means the point is blocked */
  std::uint64_t mask = 0;
  /* reach only: the grid state realizing the value minimum */
  state_t anchor = 0;
};

/* Deployed form of a synthesized controller: a mode table over grid states
 * queried at arbitrary concrete points through the quantizer, with no
 * abstraction dynamics involved at runtime. Safety permits the union of the
 * table over every grid state within epsilon; reach permits the table at the
 * grid state of minimal value among those within epsilon, ties toward the
 * lower index. */
class ConcreteController {
 public:
  ConcreteController(Controller table, UniformGrid grid, double epsilon);
  ConcreteController(Controller table, ValueFunction value, UniformGrid grid, double epsilon);

  ControlObjective objective() const { return objective_; }
  const Controller& table() const { return table_; }
  const ValueFunction& value() const { return value_; }
  const UniformGrid& grid() const { return grid_; }
  double epsilon() const { return epsilon_; }

  ConcreteQuery query(std::span<const double> x) const;

  /* equivalent to testing mode in query(x).mask; for safety the scan stops
   * at the first grid state that permits the mode */
  bool permits(std::span<const double> x, action_t mode) const;

 private:
  Controller table_;
  ValueFunction value_;
  UniformGrid grid_;
  double epsilon_;
  ControlObjective objective_;
};

/* Closed loop of the exact flow under a concrete controller. points holds
 * steps_taken + 1 concrete states flattened in visit order. The run stops
 * early when the current point has no grid partner (uncovered) or when the
 * permitted mode set is empty (blocked). */
struct ClosedLoopResult {
  std::vector<double> points;
  std::vector<action_t> modes;
  bool uncovered = false;
  bool blocked = false;
  std::size_t steps_taken = 0;
};

/* The lazy policy keeps the previous mode while it stays permitted and
 * otherwise takes the lowest permitted mode; min_action always takes the
 * lowest; random_action draws from the permitted set with the seeded
 * generator. Identical arguments give identical runs. */
ClosedLoopResult simulate_closed_loop(const FlowMap& flow, const ConcreteController& ctrl,
                                      std::span<const double> x0, std::size_t steps,
                                      SimPolicy policy = SimPolicy::lazy,
                                      std::uint64_t seed = 0);

}  // namespace symctrl

#endif
