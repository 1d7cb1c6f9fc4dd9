#ifndef SYMCTRL_TRANSITION_SYSTEM_HPP_
#define SYMCTRL_TRANSITION_SYSTEM_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "symctrl/types.hpp"

namespace symctrl {

/* Finite run through a transition system. states holds one more entry than
 * actions, and every triple (states[i], actions[i], states[i+1]) is a stored
 * transition of the system the run came from. */
struct Trajectory {
  std::vector<state_t> states;
  std::vector<action_t> actions;
};

/* Finite transition system with dense state and action ids. Successor sets
 * live in one contiguous array indexed CSR-style by (state, action) slot;
 * each set is sorted ascending and duplicate-free, and an empty slot means
 * the action is disabled in that state. Outputs are points in R^dim compared
 * under the stored norm. Immutable after construction, so concurrent reads
 * need no locking. */
class TransitionSystem {
 public:
  class Builder;

  state_t num_states() const { return num_states_; }
  action_t num_actions() const { return num_actions_; }
  int dimension() const { return dim_; }
  Norm norm() const { return norm_; }
  std::size_t num_transitions() const { return successors_.size(); }

  /* sorted successor set of (q, l); empty iff l is disabled in q */
  std::span<const state_t> successors(state_t q, action_t l) const;
  bool is_enabled(state_t q, action_t l) const;

  /* ascending list of actions with a nonempty successor set at q */
  std::vector<action_t> enabled(state_t q) const;
  bool is_blocking(state_t q) const;

  std::span<const double> output(state_t q) const;
  double output_distance(state_t q, state_t p) const;

  /* per-action display names; empty when none were provided */
  const std::vector<std::string>& action_names() const { return action_names_; }

  bool operator==(const TransitionSystem&) const = default;

  /* Writes the text exchange format: a `ts <states> <actions> <dim>` header,
   * a `norm <l2|linf>` line, one `o <state> <x_1> .. <x_dim>` line per state,
   * and one `t <state> <action> <succ..>` line per enabled slot. Floats carry
   * 17 significant digits and the byte stream is deterministic. */
  void write_text(std::ostream& out) const;

  /* Parses the exchange format. '#' starts a comment, blank lines are
   * skipped, the norm line is optional (default l2), and repeated `t` lines
   * for one slot are merged. Malformed input raises config_error naming the
   * offending line. */
  static TransitionSystem read_text(std::istream& in);

  /* Assembles a system from prebuilt CSR arrays. offsets must hold
   * num_states * num_actions + 1 non-decreasing entries starting at 0 and
   * ending at successors.size(); every slot must be sorted ascending and
   * duplicate-free; outputs must hold num_states * dim finite values. */
  static TransitionSystem from_parts(state_t num_states, action_t num_actions, int dim,
                                     Norm norm, std::vector<double> outputs,
                                     std::vector<std::uint32_t> offsets,
                                     std::vector<state_t> successors,
                                     std::vector<std::string> action_names = {});

 private:
  TransitionSystem() = default;

  std::size_t slot(state_t q, action_t l) const {
    return static_cast<std::size_t>(q) * num_actions_ + l;
  }
  void check_state(state_t q) const;
  void check_action(action_t l) const;

  state_t num_states_ = 0;
  action_t num_actions_ = 0;
  int dim_ = 0;
  Norm norm_ = Norm::l2;
  std::vector<double> outputs_;
  std::vector<std::uint32_t> offsets_;
  std::vector<state_t> successors_;
  std::vector<std::string> action_names_;
};

/* Incremental construction with validation. build() canonicalizes the staged
 * transitions (sorts each successor set and drops duplicates) and verifies
 * that every state received a finite output. The builder is spent after
 * build() returns. */
class TransitionSystem::Builder {
 public:
  /* all three counts must be positive; the state-action table is capped at
   * 2^28 slots */
  Builder(state_t num_states, action_t num_actions, int dim, Norm norm = Norm::l2);

  Builder& set_norm(Norm norm);
  Builder& set_output(state_t q, std::span<const double> x);
  Builder& add_transition(state_t q, action_t l, state_t succ);
  Builder& set_action_name(action_t l, std::string name);

  TransitionSystem build();

 private:
  struct Edge {
    state_t q;
    action_t l;
    state_t succ;
  };

  state_t num_states_;
  action_t num_actions_;
  int dim_;
  Norm norm_;
  std::vector<double> outputs_;
  std::vector<char> output_set_;
  std::vector<Edge> edges_;
  std::vector<std::string> action_names_;
};

}  // namespace symctrl

#endif
