#ifndef SYMCTRL_RELATION_HPP_
#define SYMCTRL_RELATION_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "symctrl/types.hpp"

namespace symctrl {

/* Sparse relation between the states of a left and a right system, stored as
 * mutually consistent forward (q1 -> sorted q2 set) and backward (q2 ->
 * sorted q1 set) adjacency tables with no duplicate pairs. Immutable after
 * construction. */
class FiniteRelation {
 public:
  /* pairs may arrive unsorted and with duplicates; ids must be in range */
  FiniteRelation(state_t num_left, state_t num_right,
                 std::vector<std::pair<state_t, state_t>> pairs);

  state_t num_left() const { return num_left_; }
  state_t num_right() const { return num_right_; }
  std::size_t num_pairs() const { return fwd_targets_.size(); }

  /* sorted set of right states related to q1 */
  std::span<const state_t> image(state_t q1) const;
  /* sorted set of left states related to q2 */
  std::span<const state_t> preimage(state_t q2) const;

  /* sorted union over a set of left (right) states */
  std::vector<state_t> image_of_set(std::span<const state_t> left) const;
  std::vector<state_t> preimage_of_set(std::span<const state_t> right) const;

  bool contains(state_t q1, state_t q2) const;

  FiniteRelation transpose() const;

  /* one `r <q1> <q2>` line per pair in (q1, q2) order; deterministic bytes */
  void write_text(std::ostream& out) const;

  /* Parses `r <q1> <q2>` lines under the usual comment and whitespace rules.
   * State counts come from the caller since the format does not carry them;
   * duplicate pairs are merged. */
  static FiniteRelation read_text(std::istream& in, state_t num_left, state_t num_right);

 private:
  state_t num_left_;
  state_t num_right_;
  std::vector<std::uint32_t> fwd_offsets_;
  std::vector<state_t> fwd_targets_;
  std::vector<std::uint32_t> bwd_offsets_;
  std::vector<state_t> bwd_targets_;
};

}  // namespace symctrl

#endif
