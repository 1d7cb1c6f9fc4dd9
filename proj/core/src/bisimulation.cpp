#include "symctrl/bisimulation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "symctrl/parallel.hpp"

namespace symctrl {

namespace {

/* candidate violation of the per-pair conditions, ordered by pair index,
 * then condition rank (output, forward, backward), then action, then
 * successor; the global minimum reproduces the sequential witness */
struct Candidate {
  std::size_t pair_idx = 0;
  int cond = 0;
  action_t action = 0;
  state_t successor = 0;
  double dist = 0.0;
  state_t q1 = 0;
  state_t q2 = 0;

  std::tuple<std::size_t, int, action_t, state_t> key() const {
    return {pair_idx, cond, action, successor};
  }
};

/* first violated condition for one related pair, in condition order */
bool check_pair(const TransitionSystem& t1, const TransitionSystem& t2,
                const FiniteRelation& r, double bound, state_t q1, state_t q2,
                Candidate& out) {
  const double d = distance(t1.output(q1), t2.output(q2), t1.norm());
  if (d > bound) {
    out.cond = 0;
    out.dist = d;
    return true;
  }
  for (action_t l = 0; l < t1.num_actions(); ++l) {
    const auto succ1 = t1.successors(q1, l);
    if (succ1.empty()) continue;
    const auto succ2 = t2.successors(q2, l);
    for (state_t q1p : succ1) {
      bool matched = false;
      for (state_t q2p : succ2)
        if (r.contains(q1p, q2p)) {
          matched = true;
          break;
        }
      if (!matched) {
        out.cond = 1;
        out.action = l;
        out.successor = q1p;
        return true;
      }
    }
  }
  for (action_t l = 0; l < t1.num_actions(); ++l) {
    const auto succ2 = t2.successors(q2, l);
    if (succ2.empty()) continue;
    const auto succ1 = t1.successors(q1, l);
    for (state_t q2p : succ2) {
      bool matched = false;
      for (state_t q1p : succ1)
        if (r.contains(q1p, q2p)) {
          matched = true;
          break;
        }
      if (!matched) {
        out.cond = 2;
        out.action = l;
        out.successor = q2p;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

BisimVerdict check_bisimulation(const TransitionSystem& t1, const TransitionSystem& t2,
                                const FiniteRelation& r, double epsilon, double slack,
                                unsigned threads) {
  if (t1.num_actions() != t2.num_actions())
    throw std::invalid_argument("systems disagree on the action count");
  if (t1.dimension() != t2.dimension())
    throw std::invalid_argument("systems disagree on the output dimension");
  if (t1.norm() != t2.norm())
    throw std::invalid_argument("systems disagree on the output norm");
  if (r.num_left() != t1.num_states() || r.num_right() != t2.num_states())
    throw std::invalid_argument("relation endpoints do not match the systems");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be finite and nonnegative");
  if (!(slack >= 0.0) || !std::isfinite(slack))
    throw std::invalid_argument("slack must be finite and nonnegative");

  /* cumulative pair count per left row, maps a pair index to its row */
  const state_t n1 = t1.num_states();
  std::vector<std::size_t> row_start(static_cast<std::size_t>(n1) + 1, 0);
  for (state_t q1 = 0; q1 < n1; ++q1)
    row_start[q1 + 1] = row_start[q1] + r.image(q1).size();
  const std::size_t total = row_start[n1];

  const double bound = epsilon + slack;
  std::mutex best_lock;
  bool best_found = false;
  Candidate best;

  parallel_chunks(total, threads, [&](std::size_t begin, std::size_t end) {
    /* locate the row containing pair index begin */
    std::size_t row = static_cast<std::size_t>(
        std::upper_bound(row_start.begin(), row_start.end(), begin) - row_start.begin() - 1);
    Candidate local;
    bool found = false;
    for (std::size_t p = begin; p < end && !found; ++p) {
      while (row_start[row + 1] <= p) ++row;
      const state_t q1 = static_cast<state_t>(row);
      const state_t q2 = r.image(q1)[p - row_start[row]];
      local.pair_idx = p;
      local.q1 = q1;
      local.q2 = q2;
      found = check_pair(t1, t2, r, bound, q1, q2, local);
    }
    if (found) {
      const std::lock_guard<std::mutex> guard(best_lock);
      if (!best_found || local.key() < best.key()) {
        best = local;
        best_found = true;
      }
    }
  });

  BisimVerdict verdict;
  if (best_found) {
    BisimWitness w;
    w.kind = best.cond == 0   ? BisimViolationKind::output_distance
             : best.cond == 1 ? BisimViolationKind::forward_matching
                              : BisimViolationKind::backward_matching;
    w.q1 = best.q1;
    w.q2 = best.q2;
    w.action = best.action;
    w.successor = best.successor;
    w.distance = best.dist;
    verdict.witness = w;
    return verdict;
  }

  verdict.relation_ok = true;
  for (state_t q1 = 0; q1 < n1; ++q1)
    if (r.image(q1).empty()) {
      BisimWitness w;
      w.kind = BisimViolationKind::uncovered_left;
      w.q1 = q1;
      verdict.witness = w;
      return verdict;
    }
  for (state_t q2 = 0; q2 < t2.num_states(); ++q2)
    if (r.preimage(q2).empty()) {
      BisimWitness w;
      w.kind = BisimViolationKind::uncovered_right;
      w.q2 = q2;
      verdict.witness = w;
      return verdict;
    }
  verdict.bisimilar_ok = true;
  return verdict;
}

}  // namespace symctrl
