#include "symctrl/safety.hpp"

#include <atomic>
#include <bit>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symctrl/parallel.hpp"

namespace symctrl {

namespace {

/* one bit per enabled action, straight from the successor table */
std::uint64_t enabled_mask(const TransitionSystem& ts, state_t q) {
  std::uint64_t m = 0;
  for (action_t l = 0; l < ts.num_actions(); ++l)
    if (ts.is_enabled(q, l)) m |= std::uint64_t{1} << l;
  return m;
}

std::vector<char> safe_flags(const TransitionSystem& ts, const RegionView& safe,
                             unsigned threads) {
  std::vector<char> flags(ts.num_states(), 0);
  parallel_chunks(ts.num_states(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q)
      flags[q] = safe.member(ts.output(static_cast<state_t>(q)));
  });
  return flags;
}

}  // namespace

SafetyCheckResult is_safety_controller(const TransitionSystem& ts, const Controller& s,
                                       const RegionView& safe) {
  const WellDefinedCheck wd = is_well_defined(ts, s);
  if (!wd.ok)
    throw std::invalid_argument("controller is not well-defined: enables action " +
                                std::to_string(wd.action) + " at state " +
                                std::to_string(wd.state) + " where it is disabled");
  for (state_t q = 0; q < ts.num_states(); ++q) {
    if (s.is_blocking(q)) continue;
    if (!safe.member(ts.output(q))) {
      SafetyWitness w;
      w.kind = SafetyWitness::Kind::output_outside;
      w.state = q;
      return {false, w};
    }
    for (action_t l : s.actions(q))
      for (state_t succ : ts.successors(q, l))
        if (s.is_blocking(succ)) {
          SafetyWitness w;
          w.kind = SafetyWitness::Kind::dead_successor;
          w.state = q;
          w.action = l;
          w.successor = succ;
          return {false, w};
        }
  }
  return {};
}

SafetySynthesisResult maximal_safety_controller(const TransitionSystem& ts,
                                                const RegionView& safe, unsigned threads) {
  const state_t n = ts.num_states();
  const std::vector<char> safe_state = safe_flags(ts, safe, threads);
  state_t domain = 0;
  for (state_t q = 0; q < n; ++q) domain += safe_state[q];

  std::vector<std::uint64_t> cur(n, 0);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q)
      if (safe_state[q]) cur[q] = enabled_mask(ts, static_cast<state_t>(q));
  });

  std::vector<std::uint64_t> next(n, 0);
  std::uint32_t sweeps = 0;
  while (true) {
    /* one synchronous sweep against the previous iterate */
    std::atomic<bool> changed{false};
    parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
      bool local = false;
      for (std::size_t q = begin; q < end; ++q) {
        std::uint64_t keep = 0;
        for (std::uint64_t m = cur[q]; m != 0; m &= m - 1) {
          const auto l = static_cast<action_t>(std::countr_zero(m));
          bool alive = true;
          for (state_t succ : ts.successors(static_cast<state_t>(q), l))
            if (cur[succ] == 0) {
              alive = false;
              break;
            }
          if (alive) keep |= std::uint64_t{1} << l;
        }
        next[q] = keep;
        local |= keep != cur[q];
      }
      if (local) changed.store(true, std::memory_order_relaxed);
    });
    if (!changed.load()) break;
    ++sweeps;
    cur.swap(next);
  }

  SafetySynthesisResult result{Controller(n, ts.num_actions(), std::move(cur)), sweeps, 1,
                               domain};
  return result;
}

Controller maximal_safety_controller_worklist(const TransitionSystem& ts,
                                              const RegionView& safe) {
  const state_t n = ts.num_states();
  const std::vector<char> safe_state = safe_flags(ts, safe, 1);

  Controller s(n, ts.num_actions());
  for (state_t q = 0; q < n; ++q)
    if (safe_state[q]) s.set_mask(q, enabled_mask(ts, q));

  /* reverse adjacency: incoming (state, action) edges per target */
  std::vector<std::uint32_t> rev_offsets(static_cast<std::size_t>(n) + 1, 0);
  for (state_t q = 0; q < n; ++q)
    for (action_t l = 0; l < ts.num_actions(); ++l)
      for (state_t succ : ts.successors(q, l)) ++rev_offsets[succ + 1];
  for (state_t q = 0; q < n; ++q) rev_offsets[q + 1] += rev_offsets[q];
  std::vector<std::pair<state_t, action_t>> rev(rev_offsets[n]);
  {
    std::vector<std::uint32_t> cursor(rev_offsets.begin(), rev_offsets.end() - 1);
    for (state_t q = 0; q < n; ++q)
      for (action_t l = 0; l < ts.num_actions(); ++l)
        for (state_t succ : ts.successors(q, l)) rev[cursor[succ]++] = {q, l};
  }

  std::vector<state_t> queue;
  for (state_t q = 0; q < n; ++q)
    if (s.is_blocking(q)) queue.push_back(q);
  while (!queue.empty()) {
    const state_t dead = queue.back();
    queue.pop_back();
    for (std::uint32_t i = rev_offsets[dead]; i < rev_offsets[dead + 1]; ++i) {
      const auto [q, l] = rev[i];
      if (!s.contains(q, l)) continue;
      s.erase(q, l);
      if (s.is_blocking(q)) queue.push_back(q);
    }
  }
  return s;
}

Controller concretize_safety(const Controller& s2, const FiniteRelation& r,
                             const TransitionSystem& t1) {
  if (r.num_left() != t1.num_states())
    throw std::invalid_argument("relation left side does not match the concrete system");
  if (r.num_right() != s2.num_states())
    throw std::invalid_argument("relation right side does not match the abstract controller");
  if (s2.num_actions() != t1.num_actions())
    throw std::invalid_argument("controller and system disagree on the action count");

  Controller s1(t1.num_states(), t1.num_actions());
  for (state_t q1 = 0; q1 < t1.num_states(); ++q1) {
    std::uint64_t m = 0;
    for (state_t q2 : r.image(q1)) m |= s2.mask(q2);
    s1.set_mask(q1, m);
  }
  return s1;
}

SafetySandwich safety_sandwich(const TransitionSystem& t1, const TransitionSystem& t2,
                               const FiniteRelation& r, double epsilon, const Region& safe,
                               unsigned threads) {
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("epsilon must be nonnegative");
  SafetySynthesisResult contracted =
      maximal_safety_controller(t2, {safe, epsilon, 0.0}, threads);
  SafetySynthesisResult expanded =
      maximal_safety_controller(t2, {safe, 0.0, epsilon}, threads);
  Controller s1 = concretize_safety(contracted.controller, r, t1);
  Controller s1_expanded = concretize_safety(expanded.controller, r, t1);

  const bool ordered = is_more_permissive(s1_expanded, s1);
  SafetyCheckResult s1_safe = is_safety_controller(t1, s1, {safe, 0.0, 0.0});
  SafetyCheckResult s1_expanded_safe =
      is_safety_controller(t1, s1_expanded, {safe, 0.0, 2.0 * epsilon});
  return {std::move(s1),       std::move(s1_expanded), std::move(contracted),
          std::move(expanded), ordered,                std::move(s1_safe),
          std::move(s1_expanded_safe)};
}

}  // namespace symctrl
