#include "symctrl/reachability.hpp"

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symctrl/parallel.hpp"

namespace symctrl {

namespace {

enum : std::uint8_t { outside = 0, safe_only = 1, in_target = 2 };

/* membership class per state; target membership is only honored inside the
 * safe set so the value iteration sees a nested pair even when a dim >= 3
 * under-approximation disagrees at the margin */
std::vector<std::uint8_t> classify_states(const TransitionSystem& ts, const RegionView& safe,
                                          const RegionView& target, unsigned threads) {
  if (safe.region.dim() != ts.dimension() || target.region.dim() != ts.dimension())
    throw std::invalid_argument("region dimension does not match the system outputs");
  if (!RegionView::contained_in(target, safe))
    throw std::invalid_argument("target region is not contained in the safe region");
  std::vector<std::uint8_t> flags(ts.num_states(), outside);
  parallel_chunks(ts.num_states(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      const auto o = ts.output(static_cast<state_t>(q));
      if (!safe.member(o)) continue;
      flags[q] = target.member(o) ? in_target : safe_only;
    }
  });
  return flags;
}

void require_nonblocking_on(const TransitionSystem& ts, const std::vector<std::uint8_t>& flags,
                            bool include_target) {
  for (state_t q = 0; q < ts.num_states(); ++q) {
    if (flags[q] == outside) continue;
    if (flags[q] == in_target && !include_target) continue;
    if (ts.is_blocking(q))
      throw blocking_state_error(
          "state " + std::to_string(q) + " blocks inside the safe region", q);
  }
}

/* one synchronous sweep at a time until nothing changes; values only ever
 * decrease, so the loop terminates */
template <typename PerState>
std::uint32_t iterate_values(std::vector<std::uint32_t>& cur,
                             const std::vector<std::uint8_t>& flags, unsigned threads,
                             PerState&& value_of) {
  const std::size_t n = cur.size();
  std::vector<std::uint32_t> next(cur);
  std::uint32_t sweeps = 0;
  while (true) {
    std::atomic<bool> changed{false};
    parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
      bool local = false;
      for (std::size_t q = begin; q < end; ++q) {
        if (flags[q] != safe_only) continue;
        const std::uint32_t v = value_of(static_cast<state_t>(q), cur);
        next[q] = v;
        local |= v != cur[q];
      }
      if (local) changed.store(true, std::memory_order_relaxed);
    });
    if (!changed.load()) break;
    ++sweeps;
    cur.swap(next);
  }
  return sweeps;
}

/* worst case over every transition the system still has */
std::uint32_t controlled_value(const TransitionSystem& ts, state_t q,
                               const std::vector<std::uint32_t>& cur) {
  bool any = false;
  std::uint32_t worst = 0;
  for (action_t l = 0; l < ts.num_actions(); ++l)
    for (state_t succ : ts.successors(q, l)) {
      any = true;
      const std::uint32_t v = cur[succ];
      if (v == time_infinity) return time_infinity;
      if (v > worst) worst = v;
    }
  if (!any) return time_infinity;
  return saturating_succ(worst);
}

/* least over enabled actions of one more than the worst successor value */
std::uint32_t optimal_value(const TransitionSystem& ts, state_t q,
                            const std::vector<std::uint32_t>& cur) {
  std::uint32_t best = time_infinity;
  for (action_t l = 0; l < ts.num_actions(); ++l) {
    const auto succs = ts.successors(q, l);
    if (succs.empty()) continue;
    std::uint32_t worst = 0;
    for (state_t succ : succs) {
      const std::uint32_t v = cur[succ];
      if (v == time_infinity) {
        worst = time_infinity;
        break;
      }
      if (v > worst) worst = v;
    }
    const std::uint32_t cand = saturating_succ(worst);
    if (cand < best) best = cand;
  }
  return best;
}

std::vector<std::uint32_t> initial_values(const std::vector<std::uint8_t>& flags) {
  std::vector<std::uint32_t> cur(flags.size());
  for (std::size_t q = 0; q < flags.size(); ++q)
    cur[q] = flags[q] == in_target ? 0 : time_infinity;
  return cur;
}

}  // namespace

ValueFunction entry_time(const TransitionSystem& ts, const RegionView& safe,
                         const RegionView& target, bool require_nonblocking,
                         unsigned threads) {
  const auto flags = classify_states(ts, safe, target, threads);
  if (require_nonblocking) require_nonblocking_on(ts, flags, false);
  auto cur = initial_values(flags);
  iterate_values(cur, flags, threads, [&ts](state_t q, const std::vector<std::uint32_t>& v) {
    return controlled_value(ts, q, v);
  });
  return {std::move(cur)};
}

ReachSynthesisResult time_optimal_controller(const TransitionSystem& ts,
                                             const RegionView& safe, const RegionView& target,
                                             unsigned threads) {
  const auto flags = classify_states(ts, safe, target, threads);
  require_nonblocking_on(ts, flags, true);
  state_t domain = 0;
  for (std::uint8_t f : flags) domain += f != outside;

  auto cur = initial_values(flags);
  const std::uint32_t sweeps =
      iterate_values(cur, flags, threads, [&ts](state_t q, const std::vector<std::uint32_t>& v) {
        return optimal_value(ts, q, v);
      });

  /* keep exactly the actions attaining the fixed-point value; on infinite
   * states inside the safe set every enabled action ties at infinity */
  const state_t n = ts.num_states();
  std::vector<std::uint64_t> masks(n, 0);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      if (flags[q] == outside) continue;
      std::uint32_t best = time_infinity;
      std::uint64_t mask = 0;
      for (action_t l = 0; l < ts.num_actions(); ++l) {
        const auto succs = ts.successors(static_cast<state_t>(q), l);
        if (succs.empty()) continue;
        std::uint32_t worst = 0;
        for (state_t succ : succs) {
          const std::uint32_t v = cur[succ];
          if (v == time_infinity) {
            worst = time_infinity;
            break;
          }
          if (v > worst) worst = v;
        }
        const std::uint32_t cand = saturating_succ(worst);
        if (cand < best) {
          best = cand;
          mask = std::uint64_t{1} << l;
        } else if (cand == best) {
          mask |= std::uint64_t{1} << l;
        }
      }
      masks[q] = mask;
    }
  });

  ReachSynthesisResult result{Controller(n, ts.num_actions(), std::move(masks)),
                              ValueFunction{std::move(cur)}, sweeps, 1, domain};
  return result;
}

Controller concretize_reachability(const Controller& s2, const ValueFunction& j2,
                                   const FiniteRelation& r, const TransitionSystem& t1,
                                   unsigned threads) {
  if (r.num_left() != t1.num_states())
    throw std::invalid_argument("relation left side does not match the concrete system");
  if (r.num_right() != s2.num_states())
    throw std::invalid_argument("relation right side does not match the abstract controller");
  if (s2.num_actions() != t1.num_actions())
    throw std::invalid_argument("controller and system disagree on the action count");
  if (j2.values.size() != s2.num_states())
    throw std::invalid_argument("value function does not match the abstract controller");

  const state_t n = t1.num_states();
  std::vector<std::uint64_t> masks(n, 0);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q1 = begin; q1 < end; ++q1) {
      const auto image = r.image(static_cast<state_t>(q1));
      if (image.empty()) continue;
      /* the image is ascending, so a strict improvement keeps the smallest
       * minimizer */
      state_t best_state = image[0];
      std::uint32_t best_value = j2.values[image[0]];
      for (state_t q2 : image.subspan(1))
        if (j2.values[q2] < best_value) {
          best_value = j2.values[q2];
          best_state = q2;
        }
      masks[q1] = s2.mask(best_state);
    }
  });
  return Controller(n, t1.num_actions(), std::move(masks));
}

ReachSandwich reachability_sandwich(const TransitionSystem& t1, const TransitionSystem& t2,
                                    const FiniteRelation& r, double epsilon,
                                    const Region& safe, const Region& target,
                                    unsigned threads, state_t chain_limit) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");

  ReachSynthesisResult contracted =
      time_optimal_controller(t2, {safe, epsilon, 0.0}, {target, epsilon, 0.0}, threads);
  ReachSynthesisResult expanded =
      time_optimal_controller(t2, {safe, 0.0, epsilon}, {target, 0.0, epsilon}, threads);
  Controller s1 = concretize_reachability(contracted.controller, contracted.value, r, t1, threads);
  Controller s1_expanded =
      concretize_reachability(expanded.controller, expanded.value, r, t1, threads);

  ValueFunction j_upper = entry_time(apply_controller(t1, s1), {safe, 0.0, 0.0},
                                     {target, 0.0, 0.0}, false, threads);
  ValueFunction j_lower =
      entry_time(apply_controller(t1, s1_expanded), {safe, 0.0, 2.0 * epsilon},
                 {target, 0.0, 2.0 * epsilon}, false, threads);

  const state_t n1 = t1.num_states();
  bool lower_le_upper = true;
  for (state_t q1 = 0; q1 < n1; ++q1)
    lower_le_upper &= j_lower.values[q1] <= j_upper.values[q1];

  bool chain_checked = false;
  bool chain_ok = false;
  if (n1 <= chain_limit) {
    chain_checked = true;
    /* optimum of the plain problem directly on t1, tolerating states the
     * domain restriction leaves blocking */
    const auto flags = classify_states(t1, {safe, 0.0, 0.0}, {target, 0.0, 0.0}, threads);
    auto optimum = initial_values(flags);
    iterate_values(optimum, flags, threads,
                   [&t1](state_t q, const std::vector<std::uint32_t>& v) {
                     return optimal_value(t1, q, v);
                   });

    auto image_min = [&](const std::vector<std::uint32_t>& v) {
      std::vector<std::uint32_t> m(n1, time_infinity);
      for (state_t q1 = 0; q1 < n1; ++q1)
        for (state_t q2 : r.image(q1))
          if (v[q2] < m[q1]) m[q1] = v[q2];
      return m;
    };
    const auto min_contracted = image_min(contracted.value.values);
    const auto min_expanded = image_min(expanded.value.values);

    chain_ok = true;
    for (state_t q1 = 0; q1 < n1; ++q1) {
      chain_ok &= j_lower.values[q1] <= min_expanded[q1];
      chain_ok &= min_expanded[q1] <= optimum[q1];
      chain_ok &= optimum[q1] <= j_upper.values[q1];
      chain_ok &= j_upper.values[q1] <= min_contracted[q1];
    }
  }

  return {std::move(s1),
          std::move(s1_expanded),
          std::move(contracted),
          std::move(expanded),
          std::move(j_upper),
          std::move(j_lower),
          lower_le_upper,
          chain_checked,
          chain_ok};
}

}  // namespace symctrl
