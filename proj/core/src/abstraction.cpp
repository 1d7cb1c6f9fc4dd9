#include "symctrl/abstraction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "symctrl/parallel.hpp"

namespace symctrl {

namespace {

void validate_config(const AbstractionConfig& cfg) {
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) {
    throw config_error("sampling period must be positive and finite");
  }
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw config_error("precision must be positive and finite");
  }
}

/* Visits the grid states whose centers lie within eps of x, in ascending
 * index order, using squared distances. f(q) returning true stops the walk.
 * The per-dimension window carries one slack cell on each side, matching the
 * enumeration the grid itself uses. */
template <typename F>
void walk_ball(const UniformGrid& g, std::span<const double> x, double eps, F&& f) {
  const std::span<const double> spacing = g.spacing();
  const std::span<const std::uint32_t> counts = g.counts();
  const Box& dom = g.domain();
  const std::size_t d = spacing.size();

  std::vector<std::uint32_t> lo_c(d), width(d), cur(d, 0);
  /* per dimension, squared gaps between x and the candidate centers */
  std::vector<std::vector<double>> gap2(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double lo = dom.lo[k];
    const double eta = spacing[k];
    const double n = counts[k];
    double a = std::floor((x[k] - eps - lo) / eta - 0.5) - 1.0;
    double b = std::floor((x[k] + eps - lo) / eta - 0.5) + 1.0;
    a = std::clamp(a, 0.0, n - 1.0);
    b = std::clamp(b, 0.0, n - 1.0);
    lo_c[k] = static_cast<std::uint32_t>(a);
    width[k] = static_cast<std::uint32_t>(b) - lo_c[k] + 1;
    gap2[k].resize(width[k]);
    for (std::uint32_t c = 0; c < width[k]; ++c) {
      const double center =
          std::min(lo + (lo_c[k] + c + 0.5) * eta, dom.hi[k]);
      const double gap = center - x[k];
      gap2[k][c] = gap * gap;
    }
  }

  std::vector<std::uint64_t> stride(d);
  std::uint64_t s = 1;
  for (std::size_t k = 0; k < d; ++k) {
    stride[k] = s;
    s *= counts[k];
  }
  std::uint64_t base = 0;
  for (std::size_t k = 0; k < d; ++k) base += stride[k] * lo_c[k];

  const double eps2 = eps * eps;
  std::uint64_t q = base;
  for (;;) {
    double dist2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) dist2 += gap2[k][cur[k]];
    if (dist2 <= eps2 && f(static_cast<state_t>(q))) return;
    std::size_t k = 0;
    while (k < d && cur[k] + 1 == width[k]) {
      q -= stride[k] * cur[k];
      cur[k] = 0;
      ++k;
    }
    if (k == d) return;
    ++cur[k];
    q += stride[k];
  }
}

double l2_gap(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double g = a[k] - b[k];
    s += g * g;
  }
  return std::sqrt(s);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double draw_in(std::mt19937_64& eng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(eng);
}

}  // namespace

TransitionSystem build_abstraction(const SwitchedSystem& sys, const AbstractionConfig& cfg,
                                   unsigned threads) {
  validate_config(cfg);
  if (sys.dim != cfg.grid.dim()) {
    throw config_error("grid dimension does not match the system");
  }
  if (sys.modes.size() > Controller::max_actions) {
    throw config_error("more modes than an action mask can hold");
  }
  const FlowMap flow(sys, cfg.tau);
  const UniformGrid& grid = cfg.grid;
  const state_t n = grid.num_points();
  const action_t m = static_cast<action_t>(sys.modes.size());
  const int d = grid.dim();
  const std::size_t slots = static_cast<std::size_t>(n) * m;
  if (slots > (std::size_t{1} << 28)) {
    throw config_error("state-action table larger than the supported maximum");
  }

  /* sentinel n marks a disabled slot until compaction */
  std::vector<state_t> succ(slots);
  std::vector<double> outputs(static_cast<std::size_t>(n) * d);
  parallel_chunks(n, threads, [&](std::size_t b, std::size_t e) {
    std::vector<double> x(static_cast<std::size_t>(d));
    std::vector<double> y(static_cast<std::size_t>(d));
    for (std::size_t q = b; q < e; ++q) {
      grid.center(static_cast<state_t>(q), x);
      std::copy(x.begin(), x.end(), outputs.begin() + q * d);
      for (action_t p = 0; p < m; ++p) {
        flow.step(p, x, y);
        const std::optional<state_t> hit = grid.nearest(y);
        succ[q * m + p] = hit ? *hit : n;
      }
    }
  });

  std::vector<std::uint32_t> offsets(slots + 1);
  offsets[0] = 0;
  std::uint32_t total = 0;
  for (std::size_t s = 0; s < slots; ++s) {
    total += succ[s] != n;
    offsets[s + 1] = total;
  }
  std::vector<state_t> targets;
  targets.reserve(total);
  for (std::size_t s = 0; s < slots; ++s) {
    if (succ[s] != n) targets.push_back(succ[s]);
  }
  succ.clear();
  succ.shrink_to_fit();
  return TransitionSystem::from_parts(n, m, d, Norm::l2, std::move(outputs),
                                      std::move(offsets), std::move(targets));
}

QuantizerRelation::QuantizerRelation(UniformGrid grid, double epsilon)
    : grid_(std::move(grid)), epsilon_(epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw config_error("quantizer precision must be nonnegative and finite");
  }
}

std::vector<state_t> QuantizerRelation::image(std::span<const double> x) const {
  std::vector<state_t> out;
  walk_ball(grid_, x, epsilon_, [&](state_t q) {
    out.push_back(q);
    return false;
  });
  return out;
}

bool QuantizerRelation::relates(std::span<const double> x, state_t q) const {
  const std::vector<double> c = grid_.center(q);
  if (x.size() != c.size()) {
    throw std::invalid_argument("point has the wrong dimension");
  }
  const double gap = l2_gap(x, c);
  return gap * gap <= epsilon_ * epsilon_;
}

bool QuantizerRelation::covers_domain() const {
  double s = 0.0;
  for (const double eta : grid_.spacing()) s += (eta / 2.0) * (eta / 2.0);
  return std::sqrt(s) <= epsilon_;
}

FiniteRelation quantizer_pairs(const TransitionSystem& left, const QuantizerRelation& r) {
  if (left.dimension() != r.grid().dim()) {
    throw std::invalid_argument("system dimension does not match the grid");
  }
  std::vector<std::pair<state_t, state_t>> pairs;
  for (state_t q1 = 0; q1 < left.num_states(); ++q1) {
    walk_ball(r.grid(), left.output(q1), r.epsilon(), [&](state_t q2) {
      pairs.emplace_back(q1, q2);
      return false;
    });
  }
  return FiniteRelation(left.num_states(), r.grid().num_points(), std::move(pairs));
}

PrecisionReport validate_precision(const SwitchedSystem& sys, const AbstractionConfig& cfg,
                                   int refinement, std::uint64_t samples,
                                   std::uint64_t seed, unsigned threads,
                                   state_t explicit_limit) {
  validate_config(cfg);
  if (refinement < 1) {
    throw config_error("refinement factor must be at least 1");
  }
  const TransitionSystem coarse = build_abstraction(sys, cfg, threads);
  std::vector<double> fine_spacing(cfg.grid.spacing().begin(), cfg.grid.spacing().end());
  for (double& eta : fine_spacing) eta /= refinement;
  const AbstractionConfig fine_cfg{cfg.tau, cfg.epsilon,
                                   UniformGrid(cfg.grid.domain(), fine_spacing)};
  const QuantizerRelation quant(cfg.grid, cfg.epsilon);
  const action_t m = coarse.num_actions();

  PrecisionReport rep;
  bool structural_ok = false;
  /* held in an optional so the refined system is released before the
   * trajectory phase; at deep refinements it dominates the footprint */
  std::optional<TransitionSystem> fine_store = build_abstraction(sys, fine_cfg, threads);
  const TransitionSystem& fine = *fine_store;
  if (fine.num_states() <= explicit_limit) {
    rep.explicit_check = true;
    FiniteRelation r = [&] {
      if (refinement == 1) {
        std::vector<std::pair<state_t, state_t>> idpairs;
        idpairs.reserve(fine.num_states());
        for (state_t q = 0; q < fine.num_states(); ++q) idpairs.emplace_back(q, q);
        return FiniteRelation(fine.num_states(), coarse.num_states(), std::move(idpairs));
      }
      return quantizer_pairs(fine, quant);
    }();
    const BisimVerdict verdict =
        check_bisimulation(fine, coarse, r, cfg.epsilon, 0.0, threads);
    rep.relation_ok = verdict.relation_ok;
    rep.relation_total = verdict.bisimilar_ok;
    rep.witness = verdict.witness;
    rep.pairs_checked = r.num_pairs();
    structural_ok = verdict.bisimilar_ok;
  } else {
    /* Seeded fine states, each tested against every quantizer partner for
     * matching one-step behavior in both directions. A missing action whose
     * flow leaves the grid domain is truncation, not a matching failure:
     * build_abstraction disables actions for that reason alone, so the flow
     * recomputation classifies the mismatch exactly. */
    const FlowMap truncation_flow(sys, cfg.tau);
    std::mt19937_64 pick_eng(seed);
    std::vector<state_t> picks(samples);
    if (fine.num_states() > 0) {
      std::uniform_int_distribution<state_t> pick(0, fine.num_states() - 1);
      for (state_t& q : picks) q = pick(pick_eng);
    }
    std::vector<std::optional<BisimWitness>> wit(samples);
    std::vector<std::uint64_t> pair_count(samples, 0);
    std::vector<std::uint64_t> failures(samples, 0);
    std::vector<std::uint64_t> skips(samples, 0);
    parallel_chunks(samples, threads, [&](std::size_t b, std::size_t e) {
      std::vector<double> y(static_cast<std::size_t>(cfg.grid.dim()));
      const auto leaves_domain = [&](std::span<const double> from, action_t p) {
        truncation_flow.step(p, from, y);
        return !cfg.grid.in_domain(y);
      };
      for (std::size_t i = b; i < e; ++i) {
        const state_t q1 = picks[i];
        const std::span<const double> x = fine.output(q1);
        std::vector<state_t> img;
        if (refinement == 1) {
          img.push_back(q1);
        } else {
          img = quant.image(x);
        }
        pair_count[i] = img.size();
        if (img.empty()) {
          failures[i] = 1;
          wit[i] = BisimWitness{BisimViolationKind::uncovered_left, q1, 0, 0, 0, 0.0};
          continue;
        }
        for (const state_t q2 : img) {
          for (action_t p = 0; p < m; ++p) {
            const bool e1 = fine.is_enabled(q1, p);
            const bool e2 = coarse.is_enabled(q2, p);
            std::optional<BisimWitness> bad;
            if (e1 && !e2) {
              if (leaves_domain(coarse.output(q2), p)) {
                ++skips[i];
              } else {
                bad = BisimWitness{BisimViolationKind::forward_matching, q1, q2, p,
                                   fine.successors(q1, p)[0], 0.0};
              }
            } else if (!e1 && e2) {
              if (leaves_domain(x, p)) {
                ++skips[i];
              } else {
                bad = BisimWitness{BisimViolationKind::backward_matching, q1, q2, p,
                                   coarse.successors(q2, p)[0], 0.0};
              }
            } else if (e1 && e2) {
              const state_t s1 = fine.successors(q1, p)[0];
              const state_t s2 = coarse.successors(q2, p)[0];
              if (l2_gap(fine.output(s1), coarse.output(s2)) > cfg.epsilon) {
                bad = BisimWitness{BisimViolationKind::forward_matching, q1, q2, p, s1, 0.0};
              }
            }
            if (bad) {
              ++failures[i];
              if (!wit[i]) wit[i] = bad;
            }
          }
        }
      }
    });
    for (std::size_t i = 0; i < samples; ++i) {
      rep.pairs_checked += pair_count[i];
      rep.pair_failures += failures[i];
      rep.boundary_skips += skips[i];
      if (!rep.witness && wit[i]) rep.witness = wit[i];
    }
    structural_ok = rep.pair_failures == 0;
  }
  fine_store.reset();

  /* concrete trajectories under exact flow against the abstract runs that
   * share their mode sequence */
  const FlowMap flow(sys, cfg.tau);
  const Box& dom = cfg.grid.domain();
  const std::size_t d = static_cast<std::size_t>(cfg.grid.dim());
  const std::size_t horizon = 50;
  rep.trajectories = samples;
  std::vector<double> worst(samples, 0.0);
  parallel_chunks(samples, threads, [&](std::size_t b, std::size_t e) {
    std::vector<double> x(d), y(d);
    for (std::size_t t = b; t < e; ++t) {
      std::mt19937_64 eng(mix_seed(seed, t));
      for (std::size_t k = 0; k < d; ++k) x[k] = draw_in(eng, dom.lo[k], dom.hi[k]);
      state_t q = *cfg.grid.nearest(x);
      double dev = l2_gap(x, coarse.output(q));
      for (std::size_t s = 0; s < horizon; ++s) {
        const std::vector<action_t> enabled = coarse.enabled(q);
        if (enabled.empty()) break;
        const action_t p =
            enabled[std::uniform_int_distribution<std::size_t>(0, enabled.size() - 1)(eng)];
        flow.step(p, x, y);
        x = y;
        q = coarse.successors(q, p)[0];
        dev = std::max(dev, l2_gap(x, coarse.output(q)));
      }
      worst[t] = dev;
    }
  });
  for (const double dev : worst) rep.max_deviation = std::max(rep.max_deviation, dev);
  rep.deviation_ok = rep.max_deviation <= cfg.epsilon;
  rep.pass = structural_ok && rep.deviation_ok;
  return rep;
}

DomainMarginReport check_domain_margin(const SwitchedSystem& sys, const AbstractionConfig& cfg,
                                       const Region& spec, std::uint64_t samples,
                                       std::uint64_t seed) {
  validate_config(cfg);
  if (spec.dim() != cfg.grid.dim()) {
    throw config_error("specification dimension does not match the grid");
  }
  const FlowMap flow(sys, cfg.tau);
  const Box& dom = cfg.grid.domain();
  const std::size_t d = static_cast<std::size_t>(cfg.grid.dim());

  DomainMarginReport rep;
  rep.flow_step_bound.assign(d, 0.0);
  std::mt19937_64 eng(seed);
  std::vector<double> x(d), y(d);
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (std::size_t k = 0; k < d; ++k) x[k] = draw_in(eng, dom.lo[k], dom.hi[k]);
    for (std::size_t p = 0; p < flow.num_modes(); ++p) {
      flow.step(p, x, y);
      for (std::size_t k = 0; k < d; ++k) {
        rep.flow_step_bound[k] = std::max(rep.flow_step_bound[k], std::abs(y[k] - x[k]));
      }
    }
  }

  const auto contained = [&](bool add_step_bound) {
    for (const Box& b : spec.boxes()) {
      for (std::size_t k = 0; k < d; ++k) {
        const double margin = 2.0 * cfg.epsilon + (add_step_bound ? rep.flow_step_bound[k] : 0.0);
        if (b.lo[k] - margin < dom.lo[k] || b.hi[k] + margin > dom.hi[k]) return false;
      }
    }
    return true;
  };
  rep.contains_expansion = contained(false);
  rep.contains_flow_margin = contained(true);
  return rep;
}

ConcreteController::ConcreteController(Controller table, UniformGrid grid, double epsilon)
    : table_(std::move(table)),
      value_{},
      grid_(std::move(grid)),
      epsilon_(epsilon),
      objective_(ControlObjective::safety) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw config_error("quantizer precision must be nonnegative and finite");
  }
  if (table_.num_states() != grid_.num_points()) {
    throw std::invalid_argument("controller size does not match the grid");
  }
}

ConcreteController::ConcreteController(Controller table, ValueFunction value,
                                       UniformGrid grid, double epsilon)
    : table_(std::move(table)),
      value_(std::move(value)),
      grid_(std::move(grid)),
      epsilon_(epsilon),
      objective_(ControlObjective::reach) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw config_error("quantizer precision must be nonnegative and finite");
  }
  if (table_.num_states() != grid_.num_points()) {
    throw std::invalid_argument("controller size does not match the grid");
  }
  if (value_.values.size() != grid_.num_points()) {
    throw std::invalid_argument("value function size does not match the grid");
  }
}

ConcreteQuery ConcreteController::query(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(grid_.dim())) {
    throw std::invalid_argument("point has the wrong dimension");
  }
  ConcreteQuery res;
  if (objective_ == ControlObjective::safety) {
    walk_ball(grid_, x, epsilon_, [&](state_t q) {
      res.covered = true;
      res.mask |= table_.mask(q);
      return false;
    });
    return res;
  }
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  bool found = false;
  walk_ball(grid_, x, epsilon_, [&](state_t q) {
    const std::uint32_t v = value_.values[q];
    if (!found || v < best) {
      found = true;
      best = v;
      res.anchor = q;
    }
    return false;
  });
  if (found) {
    res.covered = true;
    res.mask = table_.mask(res.anchor);
  }
  return res;
}

bool ConcreteController::permits(std::span<const double> x, action_t mode) const {
  if (mode >= table_.num_actions()) {
    throw std::out_of_range("mode index out of range");
  }
  if (objective_ == ControlObjective::reach) {
    return (query(x).mask >> mode) & 1;
  }
  if (x.size() != static_cast<std::size_t>(grid_.dim())) {
    throw std::invalid_argument("point has the wrong dimension");
  }
  /* the nearest cell usually answers alone, so probe it before the walk */
  if (const std::optional<state_t> near = grid_.nearest(x)) {
    const std::vector<double> c = grid_.center(*near);
    const double gap = l2_gap(x, c);
    if (gap * gap <= epsilon_ * epsilon_ && ((table_.mask(*near) >> mode) & 1)) {
      return true;
    }
  }
  bool hit = false;
  walk_ball(grid_, x, epsilon_, [&](state_t q) {
    if ((table_.mask(q) >> mode) & 1) {
      hit = true;
      return true;
    }
    return false;
  });
  return hit;
}

ClosedLoopResult simulate_closed_loop(const FlowMap& flow, const ConcreteController& ctrl,
                                      std::span<const double> x0, std::size_t steps,
                                      SimPolicy policy, std::uint64_t seed) {
  const std::size_t d = static_cast<std::size_t>(flow.dim());
  if (ctrl.grid().dim() != flow.dim()) {
    throw std::invalid_argument("controller grid dimension does not match the flow");
  }
  if (ctrl.table().num_actions() != flow.num_modes()) {
    throw std::invalid_argument("controller mode count does not match the flow");
  }
  if (x0.size() != d) {
    throw std::invalid_argument("start point has the wrong dimension");
  }

  ClosedLoopResult res;
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> y(d);
  res.points.insert(res.points.end(), x.begin(), x.end());
  std::mt19937_64 eng(seed);
  bool have_prev = false;
  action_t prev = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    action_t mode;
    if (policy == SimPolicy::lazy && have_prev && ctrl.permits(x, prev)) {
      mode = prev;
    } else {
      const ConcreteQuery q = ctrl.query(x);
      if (!q.covered) {
        res.uncovered = true;
        break;
      }
      if (q.mask == 0) {
        res.blocked = true;
        break;
      }
      if (policy == SimPolicy::random_action) {
        std::vector<action_t> options;
        for (action_t l = 0; l < ctrl.table().num_actions(); ++l) {
          if ((q.mask >> l) & 1) options.push_back(l);
        }
        mode = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(eng)];
      } else {
        mode = static_cast<action_t>(std::countr_zero(q.mask));
      }
    }
    flow.step(mode, x, y);
    x = y;
    res.points.insert(res.points.end(), x.begin(), x.end());
    res.modes.push_back(mode);
    prev = mode;
    have_prev = true;
    ++res.steps_taken;
  }
  return res;
}

}  // namespace symctrl
