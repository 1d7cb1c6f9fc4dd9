#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "symctrl/abstraction.hpp"
#include "symctrl/affine.hpp"
#include "symctrl/grid.hpp"
#include "symctrl/types.hpp"

using namespace symctrl;

namespace {

SwitchedSystem one_mode(int dim, std::vector<double> a, std::vector<double> b) {
  return SwitchedSystem{dim, {AffineMode{std::move(a), std::move(b)}}};
}

SwitchedSystem drift_pair(double right, double left) {
  SwitchedSystem sys;
  sys.dim = 1;
  sys.modes.push_back(AffineMode{{0.0}, {right}});
  sys.modes.push_back(AffineMode{{0.0}, {left}});
  return sys;
}

/* all grid states whose centers fall within eps of x, by the same squared
 * comparison the quantizer uses */
std::vector<state_t> brute_image(const UniformGrid& g, std::span<const double> x, double eps) {
  std::vector<state_t> out;
  std::vector<double> c(static_cast<std::size_t>(g.dim()));
  for (state_t q = 0; q < g.num_points(); ++q) {
    g.center(q, c);
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += (c[k] - x[k]) * (c[k] - x[k]);
    if (s <= eps * eps) out.push_back(q);
  }
  return out;
}

/* centers near 0.0, 0.1, ..., 0.9 */
UniformGrid tenth_grid() { return UniformGrid(Box{{-0.05}, {0.93}}, {0.1}); }

}  // namespace

TEST_CASE("zero dynamics abstracts to self-loops on every mode") {
  SwitchedSystem sys;
  sys.dim = 2;
  sys.modes.push_back(AffineMode{{0, 0, 0, 0}, {0, 0}});
  sys.modes.push_back(AffineMode{{0, 0, 0, 0}, {0, 0}});
  const AbstractionConfig cfg{1.0, 0.1, UniformGrid(Box{{0.0, 0.0}, {1.0, 1.0}}, {0.25, 0.25})};
  const TransitionSystem ts = build_abstraction(sys, cfg);
  CHECK(ts.num_states() == cfg.grid.num_points());
  CHECK(ts.num_actions() == 2);
  CHECK(ts.dimension() == 2);
  CHECK(ts.norm() == Norm::l2);
  for (state_t q = 0; q < ts.num_states(); ++q) {
    for (action_t p = 0; p < 2; ++p) {
      const std::span<const state_t> succ = ts.successors(q, p);
      REQUIRE(succ.size() == 1);
      CHECK(succ[0] == q);
    }
    CHECK(ts.output(q)[0] == cfg.grid.center(q)[0]);
    CHECK(ts.output(q)[1] == cfg.grid.center(q)[1]);
  }
}

TEST_CASE("contracting line dynamics round to the hand-built successor table") {
  /* flow halves x over one period; centers -0.75, -0.25, 0.25, 0.75 */
  const SwitchedSystem sys = one_mode(1, {-1.0}, {0.0});
  const AbstractionConfig cfg{std::log(2.0), 0.3, UniformGrid(Box{{-1.0}, {0.75}}, {0.5})};
  const TransitionSystem ts = build_abstraction(sys, cfg);
  REQUIRE(ts.num_states() == 4);
  const std::vector<state_t> expected{1, 1, 2, 2};
  for (state_t q = 0; q < 4; ++q) {
    const std::span<const state_t> succ = ts.successors(q, 0);
    REQUIRE(succ.size() == 1);
    CHECK(succ[0] == expected[q]);
  }
}

TEST_CASE("successors stay within half a cell of the exact flow") {
  SwitchedSystem sys;
  sys.dim = 2;
  sys.modes.push_back(AffineMode{{-0.4, 0.2, -0.1, -0.5}, {0.05, -0.02}});
  sys.modes.push_back(AffineMode{{-0.6, 0.0, 0.3, -0.2}, {-0.04, 0.01}});
  const AbstractionConfig cfg{0.7, 0.2,
                              UniformGrid(Box{{-1.0, -1.0}, {1.0, 1.0}}, {0.2, 0.25})};
  const TransitionSystem ts = build_abstraction(sys, cfg);
  const FlowMap flow(sys, cfg.tau);
  std::vector<double> x(2), y(2);
  for (state_t q = 0; q < ts.num_states(); ++q) {
    cfg.grid.center(q, x);
    for (action_t p = 0; p < 2; ++p) {
      flow.step(p, x, y);
      const std::span<const state_t> succ = ts.successors(q, p);
      if (!cfg.grid.in_domain(y)) {
        CHECK(succ.empty());
        continue;
      }
      REQUIRE(succ.size() == 1);
      const std::span<const double> c = ts.output(succ[0]);
      CHECK(std::abs(c[0] - y[0]) <= 0.2 / 2.0 + 1e-12);
      CHECK(std::abs(c[1] - y[1]) <= 0.25 / 2.0 + 1e-12);
    }
  }
}

TEST_CASE("flow leaving the domain disables the mode") {
  const SwitchedSystem sys = drift_pair(0.3, -0.3);
  const AbstractionConfig cfg{1.0, 0.2, UniformGrid(Box{{0.0}, {1.0}}, {0.25})};
  const TransitionSystem ts = build_abstraction(sys, cfg);
  REQUIRE(ts.num_states() == 5);
  /* centers 0.125, 0.375, 0.625, 0.875, 1.0 */
  const std::vector<bool> right_on{true, true, true, false, false};
  const std::vector<bool> left_on{false, true, true, true, true};
  for (state_t q = 0; q < 5; ++q) {
    CHECK(ts.is_enabled(q, 0) == right_on[q]);
    CHECK(ts.is_enabled(q, 1) == left_on[q]);
  }
}

TEST_CASE("abstraction construction is deterministic across thread counts") {
  SwitchedSystem sys;
  sys.dim = 2;
  sys.modes.push_back(AffineMode{{-0.3, 0.1, 0.0, -0.4}, {0.02, 0.01}});
  sys.modes.push_back(AffineMode{{-0.2, -0.2, 0.2, -0.2}, {-0.01, 0.03}});
  const AbstractionConfig cfg{0.5, 0.1,
                              UniformGrid(Box{{-1.0, -1.0}, {1.0, 1.0}}, {0.02, 0.02})};
  const TransitionSystem seq = build_abstraction(sys, cfg, 1);
  const TransitionSystem par = build_abstraction(sys, cfg, 4);
  CHECK(seq == par);
  std::ostringstream a, b;
  seq.write_text(a);
  par.write_text(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("abstraction construction rejects malformed configs") {
  const SwitchedSystem sys = one_mode(1, {0.0}, {0.0});
  const UniformGrid line(Box{{0.0}, {1.0}}, {0.25});
  CHECK_THROWS_AS(build_abstraction(sys, {0.0, 0.1, line}), config_error);
  CHECK_THROWS_AS(build_abstraction(sys, {1.0, 0.0, line}), config_error);
  CHECK_THROWS_AS(
      build_abstraction(sys, {1.0, 0.1, UniformGrid(Box{{0.0, 0.0}, {1.0, 1.0}}, {0.25, 0.25})}),
      config_error);
  SwitchedSystem wide;
  wide.dim = 1;
  for (int p = 0; p < 65; ++p) wide.modes.push_back(AffineMode{{0.0}, {0.0}});
  CHECK_THROWS_AS(build_abstraction(wide, {1.0, 0.1, line}), config_error);
  CHECK_THROWS_AS(
      build_abstraction(sys, {1.0, 0.1, UniformGrid(Box{{0.0}, {3.0e8}}, {1.0})}),
      config_error);
}

TEST_CASE("quantizer images enumerate the epsilon ball") {
  const QuantizerRelation half(tenth_grid(), 0.05);
  CHECK(half.image(std::vector<double>{0.14}) == std::vector<state_t>{1});
  CHECK(half.relates(std::vector<double>{0.14}, 1));
  CHECK_FALSE(half.relates(std::vector<double>{0.14}, 2));

  const QuantizerRelation full(tenth_grid(), 0.1);
  CHECK(full.image(std::vector<double>{0.14}) == (std::vector<state_t>{1, 2}));

  /* a point sitting on a grid state relates to it even at radius zero */
  const QuantizerRelation zero(tenth_grid(), 0.0);
  const std::vector<double> on = zero.grid().center(3);
  CHECK(zero.image(on) == std::vector<state_t>{3});
  CHECK(zero.relates(on, 3));

  CHECK_THROWS_AS(QuantizerRelation(tenth_grid(), -0.1), config_error);
  CHECK_THROWS_AS(half.relates(std::vector<double>{0.1, 0.2}, 0), std::invalid_argument);
}

TEST_CASE("quantizer coverage needs the half diagonal of a cell") {
  CHECK(QuantizerRelation(tenth_grid(), 0.05).covers_domain());
  CHECK_FALSE(QuantizerRelation(tenth_grid(), 0.049).covers_domain());
  const UniformGrid plane(Box{{0.0, 0.0}, {1.0, 1.0}}, {0.1, 0.1});
  CHECK(QuantizerRelation(plane, 0.08).covers_domain());
  CHECK_FALSE(QuantizerRelation(plane, 0.07).covers_domain());
}

TEST_CASE("quantizer images agree with exhaustive enumeration") {
  const UniformGrid g(Box{{-0.5, 0.0}, {0.5, 1.0}}, {0.07, 0.11});
  const QuantizerRelation quant(g, 0.15);
  std::mt19937_64 eng(408);
  std::uniform_real_distribution<double> ux(-0.7, 0.7);
  std::uniform_real_distribution<double> uy(-0.2, 1.2);
  for (int rep = 0; rep < 200; ++rep) {
    const std::vector<double> x{ux(eng), uy(eng)};
    CHECK(quant.image(x) == brute_image(g, x, 0.15));
  }
}

TEST_CASE("explicit quantizer pairs mirror the implicit images") {
  const SwitchedSystem sys = one_mode(1, {-1.0}, {0.0});
  const AbstractionConfig cfg{1.0, 0.12, UniformGrid(Box{{-1.0}, {1.0}}, {0.1})};
  const TransitionSystem ts = build_abstraction(sys, cfg);
  const QuantizerRelation quant(cfg.grid, cfg.epsilon);
  const FiniteRelation r = quantizer_pairs(ts, quant);
  CHECK(r.num_left() == ts.num_states());
  CHECK(r.num_right() == cfg.grid.num_points());
  for (state_t q1 = 0; q1 < ts.num_states(); ++q1) {
    const std::span<const state_t> got = r.image(q1);
    const std::vector<state_t> want = quant.image(ts.output(q1));
    CHECK(std::equal(got.begin(), got.end(), want.begin(), want.end()));
  }

  const TransitionSystem plane = build_abstraction(
      SwitchedSystem{2, {AffineMode{{0, 0, 0, 0}, {0, 0}}}},
      {1.0, 0.3, UniformGrid(Box{{0.0, 0.0}, {1.0, 1.0}}, {0.5, 0.5})});
  CHECK_THROWS_AS(quantizer_pairs(plane, quant), std::invalid_argument);
}

TEST_CASE("identity refinement validates trivially") {
  const SwitchedSystem sys = one_mode(1, {-1.0}, {0.0});
  const AbstractionConfig cfg{0.5, 0.3, UniformGrid(Box{{-1.0}, {1.0}}, {0.25})};
  const PrecisionReport rep = validate_precision(sys, cfg, 1, 200, 42);
  CHECK(rep.pass);
  CHECK(rep.explicit_check);
  CHECK(rep.relation_ok);
  CHECK(rep.relation_total);
  CHECK_FALSE(rep.witness.has_value());
  CHECK(rep.pairs_checked == cfg.grid.num_points());
  CHECK(rep.trajectories == 200);
  CHECK(rep.deviation_ok);
}

TEST_CASE("fine spacing against a stable system validates with margin") {
  const SwitchedSystem sys = one_mode(1, {-1.0}, {0.0});
  const AbstractionConfig cfg{1.0, 0.2, UniformGrid(Box{{-1.0}, {1.0}}, {0.05})};
  const PrecisionReport rep = validate_precision(sys, cfg, 4, 300, 42);
  CHECK(rep.pass);
  CHECK(rep.explicit_check);
  CHECK(rep.relation_ok);
  CHECK(rep.relation_total);
  CHECK(rep.max_deviation < 0.2);
  CHECK(rep.max_deviation > 0.0);
}

TEST_CASE("coarse spacing against expanding dynamics fails with a witness") {
  const SwitchedSystem sys = one_mode(1, {1.0}, {0.0});
  const AbstractionConfig cfg{1.0, 0.25, UniformGrid(Box{{-1.0}, {1.0}}, {0.4})};
  const PrecisionReport rep = validate_precision(sys, cfg, 4, 200, 42);
  CHECK_FALSE(rep.pass);
  CHECK(rep.explicit_check);
  CHECK_FALSE(rep.relation_ok);
  REQUIRE(rep.witness.has_value());
  const bool matching = rep.witness->kind == BisimViolationKind::forward_matching ||
                        rep.witness->kind == BisimViolationKind::backward_matching;
  CHECK(matching);
}

TEST_CASE("sampled validation matches the explicit verdicts") {
  const SwitchedSystem stable = one_mode(1, {-1.0}, {0.0});
  const AbstractionConfig fine{1.0, 0.2, UniformGrid(Box{{-1.0}, {1.0}}, {0.05})};
  const PrecisionReport good = validate_precision(stable, fine, 4, 300, 42, 1, 0);
  CHECK(good.pass);
  CHECK_FALSE(good.explicit_check);
  CHECK(good.pair_failures == 0);
  CHECK(good.pairs_checked > 0);

  const SwitchedSystem unstable = one_mode(1, {1.0}, {0.0});
  const AbstractionConfig coarse{1.0, 0.25, UniformGrid(Box{{-1.0}, {1.0}}, {0.4})};
  const PrecisionReport bad = validate_precision(unstable, coarse, 4, 200, 42, 1, 0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.pair_failures > 0);
  CHECK(bad.witness.has_value());
}

TEST_CASE("sampled validation skips truncation mismatches at the boundary") {
  /* contraction toward x = 2 keeps matched successors close, but every flow
   * near the right edge leaves [0, 1], so enabled sets disagree there */
  const SwitchedSystem sys = one_mode(1, {-1.0}, {2.0});
  const AbstractionConfig cfg{0.5, 0.25, UniformGrid(Box{{0.0}, {1.0}}, {0.1})};
  const PrecisionReport rep = validate_precision(sys, cfg, 2, 400, 11, 1, 0);
  CHECK(rep.pass);
  CHECK_FALSE(rep.explicit_check);
  CHECK(rep.pair_failures == 0);
  CHECK(rep.boundary_skips > 0);
  CHECK_FALSE(rep.witness.has_value());
  CHECK(rep.deviation_ok);
  CHECK(rep.max_deviation < 0.15);

  /* the explicit path has no flow information and counts the same
   * mismatches against the relation */
  const PrecisionReport strict = validate_precision(sys, cfg, 2, 400, 11);
  CHECK(strict.explicit_check);
  CHECK_FALSE(strict.pass);
  CHECK_FALSE(strict.relation_ok);
  REQUIRE(strict.witness.has_value());
  const bool matching = strict.witness->kind == BisimViolationKind::forward_matching ||
                        strict.witness->kind == BisimViolationKind::backward_matching;
  CHECK(matching);
}

TEST_CASE("validation reports are deterministic across thread counts") {
  const SwitchedSystem sys = one_mode(1, {-1.0}, {0.0});
  const AbstractionConfig cfg{1.0, 0.2, UniformGrid(Box{{-1.0}, {1.0}}, {0.05})};
  const PrecisionReport a = validate_precision(sys, cfg, 4, 300, 7, 1, 0);
  const PrecisionReport b = validate_precision(sys, cfg, 4, 300, 7, 4, 0);
  CHECK(a.pass == b.pass);
  CHECK(a.pairs_checked == b.pairs_checked);
  CHECK(a.pair_failures == b.pair_failures);
  CHECK(a.max_deviation == b.max_deviation);
  CHECK_THROWS_AS(validate_precision(sys, cfg, 0, 10, 1), config_error);
}

TEST_CASE("domain margin report accounts for expansion and flow movement") {
  const SwitchedSystem sys = one_mode(2, {0, 0, 0, 0}, {0.1, 0.0});
  const AbstractionConfig cfg{1.0, 0.05,
                              UniformGrid(Box{{0.0, 0.0}, {1.0, 1.0}}, {0.05, 0.05})};
  const Region inner(2, Norm::l2, {Box{{0.3, 0.3}, {0.7, 0.7}}});
  const DomainMarginReport rep = check_domain_margin(sys, cfg, inner, 500, 11);
  CHECK(rep.contains_expansion);
  CHECK(rep.contains_flow_margin);
  REQUIRE(rep.flow_step_bound.size() == 2);
  CHECK(rep.flow_step_bound[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rep.flow_step_bound[1] == doctest::Approx(0.0).epsilon(1e-12));

  const Region wide(2, Norm::l2, {Box{{0.05, 0.05}, {0.95, 0.95}}});
  const DomainMarginReport tight = check_domain_margin(sys, cfg, wide, 500, 11);
  CHECK_FALSE(tight.contains_expansion);
  CHECK_FALSE(tight.contains_flow_margin);

  /* margin only fails once the step bound is added */
  const Region edge(2, Norm::l2, {Box{{0.15, 0.15}, {0.85, 0.85}}});
  const DomainMarginReport partial = check_domain_margin(sys, cfg, edge, 500, 11);
  CHECK(partial.contains_expansion);
  CHECK_FALSE(partial.contains_flow_margin);

  const Region flat(1, Norm::l2, {Box{{0.0}, {1.0}}});
  CHECK_THROWS_AS(check_domain_margin(sys, cfg, flat, 10, 1), config_error);
}

TEST_CASE("safety queries union the table over the epsilon ball") {
  const UniformGrid g = tenth_grid();
  Controller table(g.num_points(), 2);
  table.insert(1, 0);
  table.insert(2, 1);
  const ConcreteController ctrl(table, g, 0.1);
  CHECK(ctrl.objective() == ControlObjective::safety);

  const ConcreteQuery both = ctrl.query(std::vector<double>{0.14});
  CHECK(both.covered);
  CHECK(both.mask == 0b11);
  CHECK(ctrl.permits(std::vector<double>{0.14}, 0));
  CHECK(ctrl.permits(std::vector<double>{0.14}, 1));

  const ConcreteQuery low = ctrl.query(std::vector<double>{0.04});
  CHECK(low.covered);
  CHECK(low.mask == 0b01);
  CHECK_FALSE(ctrl.permits(std::vector<double>{0.04}, 1));

  const ConcreteQuery far = ctrl.query(std::vector<double>{2.0});
  CHECK_FALSE(far.covered);
  CHECK(far.mask == 0);
  CHECK_FALSE(ctrl.permits(std::vector<double>{2.0}, 0));

  /* covered but empty: the ball only reaches states with empty sets */
  const ConcreteQuery blocked = ctrl.query(std::vector<double>{0.54});
  CHECK(blocked.covered);
  CHECK(blocked.mask == 0);
}

TEST_CASE("reach queries follow the value minimum with ties downward") {
  const UniformGrid g = tenth_grid();
  const state_t n = g.num_points();
  Controller table(n, 2);
  table.insert(1, 0);
  table.insert(2, 1);
  ValueFunction j;
  j.values.assign(n, time_infinity);
  j.values[1] = 5;
  j.values[2] = 3;
  const ConcreteController ctrl(table, j, g, 0.1);
  CHECK(ctrl.objective() == ControlObjective::reach);

  const ConcreteQuery pick = ctrl.query(std::vector<double>{0.14});
  CHECK(pick.covered);
  CHECK(pick.anchor == 2);
  CHECK(pick.mask == 0b10);
  CHECK(ctrl.permits(std::vector<double>{0.14}, 1));
  CHECK_FALSE(ctrl.permits(std::vector<double>{0.14}, 0));

  ValueFunction tie;
  tie.values.assign(n, time_infinity);
  tie.values[1] = 3;
  tie.values[2] = 3;
  const ConcreteController tied(table, tie, g, 0.1);
  const ConcreteQuery t = tied.query(std::vector<double>{0.14});
  CHECK(t.anchor == 1);
  CHECK(t.mask == 0b01);

  /* every candidate unreachable: the lowest state anchors and usually blocks */
  ValueFunction inf;
  inf.values.assign(n, time_infinity);
  const ConcreteController hopeless(Controller(n, 2), inf, g, 0.1);
  const ConcreteQuery h = hopeless.query(std::vector<double>{0.14});
  CHECK(h.covered);
  CHECK(h.anchor == 1);
  CHECK(h.mask == 0);
}

TEST_CASE("concrete queries agree with exhaustive scans") {
  const UniformGrid g(Box{{-0.5, 0.0}, {0.5, 1.0}}, {0.09, 0.13});
  const state_t n = g.num_points();
  std::mt19937_64 eng(409);
  std::uniform_int_distribution<std::uint64_t> dmask(0, 7);
  std::uniform_int_distribution<std::uint32_t> dval(0, 6);
  Controller table(n, 3);
  ValueFunction j;
  j.values.resize(n);
  for (state_t q = 0; q < n; ++q) {
    table.set_mask(q, dmask(eng));
    const std::uint32_t v = dval(eng);
    j.values[q] = v == 6 ? time_infinity : v;
  }
  const ConcreteController safe(table, g, 0.2);
  const ConcreteController reach(table, j, g, 0.2);
  std::uniform_real_distribution<double> ux(-0.7, 0.7);
  std::uniform_real_distribution<double> uy(-0.2, 1.2);
  for (int rep = 0; rep < 300; ++rep) {
    const std::vector<double> x{ux(eng), uy(eng)};
    const std::vector<state_t> img = brute_image(g, x, 0.2);

    const ConcreteQuery s = safe.query(x);
    std::uint64_t want = 0;
    for (const state_t q : img) want |= table.mask(q);
    CHECK(s.covered == !img.empty());
    CHECK(s.mask == want);
    for (action_t l = 0; l < 3; ++l) {
      CHECK(safe.permits(x, l) == bool((want >> l) & 1));
    }

    const ConcreteQuery r = reach.query(x);
    CHECK(r.covered == !img.empty());
    if (!img.empty()) {
      state_t best = img[0];
      for (const state_t q : img) {
        if (j.values[q] < j.values[best]) best = q;
      }
      CHECK(r.anchor == best);
      CHECK(r.mask == table.mask(best));
    }
  }
}

TEST_CASE("concrete controllers reject mismatched shapes") {
  const UniformGrid g = tenth_grid();
  CHECK_THROWS_AS(ConcreteController(Controller(3, 2), g, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ConcreteController(Controller(g.num_points(), 2), g, -0.1), config_error);
  ValueFunction j;
  j.values.assign(3, 0);
  CHECK_THROWS_AS(ConcreteController(Controller(g.num_points(), 2), j, g, 0.1),
                  std::invalid_argument);
  const ConcreteController ok(Controller(g.num_points(), 2), g, 0.1);
  CHECK_THROWS_AS(ok.permits(std::vector<double>{0.1}, 2), std::out_of_range);
  CHECK_THROWS_AS(ok.query(std::vector<double>{0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("closed loop drift bounces between the two mode bands") {
  const SwitchedSystem sys = drift_pair(0.2, -0.2);
  const FlowMap flow(sys, 1.0);
  const UniformGrid g(Box{{0.0}, {1.0}}, {0.25});
  Controller table(g.num_points(), 2);
  for (state_t q = 0; q < g.num_points(); ++q) {
    table.insert(q, g.center(q)[0] <= 0.5 ? 0 : 1);
  }
  const ConcreteController ctrl(table, g, 0.2);
  const ClosedLoopResult run =
      simulate_closed_loop(flow, ctrl, std::vector<double>{0.1}, 9, SimPolicy::lazy);
  CHECK(run.steps_taken == 9);
  CHECK_FALSE(run.uncovered);
  CHECK_FALSE(run.blocked);
  CHECK(run.modes == (std::vector<action_t>{0, 0, 0, 1, 1, 0, 0, 1, 1}));
  REQUIRE(run.points.size() == 10);
  const std::vector<double> want{0.1, 0.3, 0.5, 0.7, 0.5, 0.3, 0.5, 0.7, 0.5, 0.3};
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(run.points[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("closed loop stops on uncovered or blocked points") {
  const SwitchedSystem sys = drift_pair(0.2, -0.2);
  const FlowMap flow(sys, 1.0);
  const UniformGrid g(Box{{0.0}, {1.0}}, {0.25});

  const ConcreteController empty(Controller(g.num_points(), 2), g, 0.2);
  const ClosedLoopResult blocked =
      simulate_closed_loop(flow, empty, std::vector<double>{0.5}, 5);
  CHECK(blocked.blocked);
  CHECK_FALSE(blocked.uncovered);
  CHECK(blocked.steps_taken == 0);
  CHECK(blocked.points.size() == 1);

  Controller table(g.num_points(), 2);
  for (state_t q = 0; q < g.num_points(); ++q) table.insert(q, 0);
  const ConcreteController ctrl(table, g, 0.2);
  const ClosedLoopResult uncovered =
      simulate_closed_loop(flow, ctrl, std::vector<double>{5.0}, 5);
  CHECK(uncovered.uncovered);
  CHECK(uncovered.steps_taken == 0);

  /* zero steps never consults the controller */
  const ClosedLoopResult idle =
      simulate_closed_loop(flow, empty, std::vector<double>{0.5}, 0);
  CHECK_FALSE(idle.blocked);
  CHECK(idle.points.size() == 1);
}

TEST_CASE("closed loop runs are reproducible and validated") {
  const SwitchedSystem sys = drift_pair(0.1, -0.1);
  const FlowMap flow(sys, 1.0);
  const UniformGrid g(Box{{0.0}, {1.0}}, {0.25});
  Controller table(g.num_points(), 2);
  for (state_t q = 0; q < g.num_points(); ++q) table.set_mask(q, 0b11);
  const ConcreteController ctrl(table, g, 0.2);

  const ClosedLoopResult a = simulate_closed_loop(flow, ctrl, std::vector<double>{0.5}, 20,
                                                  SimPolicy::random_action, 99);
  const ClosedLoopResult b = simulate_closed_loop(flow, ctrl, std::vector<double>{0.5}, 20,
                                                  SimPolicy::random_action, 99);
  CHECK(a.points == b.points);
  CHECK(a.modes == b.modes);

  const ClosedLoopResult low = simulate_closed_loop(flow, ctrl, std::vector<double>{0.5}, 3,
                                                    SimPolicy::min_action);
  CHECK(low.modes == (std::vector<action_t>{0, 0, 0}));

  CHECK_THROWS_AS(simulate_closed_loop(flow, ctrl, std::vector<double>{0.5, 0.5}, 5),
                  std::invalid_argument);
  const ConcreteController wrong(Controller(g.num_points(), 3), g, 0.2);
  CHECK_THROWS_AS(simulate_closed_loop(flow, wrong, std::vector<double>{0.5}, 5),
                  std::invalid_argument);
  const FlowMap plane(SwitchedSystem{2, {AffineMode{{0, 0, 0, 0}, {0, 0}}}}, 1.0);
  CHECK_THROWS_AS(simulate_closed_loop(plane, ctrl, std::vector<double>{0.5, 0.5}, 5),
                  std::invalid_argument);
}
