#include "symctrl/pipeline.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symctrl/abstraction.hpp"
#include "symctrl/affine.hpp"
#include "symctrl/bisimulation.hpp"
#include "symctrl/controller.hpp"
#include "symctrl/exports.hpp"
#include "symctrl/grid.hpp"
#include "symctrl/reachability.hpp"
#include "symctrl/region.hpp"
#include "symctrl/safety.hpp"
#include "symctrl/transition_system.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

namespace {

namespace fs = std::filesystem;

/* relation gate sample budget; sequential, so independent of --threads */
constexpr std::uint64_t gate_samples = 500;

fs::path out_dir_path(const RunOptions& opt) {
  return opt.out_dir.empty() ? fs::path(".") : fs::path(opt.out_dir);
}

std::string artifact_path(const RunOptions& opt, const char* name) {
  return (out_dir_path(opt) / name).string();
}

void prepare_out_dir(const RunOptions& opt) {
  std::error_code ec;
  fs::create_directories(out_dir_path(opt), ec);
  if (ec) throw config_error("cannot create output directory: " + opt.out_dir);
}

void write_report_file(const RunOptions& opt, const Report& rep, const char* filename) {
  const std::string path = artifact_path(opt, filename);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write file: " + path);
  out << rep.render();
  out.flush();
  if (!out) throw config_error("failed while writing file: " + path);
}

void stamp(Report& rep, const char* command, const Scenario& sc, const RunOptions& opt) {
  rep.set("command", command);
  rep.set("scenario", sc.name);
  rep.set("threads", opt.threads);
  rep.set("seed", opt.seed);
}

UniformGrid make_grid(const Scenario& sc) { return UniformGrid(sc.domain, sc.eta); }

std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k > 0) s += ", ";
    s += format_double(x[k]);
  }
  s += ")";
  return s;
}

/* Seeded spot check of the quantizer relation between the concrete flow and
 * the abstraction, restricted to the region synthesis relies on: continuous
 * points drawn from the specification's bounding box expanded by 2 epsilon
 * and clamped to the domain. Both matching directions collapse to one
 * successor-distance condition because both sides are deterministic and the
 * concrete flow never blocks. A mode the abstraction lacks is counted as a
 * boundary pair when its flow from the partner's center leaves the domain,
 * which is the only reason build_abstraction disables a mode. */
struct GateResult {
  std::uint64_t samples = 0;
  std::uint64_t pairs = 0;
  std::uint64_t violations = 0;
  std::uint64_t boundary_pairs = 0;
  double worst = 0.0;
  std::string witness;
};

GateResult relation_gate(const TransitionSystem& t2, const UniformGrid& grid,
                         const FlowMap& flow, const Region& spec, double eps,
                         std::uint64_t seed) {
  GateResult g;
  if (spec.boxes().empty()) return g;
  const std::size_t d = static_cast<std::size_t>(grid.dim());
  const Box& dom = grid.domain();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (const Box& b : spec.boxes()) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], b.lo[k]);
      hi[k] = std::max(hi[k], b.hi[k]);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] = std::max(dom.lo[k], lo[k] - 2.0 * eps);
    hi[k] = std::min(dom.hi[k], hi[k] + 2.0 * eps);
    if (lo[k] > hi[k]) return g;
  }

  const QuantizerRelation quant(grid, eps);
  std::mt19937_64 eng(seed);
  std::vector<double> x(d), y(d), yq(d);
  for (std::uint64_t s = 0; s < gate_samples; ++s) {
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = lo[k] == hi[k] ? lo[k] : std::uniform_real_distribution<double>(lo[k], hi[k])(eng);
    }
    const std::vector<state_t> partners = quant.image(x);
    g.pairs += partners.size();
    for (action_t p = 0; p < t2.num_actions(); ++p) {
      flow.step(p, x, y);
      for (const state_t q2 : partners) {
        bool bad = false;
        double dist = 0.0;
        if (t2.is_enabled(q2, p)) {
          const state_t s2 = t2.successors(q2, p)[0];
          dist = distance(y, t2.output(s2), Norm::l2);
          g.worst = std::max(g.worst, dist);
          bad = dist > eps;
        } else {
          flow.step(p, t2.output(q2), yq);
          if (grid.in_domain(yq)) {
            bad = true;
          } else {
            ++g.boundary_pairs;
          }
        }
        if (bad) {
          ++g.violations;
          if (g.witness.empty()) {
            g.witness = "first violation at x = " + point_text(x) + ", grid state " +
                        std::to_string(q2) + ", mode " + std::to_string(p + 1) +
                        ", successor distance " + format_double(dist);
          }
        }
      }
    }
  }
  g.samples = gate_samples;
  return g;
}

/* records the gate outcome and decides whether synthesis may proceed */
bool apply_gate(Report& rep, const TransitionSystem& t2, const UniformGrid& grid,
                const FlowMap& flow, const Region& spec, double eps, const RunOptions& opt) {
  const GateResult g = relation_gate(t2, grid, flow, spec, eps, opt.seed);
  rep.set("relation_samples", g.samples);
  rep.set("relation_pairs", g.pairs);
  rep.set("relation_violations", g.violations);
  rep.set("relation_boundary_pairs", g.boundary_pairs);
  rep.set("relation_worst_distance", g.worst);
  rep.set("forced", g.violations > 0 && opt.force ? 1 : 0);
  if (g.violations == 0) return true;
  rep.note("relation gate: " + std::to_string(g.violations) + " of " + std::to_string(g.pairs) +
           " sampled pairs violate the precision bound");
  rep.note(g.witness);
  if (opt.force) {
    rep.note("continuing anyway because --force was given");
    return true;
  }
  rep.note("refusing to synthesize; rerun with --force to override");
  return false;
}

std::uint64_t count_finite(const ValueFunction& vf) {
  std::uint64_t n = 0;
  for (const std::uint32_t v : vf.values) n += v != time_infinity;
  return n;
}

}  // namespace

RunResult run_synth_safety(const Scenario& sc, const RunOptions& opt) {
  if (!sc.safety_region) throw config_error("scenario '" + sc.name + "' has no [safety] section");
  prepare_out_dir(opt);

  const UniformGrid grid = make_grid(sc);
  const AbstractionConfig cfg{sc.tau, sc.epsilon, grid};
  const FlowMap flow(sc.system, sc.tau);
  const TransitionSystem t2 = build_abstraction(sc.system, cfg, opt.threads);

  Report rep("safety synthesis for scenario '" + sc.name + "'");
  stamp(rep, "synth-safety", sc, opt);
  rep.set("states", t2.num_states());
  rep.set("modes", t2.num_actions());
  rep.set("tau", sc.tau);
  rep.set("epsilon", sc.epsilon);
  rep.note("abstraction: " + std::to_string(t2.num_states()) + " states, " +
           std::to_string(t2.num_actions()) + " modes");

  if (!apply_gate(rep, t2, grid, flow, *sc.safety_region, sc.epsilon, opt)) {
    write_report_file(opt, rep, "report_synth_safety.txt");
    return {exit_config, std::move(rep)};
  }

  const RegionView contracted{*sc.safety_region, sc.epsilon, 0.0};
  const SafetySynthesisResult syn = maximal_safety_controller(t2, contracted, opt.threads);
  if (const SafetyCheckResult check = is_safety_controller(t2, syn.controller, contracted);
      !check.ok) {
    throw std::logic_error("synthesized safety controller failed its validity check");
  }
  rep.set("in_domain", syn.domain_size);
  rep.set("sweeps", syn.sweeps);
  rep.set("controller_states", syn.controller.domain_size());
  rep.note("contracted safe set covers " + std::to_string(syn.domain_size) +
           " states; the maximal controller keeps " +
           std::to_string(syn.controller.domain_size()) + " of them");
  write_controller_csv(artifact_path(opt, "controller.csv"), grid, syn.controller.masks());

  if (opt.bounds) {
    const RegionView expanded{*sc.safety_region, 0.0, sc.epsilon};
    const SafetySynthesisResult upper = maximal_safety_controller(t2, expanded, opt.threads);
    if (const SafetyCheckResult check = is_safety_controller(t2, upper.controller, expanded);
        !check.ok) {
      throw std::logic_error("expanded-side safety controller failed its validity check");
    }
    if (!is_more_permissive(upper.controller, syn.controller)) {
      throw std::logic_error("expanded-side controller is not above the deployed one");
    }
    rep.set("upper_in_domain", upper.domain_size);
    rep.set("upper_sweeps", upper.sweeps);
    rep.set("upper_controller_states", upper.controller.domain_size());
    rep.note("expanded-side envelope keeps " + std::to_string(upper.controller.domain_size()) +
             " states");
    write_controller_csv(artifact_path(opt, "controller_upper.csv"), grid,
                         upper.controller.masks());
  }

  const bool empty = syn.domain_size == 0 || syn.controller.domain_size() == 0;
  if (empty) rep.note("synthesized domain is empty");
  rep.set("empty", empty ? 1 : 0);
  write_report_file(opt, rep, "report_synth_safety.txt");
  return {empty ? exit_empty_domain : exit_ok, std::move(rep)};
}

RunResult run_synth_reach(const Scenario& sc, const RunOptions& opt) {
  if (!sc.reach_safe) throw config_error("scenario '" + sc.name + "' has no [reach] section");
  prepare_out_dir(opt);

  const UniformGrid grid = make_grid(sc);
  const AbstractionConfig cfg{sc.tau, sc.epsilon, grid};
  const FlowMap flow(sc.system, sc.tau);
  const TransitionSystem t2 = build_abstraction(sc.system, cfg, opt.threads);

  Report rep("reachability synthesis for scenario '" + sc.name + "'");
  stamp(rep, "synth-reach", sc, opt);
  rep.set("states", t2.num_states());
  rep.set("modes", t2.num_actions());
  rep.set("tau", sc.tau);
  rep.set("epsilon", sc.epsilon);
  rep.note("abstraction: " + std::to_string(t2.num_states()) + " states, " +
           std::to_string(t2.num_actions()) + " modes");

  if (!apply_gate(rep, t2, grid, flow, *sc.reach_safe, sc.epsilon, opt)) {
    write_report_file(opt, rep, "report_synth_reach.txt");
    return {exit_config, std::move(rep)};
  }

  const RegionView safe{*sc.reach_safe, sc.epsilon, 0.0};
  const RegionView target{*sc.reach_target, sc.epsilon, 0.0};
  const ReachSynthesisResult syn = time_optimal_controller(t2, safe, target, opt.threads);
  {
    const ValueFunction replay = entry_time(apply_controller(t2, syn.controller), safe, target,
                                            false, opt.threads);
    if (!(replay == syn.value)) {
      throw std::logic_error("synthesized reach controller failed its validity check");
    }
  }
  const std::uint64_t finite = count_finite(syn.value);
  rep.set("in_domain", syn.domain_size);
  rep.set("sweeps", syn.sweeps);
  rep.set("controller_states", syn.controller.domain_size());
  rep.set("finite_values", finite);
  rep.set("unreachable_in_domain", syn.domain_size - finite);
  rep.note("contracted safe set covers " + std::to_string(syn.domain_size) + " states; " +
           std::to_string(finite) + " of them can force the target");
  write_controller_csv(artifact_path(opt, "controller.csv"), grid, syn.controller.masks());
  write_value_csv(artifact_path(opt, "value.csv"), grid, syn.value.values);

  if (opt.bounds) {
    const RegionView safe_e{*sc.reach_safe, 0.0, sc.epsilon};
    const RegionView target_e{*sc.reach_target, 0.0, sc.epsilon};
    const ReachSynthesisResult lower = time_optimal_controller(t2, safe_e, target_e, opt.threads);
    for (state_t q = 0; q < t2.num_states(); ++q) {
      if (lower.value.values[q] > syn.value.values[q]) {
        throw std::logic_error("expanded-side value exceeds the deployed value");
      }
    }
    rep.set("lower_in_domain", lower.domain_size);
    rep.set("lower_sweeps", lower.sweeps);
    rep.set("lower_finite_values", count_finite(lower.value));
    rep.set("lower_le_upper", 1);
    rep.note("expanded-side problem bounds the achievable entry time from below");
    write_value_csv(artifact_path(opt, "value_upper.csv"), grid, syn.value.values);
    write_value_csv(artifact_path(opt, "value_lower.csv"), grid, lower.value.values);
  }

  const bool empty = finite == 0;
  if (empty) rep.note("no state can force the target");
  rep.set("empty", empty ? 1 : 0);
  write_report_file(opt, rep, "report_synth_reach.txt");
  return {empty ? exit_empty_domain : exit_ok, std::move(rep)};
}

RunResult run_simulate(const Scenario& sc, const RunOptions& opt) {
  if (!sc.simulate) throw config_error("scenario '" + sc.name + "' has no [simulate] section");
  const bool reach = sc.is_reach();
  if (!reach && !sc.safety_region) {
    throw config_error("scenario '" + sc.name + "' has no synthesis objective to simulate");
  }
  prepare_out_dir(opt);

  const UniformGrid grid = make_grid(sc);
  const FlowMap flow(sc.system, sc.tau);
  const action_t modes = static_cast<action_t>(sc.system.modes.size());
  Controller table = read_controller_csv(artifact_path(opt, "controller.csv"), grid, modes);
  const ConcreteController ctrl =
      reach ? ConcreteController(std::move(table),
                                 read_value_csv(artifact_path(opt, "value.csv"), grid), grid,
                                 sc.epsilon)
            : ConcreteController(std::move(table), grid, sc.epsilon);

  const SimulateSpec& spec = *sc.simulate;
  const ClosedLoopResult run = simulate_closed_loop(
      flow, ctrl, spec.x0, static_cast<std::size_t>(spec.steps), spec.policy, spec.seed);
  write_trajectory_csv(artifact_path(opt, "trajectory.csv"), sc.dim(), run.points, run.modes);

  Report rep("closed-loop simulation for scenario '" + sc.name + "'");
  stamp(rep, "simulate", sc, opt);
  rep.set("steps_requested", spec.steps);
  rep.set("steps_taken", run.steps_taken);
  rep.set("policy", spec.policy == SimPolicy::lazy       ? "lazy"
                    : spec.policy == SimPolicy::min_action ? "min"
                                                            : "random");
  rep.set("sim_seed", spec.seed);

  const std::size_t d = static_cast<std::size_t>(sc.dim());
  const auto point = [&](std::size_t t) {
    return std::span<const double>(run.points.data() + t * d, d);
  };
  const std::size_t visited = run.steps_taken + 1;
  const std::int64_t uncovered_at =
      run.uncovered ? static_cast<std::int64_t>(run.steps_taken) : -1;
  const std::int64_t blocked_at = run.blocked ? static_cast<std::int64_t>(run.steps_taken) : -1;
  rep.set("uncovered_at", uncovered_at);
  rep.set("blocked_at", blocked_at);

  bool satisfied = false;
  if (reach) {
    const Region& safe = *sc.reach_safe;
    const Region& goal = *sc.reach_target;
    std::int64_t first_hit = -1;
    std::int64_t left_safe_at = -1;
    for (std::size_t t = 0; t < visited; ++t) {
      if (first_hit < 0 && goal.contains(point(t))) first_hit = static_cast<std::int64_t>(t);
      if (left_safe_at < 0 && !safe.contains(point(t))) {
        left_safe_at = static_cast<std::int64_t>(t);
      }
    }
    satisfied = first_hit >= 0 && (left_safe_at < 0 || left_safe_at > first_hit);
    rep.set("first_hit", first_hit);
    rep.set("left_safe_at", left_safe_at);
    rep.note(first_hit >= 0
                 ? "target reached at step " + std::to_string(first_hit)
                 : "target never reached");
  } else {
    const Region& safe = *sc.safety_region;
    std::int64_t left_safe_at = -1;
    for (std::size_t t = 0; t < visited; ++t) {
      if (!safe.contains(point(t))) {
        left_safe_at = static_cast<std::int64_t>(t);
        break;
      }
    }
    satisfied = left_safe_at < 0 && run.steps_taken == spec.steps;
    rep.set("left_safe_at", left_safe_at);
    rep.note(left_safe_at < 0 ? "every visited point stays in the safe set"
                              : "safe set left at step " + std::to_string(left_safe_at));
  }
  rep.set("satisfied", satisfied ? 1 : 0);
  for (std::size_t k = 0; k < d; ++k) {
    rep.set("final_x_" + std::to_string(k + 1), point(visited - 1)[k]);
  }
  rep.note("final point " + point_text(point(visited - 1)));

  const bool dead_start =
      (run.uncovered || run.blocked) && run.steps_taken == 0 && spec.steps > 0;
  if (dead_start) rep.note("the controller cannot act at the initial state");
  write_report_file(opt, rep, "report_simulate.txt");
  return {dead_start ? exit_uncovered : exit_ok, std::move(rep)};
}

RunResult run_validate(const Scenario& sc, const RunOptions& opt) {
  prepare_out_dir(opt);
  const AbstractionConfig cfg{sc.tau, sc.epsilon, make_grid(sc)};

  Report rep("precision validation for scenario '" + sc.name + "'");
  stamp(rep, "validate", sc, opt);
  rep.set("refinement", sc.validate.refinement);
  rep.set("samples", sc.validate.samples);

  const PrecisionReport pr = validate_precision(sc.system, cfg, sc.validate.refinement,
                                                sc.validate.samples, opt.seed, opt.threads);
  rep.set("mode", pr.explicit_check ? "explicit" : "sampled");
  rep.set("pass", pr.pass ? 1 : 0);
  rep.set("pairs_checked", pr.pairs_checked);
  rep.set("pair_failures", pr.pair_failures);
  if (pr.explicit_check) {
    rep.set("relation_ok", pr.relation_ok ? 1 : 0);
    rep.set("relation_total", pr.relation_total ? 1 : 0);
  } else {
    rep.set("boundary_skips", pr.boundary_skips);
  }
  rep.set("trajectories", pr.trajectories);
  rep.set("max_deviation", pr.max_deviation);
  rep.set("deviation_ok", pr.deviation_ok ? 1 : 0);
  if (pr.witness) {
    const char* kind = "";
    switch (pr.witness->kind) {
      case BisimViolationKind::uncovered_left: kind = "uncovered fine state"; break;
      case BisimViolationKind::uncovered_right: kind = "uncovered coarse state"; break;
      case BisimViolationKind::output_distance: kind = "output distance"; break;
      case BisimViolationKind::forward_matching: kind = "forward matching"; break;
      case BisimViolationKind::backward_matching: kind = "backward matching"; break;
    }
    rep.note(std::string("witness: ") + kind + " failure at fine state " +
             std::to_string(pr.witness->q1) + " against coarse state " +
             std::to_string(pr.witness->q2));
  }
  rep.note(pr.pass ? "configured precision is consistent with the sampled evidence"
                   : "configured precision is inconsistent; refine eta or relax epsilon");

  const Region* margin_region = nullptr;
  if (sc.safety_region) margin_region = &*sc.safety_region;
  if (sc.reach_safe) margin_region = &*sc.reach_safe;
  if (margin_region) {
    const DomainMarginReport margin =
        check_domain_margin(sc.system, cfg, *margin_region, 2000, opt.seed);
    rep.set("margin_contains_expansion", margin.contains_expansion ? 1 : 0);
    rep.set("margin_contains_flow_step", margin.contains_flow_margin ? 1 : 0);
    for (std::size_t k = 0; k < margin.flow_step_bound.size(); ++k) {
      rep.set("flow_step_bound_" + std::to_string(k + 1), margin.flow_step_bound[k]);
    }
    if (!margin.contains_expansion) {
      rep.note("warning: the domain does not contain the 2-epsilon expansion of the "
               "specification");
    } else if (!margin.contains_flow_margin) {
      rep.note("note: the whole-domain flow-step bound does not fit between the expanded "
               "specification and the domain boundary");
    }
  }

  write_report_file(opt, rep, "report_validate.txt");
  return {pr.pass ? exit_ok : exit_config, std::move(rep)};
}

RunResult run_export_grid(const Scenario& sc, const RunOptions& opt) {
  if (sc.dim() != 2) {
    throw config_error("export-grid requires a two-dimensional scenario");
  }
  prepare_out_dir(opt);
  const UniformGrid grid = make_grid(sc);
  const action_t modes = static_cast<action_t>(sc.system.modes.size());
  const Controller table =
      read_controller_csv(artifact_path(opt, "controller.csv"), grid, modes);
  write_controller_grid_csv(artifact_path(opt, "controller_grid.csv"), grid, table.masks());

  Report rep("dense grid export for scenario '" + sc.name + "'");
  stamp(rep, "export-grid", sc, opt);
  rep.set("rows", grid.num_points());
  rep.set("controller_states", table.domain_size());
  bool wrote_value = false;
  if (sc.is_reach()) {
    const ValueFunction vf = read_value_csv(artifact_path(opt, "value.csv"), grid);
    write_value_grid_csv(artifact_path(opt, "value_grid.csv"), grid, vf.values);
    wrote_value = true;
  }
  rep.set("wrote_value_grid", wrote_value ? 1 : 0);
  rep.note("controller grid written with " + std::to_string(grid.num_points()) + " cells");

  write_report_file(opt, rep, "report_export_grid.txt");
  return {exit_ok, std::move(rep)};
}

}  // namespace symctrl
