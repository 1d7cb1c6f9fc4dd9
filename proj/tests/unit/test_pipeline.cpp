#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "symctrl/abstraction.hpp"
#include "symctrl/exports.hpp"
#include "symctrl/pipeline.hpp"
#include "symctrl/reachability.hpp"
#include "symctrl/region.hpp"
#include "symctrl/safety.hpp"
#include "symctrl/scenario.hpp"
#include "symctrl/types.hpp"

using namespace symctrl;

namespace {

namespace fs = std::filesystem;

const fs::path test_root = fs::temp_directory_path() / "symctrl_pipeline_test";

std::string fresh_dir(const std::string& name) {
  const fs::path dir = test_root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

Scenario parse(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  return parse_scenario(in, name);
}

const std::string tiny_system =
    "[system]\n"
    "dim = 2\n"
    "a_1 = -1 0 0 -1\n"
    "b_1 = 0.3 0.3\n"
    "a_2 = -1 0 0 -1\n"
    "b_2 = 0.7 0.7\n"
    "[abstraction]\n"
    "tau = 0.5\n"
    "epsilon = 0.15\n"
    "eta = 0.05\n"
    "domain = 0 0 1 1\n";

const std::string tiny_safety = tiny_system +
                                "[safety]\n"
                                "box = 0.2 0.2 0.8 0.8\n"
                                "[simulate]\n"
                                "x0 = 0.5 0.5\n"
                                "steps = 50\n"
                                "[validate]\n"
                                "refinement = 2\n"
                                "samples = 100\n";

const std::string tiny_reach = tiny_system +
                               "[reach]\n"
                               "safe_box = 0.1 0.1 0.9 0.9\n"
                               "target_box = 0.5 0.5 0.9 0.9\n"
                               "[simulate]\n"
                               "x0 = 0.35 0.35\n"
                               "steps = 30\n";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/* identical file names with identical bytes */
void check_same_dir(const std::string& a, const std::string& b) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(a)) {
    names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  std::size_t found = 0;
  for (const auto& entry : fs::directory_iterator(b)) ++found;
  CHECK(found == names.size());
  for (const std::string& name : names) {
    INFO("file ", name);
    CHECK(slurp((fs::path(a) / name).string()) == slurp((fs::path(b) / name).string()));
  }
}

TransitionSystem tiny_abstraction(const Scenario& sc) {
  return build_abstraction(sc.system, {sc.tau, sc.epsilon, UniformGrid(sc.domain, sc.eta)}, 1);
}

}  // namespace

TEST_CASE("synth-safety artifacts equal a directly composed synthesis") {
  const Scenario sc = parse(tiny_safety, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("safety");
  const RunResult res = run_synth_safety(sc, opt);
  CHECK(res.exit_code == exit_ok);

  const TransitionSystem t2 = tiny_abstraction(sc);
  const RegionView contracted{*sc.safety_region, sc.epsilon, 0.0};
  const SafetySynthesisResult syn = maximal_safety_controller(t2, contracted, 1);
  const UniformGrid grid(sc.domain, sc.eta);
  const Controller exported = read_controller_csv(opt.out_dir + "/controller.csv", grid, 2);
  CHECK(exported == syn.controller);
  CHECK(res.report.value_of("sweeps") == std::to_string(syn.sweeps));
  CHECK(res.report.value_of("in_domain") == std::to_string(syn.domain_size));
  CHECK(res.report.value_of("relation_violations") == "0");
  CHECK(fs::exists(fs::path(opt.out_dir) / "report_synth_safety.txt"));
  CHECK(slurp(opt.out_dir + "/report_synth_safety.txt") == res.report.render());
}

TEST_CASE("synth-reach artifacts equal a directly composed synthesis") {
  const Scenario sc = parse(tiny_reach, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("reach");
  opt.bounds = true;
  const RunResult res = run_synth_reach(sc, opt);
  CHECK(res.exit_code == exit_ok);

  const TransitionSystem t2 = tiny_abstraction(sc);
  const ReachSynthesisResult syn = time_optimal_controller(
      t2, {*sc.reach_safe, sc.epsilon, 0.0}, {*sc.reach_target, sc.epsilon, 0.0}, 1);
  const UniformGrid grid(sc.domain, sc.eta);
  CHECK(read_controller_csv(opt.out_dir + "/controller.csv", grid, 2) == syn.controller);
  CHECK(read_value_csv(opt.out_dir + "/value.csv", grid) == syn.value);
  CHECK(slurp(opt.out_dir + "/value.csv") == slurp(opt.out_dir + "/value_upper.csv"));

  const ValueFunction lower = read_value_csv(opt.out_dir + "/value_lower.csv", grid);
  for (state_t q = 0; q < grid.num_points(); ++q) {
    CHECK(lower.values[q] <= syn.value.values[q]);
  }
  CHECK(res.report.value_of("lower_le_upper") == "1");
}

TEST_CASE("simulate verdicts come from the uncontracted regions") {
  const Scenario sc = parse(tiny_safety, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("simulate");
  CHECK(run_synth_safety(sc, opt).exit_code == exit_ok);
  const RunResult res = run_simulate(sc, opt);
  CHECK(res.exit_code == exit_ok);
  CHECK(res.report.value_of("steps_taken") == "50");
  CHECK(res.report.value_of("satisfied") == "1");
  CHECK(res.report.value_of("left_safe_at") == "-1");

  const std::string traj = slurp(opt.out_dir + "/trajectory.csv");
  CHECK(traj.find("t,x_1,x_2,mode\n") == 0);
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 52);

  const Scenario rsc = parse(tiny_reach, "t");
  RunOptions ropt;
  ropt.out_dir = fresh_dir("simulate_reach");
  CHECK(run_synth_reach(rsc, ropt).exit_code == exit_ok);
  const RunResult rres = run_simulate(rsc, ropt);
  CHECK(rres.exit_code == exit_ok);
  CHECK(rres.report.value_of("satisfied") == "1");
  CHECK(rres.report.value_of("first_hit") != "-1");
}

TEST_CASE("simulate without synthesis artifacts is a configuration error") {
  const Scenario sc = parse(tiny_safety, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("no_artifacts");
  CHECK_THROWS_AS(run_simulate(sc, opt), config_error);
}

TEST_CASE("an empty synthesized domain keeps the artifacts and exits specially") {
  const Scenario sc = parse(tiny_system + "[safety]\nbox = 0.9 0.9 0.95 0.95\n", "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("empty");
  const RunResult res = run_synth_safety(sc, opt);
  CHECK(res.exit_code == exit_empty_domain);
  CHECK(res.report.value_of("empty") == "1");
  CHECK(slurp(opt.out_dir + "/controller.csv") == "state,x_1,x_2,actions_bitmask\n");
}

TEST_CASE("the relation gate refuses a grid too coarse for the precision") {
  const std::string coarse =
      "[system]\n"
      "dim = 1\n"
      "a_1 = -1\n"
      "b_1 = 0\n"
      "[abstraction]\n"
      "tau = 0.1\n"
      "epsilon = 0.05\n"
      "eta = 0.3\n"
      "domain = 0 2\n"
      "[safety]\n"
      "box = 0.5 1.5\n";
  const Scenario sc = parse(coarse, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("gate");
  const RunResult refused = run_synth_safety(sc, opt);
  CHECK(refused.exit_code == exit_config);
  CHECK(refused.report.value_of("relation_violations") != "0");
  CHECK(refused.report.value_of("forced") == "0");
  CHECK(!fs::exists(fs::path(opt.out_dir) / "controller.csv"));

  opt.force = true;
  const RunResult forced = run_synth_safety(sc, opt);
  CHECK(forced.exit_code == exit_ok);
  CHECK(forced.report.value_of("forced") == "1");
  CHECK(fs::exists(fs::path(opt.out_dir) / "controller.csv"));
}

TEST_CASE("a blocking abstraction raises the blocking error") {
  const std::string expanding =
      "[system]\n"
      "dim = 1\n"
      "a_1 = 1\n"
      "b_1 = 0\n"
      "[abstraction]\n"
      "tau = 0.1\n"
      "epsilon = 0.05\n"
      "eta = 0.02\n"
      "domain = 0 1\n"
      "[reach]\n"
      "safe_box = 0.5 1\n"
      "target_box = 0.5 0.6\n";
  const Scenario sc = parse(expanding, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("blocking");
  opt.force = true;
  CHECK_THROWS_AS(run_synth_reach(sc, opt), blocking_state_error);
}

TEST_CASE("a start the controller cannot act on exits as uncovered") {
  const Scenario sc = parse(tiny_safety, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("uncovered");
  CHECK(run_synth_safety(sc, opt).exit_code == exit_ok);

  Scenario off = sc;
  off.simulate->x0 = {0.05, 0.05};
  const RunResult res = run_simulate(off, opt);
  CHECK(res.exit_code == exit_uncovered);
  CHECK(res.report.value_of("steps_taken") == "0");
  CHECK(res.report.value_of("satisfied") == "0");
}

TEST_CASE("export-grid writes dense tables for two-dimensional scenarios only") {
  const Scenario sc = parse(tiny_reach, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("export");
  CHECK(run_synth_reach(sc, opt).exit_code == exit_ok);
  const RunResult res = run_export_grid(sc, opt);
  CHECK(res.exit_code == exit_ok);
  CHECK(res.report.value_of("rows") == "441");
  CHECK(res.report.value_of("wrote_value_grid") == "1");
  CHECK(slurp(opt.out_dir + "/controller_grid.csv").find("i,j,x,y,mask\n") == 0);
  CHECK(slurp(opt.out_dir + "/value_grid.csv").find("i,j,x,y,value\n") == 0);

  const std::string line =
      "[system]\n"
      "dim = 1\n"
      "a_1 = -1\n"
      "b_1 = 0.5\n"
      "[abstraction]\n"
      "tau = 0.5\n"
      "epsilon = 0.15\n"
      "eta = 0.05\n"
      "domain = 0 1\n"
      "[safety]\n"
      "box = 0.2 0.8\n";
  CHECK_THROWS_AS(run_export_grid(parse(line, "t"), opt), config_error);
}

TEST_CASE("validate passes a consistent configuration") {
  const Scenario sc = parse(tiny_safety, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("validate");
  const RunResult res = run_validate(sc, opt);
  CHECK(res.exit_code == exit_ok);
  CHECK(res.report.value_of("pass") == "1");
  CHECK(res.report.value_of("mode") == "explicit");
  CHECK(res.report.value_of("pair_failures") == "0");
  CHECK(fs::exists(fs::path(opt.out_dir) / "report_validate.txt"));
}

TEST_CASE("identical invocations produce byte-identical artifact directories") {
  const Scenario sc = parse(tiny_reach, "t");
  RunOptions a;
  a.out_dir = fresh_dir("repeat_a");
  a.bounds = true;
  RunOptions b = a;
  b.out_dir = fresh_dir("repeat_b");
  CHECK(run_synth_reach(sc, a).exit_code == exit_ok);
  CHECK(run_synth_reach(sc, b).exit_code == exit_ok);
  CHECK(run_simulate(sc, a).exit_code == exit_ok);
  CHECK(run_simulate(sc, b).exit_code == exit_ok);
  CHECK(run_export_grid(sc, a).exit_code == exit_ok);
  CHECK(run_export_grid(sc, b).exit_code == exit_ok);
  check_same_dir(a.out_dir, b.out_dir);
}

TEST_CASE("output directories are created recursively") {
  const Scenario sc = parse(tiny_safety, "t");
  RunOptions opt;
  opt.out_dir = fresh_dir("nested") + "/deep/deeper";
  CHECK(run_synth_safety(sc, opt).exit_code == exit_ok);
  CHECK(fs::exists(fs::path(opt.out_dir) / "controller.csv"));
}
