#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "symctrl/exports.hpp"
#include "symctrl/grid.hpp"
#include "symctrl/types.hpp"

using namespace symctrl;

namespace {

namespace fs = std::filesystem;

const fs::path test_dir = fs::temp_directory_path() / "symctrl_exports_test";

std::string file_in_dir(const std::string& name) {
  fs::create_directories(test_dir);
  return (test_dir / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/* three centers 0.25, 0.75, 1 (the last clipped to the domain edge) */
UniformGrid line3() { return UniformGrid(Box{{0.0}, {1.0}}, {0.5}); }

UniformGrid square9() { return UniformGrid(Box{{0.0, 0.0}, {1.0, 1.0}}, {0.5, 0.5}); }

std::string reader_complaint(const std::string& name, const std::string& content) {
  const std::string path = file_in_dir(name);
  write_file(path, content);
  try {
    read_controller_csv(path, line3(), 3);
  } catch (const config_error& e) {
    return e.what();
  }
  FAIL("expected config_error");
  return {};
}

}  // namespace

TEST_CASE("report renders title, notes, then ordered key-value block") {
  Report rep("demo title");
  rep.note("first note");
  rep.set("alpha", 1);
  rep.set("ratio", 0.5);
  rep.set("tag", "xyz");
  CHECK(rep.render() == "demo title\nfirst note\n---\nalpha=1\nratio=0.5\ntag=xyz\n");
  CHECK(rep.value_of("ratio") == "0.5");
  CHECK(rep.value_of("missing") == "");
}

TEST_CASE("controller export writes only states with actions") {
  const std::string path = file_in_dir("controller_golden.csv");
  const std::vector<std::uint64_t> masks = {0, 3, 1};
  write_controller_csv(path, line3(), masks);
  CHECK(slurp(path) ==
        "state,x_1,actions_bitmask\n"
        "1,0.75,3\n"
        "2,1,1\n");

  const Controller back = read_controller_csv(path, line3(), 3);
  CHECK(back.mask(0) == 0);
  CHECK(back.mask(1) == 3);
  CHECK(back.mask(2) == 1);
  CHECK(back == Controller(3, 3, {0, 3, 1}));
}

TEST_CASE("value export writes every state with inf for unreachable") {
  const std::string path = file_in_dir("value_golden.csv");
  const std::vector<std::uint32_t> values = {0, 5, time_infinity};
  write_value_csv(path, line3(), values);
  CHECK(slurp(path) ==
        "state,x_1,value\n"
        "0,0.25,0\n"
        "1,0.75,5\n"
        "2,1,inf\n");

  const ValueFunction back = read_value_csv(path, line3());
  CHECK(back.values == values);
}

TEST_CASE("round trips preserve wide masks and large finite values") {
  const UniformGrid grid(Box{{-2.0}, {2.0}}, {0.1});
  std::vector<std::uint64_t> masks(grid.num_points(), 0);
  std::vector<std::uint32_t> values(grid.num_points(), time_infinity);
  for (state_t q = 0; q < grid.num_points(); ++q) {
    masks[q] = (q % 5 == 0) ? 0 : (0xFFFFFFFFFFFFFFFFull >> (q % 64));
    if (q % 3 == 0) values[q] = time_infinity - 1 - q;
  }
  const std::string cpath = file_in_dir("controller_wide.csv");
  const std::string vpath = file_in_dir("value_wide.csv");
  write_controller_csv(cpath, grid, masks);
  write_value_csv(vpath, grid, values);
  const Controller back = read_controller_csv(cpath, grid, 64);
  for (state_t q = 0; q < grid.num_points(); ++q) CHECK(back.mask(q) == masks[q]);
  CHECK(read_value_csv(vpath, grid).values == values);
}

TEST_CASE("trajectory export carries one-based modes and a final zero") {
  const std::string path = file_in_dir("trajectory_golden.csv");
  const std::vector<double> points = {0.0, 0.5, 1.0};
  const std::vector<action_t> modes = {0, 2};
  write_trajectory_csv(path, 1, points, modes);
  CHECK(slurp(path) ==
        "t,x_1,mode\n"
        "0,0,1\n"
        "1,0.5,3\n"
        "2,1,0\n");
  CHECK_THROWS_AS(write_trajectory_csv(path, 1, points, std::vector<action_t>{0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(write_trajectory_csv(path, 0, {}, {}), std::invalid_argument);
}

TEST_CASE("dense exports enumerate the first grid dimension fastest") {
  const std::string cpath = file_in_dir("grid_mask_golden.csv");
  const std::string vpath = file_in_dir("grid_value_golden.csv");
  std::vector<std::uint64_t> masks(9, 0);
  std::vector<std::uint32_t> values(9, time_infinity);
  for (state_t q = 0; q < 9; ++q) masks[q] = q;
  values[4] = 7;
  write_controller_grid_csv(cpath, square9(), masks);
  write_value_grid_csv(vpath, square9(), values);
  CHECK(slurp(cpath) ==
        "i,j,x,y,mask\n"
        "0,0,0.25,0.25,0\n"
        "1,0,0.75,0.25,1\n"
        "2,0,1,0.25,2\n"
        "0,1,0.25,0.75,3\n"
        "1,1,0.75,0.75,4\n"
        "2,1,1,0.75,5\n"
        "0,2,0.25,1,6\n"
        "1,2,0.75,1,7\n"
        "2,2,1,1,8\n");
  const std::string vdata = slurp(vpath);
  CHECK(vdata.find("i,j,x,y,value\n") == 0);
  CHECK(vdata.find("1,1,0.75,0.75,7\n") != std::string::npos);
  CHECK(vdata.find("0,0,0.25,0.25,inf\n") != std::string::npos);

  CHECK_THROWS_AS(write_controller_grid_csv(cpath, line3(), std::vector<std::uint64_t>(3, 0)),
                  config_error);
}

TEST_CASE("controller reader rejects malformed tables") {
  CHECK(reader_complaint("bad_header.csv", "state,x_1,mask\n").find("expected header") !=
        std::string::npos);
  CHECK(reader_complaint("bad_columns.csv",
                         "state,x_1,actions_bitmask\n0,0.25\n")
            .find("wrong column count") != std::string::npos);
  CHECK(reader_complaint("bad_order.csv",
                         "state,x_1,actions_bitmask\n1,0.75,1\n1,0.75,2\n")
            .find("strictly ascending") != std::string::npos);
  CHECK(reader_complaint("bad_state.csv",
                         "state,x_1,actions_bitmask\n7,0.25,1\n")
            .find("state out of range") != std::string::npos);
  CHECK(reader_complaint("bad_mask.csv",
                         "state,x_1,actions_bitmask\n0,0.25,8\n")
            .find("beyond the configured count") != std::string::npos);
  CHECK(reader_complaint("bad_int.csv",
                         "state,x_1,actions_bitmask\n0,0.25,-1\n")
            .find("malformed integer") != std::string::npos);
  CHECK(reader_complaint("empty.csv", "").find("empty file") != std::string::npos);
  CHECK_THROWS_AS(read_controller_csv((test_dir / "no_such.csv").string(), line3(), 3),
                  config_error);
  CHECK_THROWS_AS(read_controller_csv(file_in_dir("bad_mask.csv"), line3(), 0),
                  std::invalid_argument);
}

TEST_CASE("value reader accepts blank lines and rejects oversized values") {
  const std::string ok = file_in_dir("value_blank.csv");
  write_file(ok, "state,x_1,value\n0,0.25,3\n\n2,1,inf\n");
  const ValueFunction vf = read_value_csv(ok, line3());
  CHECK(vf.values == std::vector<std::uint32_t>{3, time_infinity, time_infinity});

  const std::string big = file_in_dir("value_big.csv");
  write_file(big, "state,x_1,value\n0,0.25,4294967295\n");
  CHECK_THROWS_AS(read_value_csv(big, line3()), config_error);

  const std::string crlf = file_in_dir("value_crlf.csv");
  write_file(crlf, "state,x_1,value\r\n0,0.25,3\r\n1,0.75,inf\r\n2,1,9\r\n");
  CHECK(read_value_csv(crlf, line3()).values ==
        std::vector<std::uint32_t>{3, time_infinity, 9});
}

TEST_CASE("writers reject tables that do not match the grid") {
  const std::string path = file_in_dir("mismatch.csv");
  CHECK_THROWS_AS(write_controller_csv(path, line3(), std::vector<std::uint64_t>(2, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(write_value_csv(path, line3(), std::vector<std::uint32_t>(4, 0)),
                  std::invalid_argument);
}
