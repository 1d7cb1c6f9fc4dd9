#ifndef SYMCTRL_EXPORTS_HPP_
#define SYMCTRL_EXPORTS_HPP_

#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symctrl/controller.hpp"
#include "symctrl/grid.hpp"
#include "symctrl/reachability.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

/* Run summary in two layers: prose for people, then a `---` separator and
 * key=value lines for scripts. Rendering is deterministic: lines and keys
 * appear in insertion order and floats use the canonical 17-digit form.
 * Reports never carry wall-clock times or absolute paths, so a rerun of the
 * same configuration reproduces the bytes exactly. */
class Report {
 public:
  explicit Report(std::string title) : title_(std::move(title)) {}

  void note(std::string line) { lines_.push_back(std::move(line)); }

  void set(const std::string& key, std::string value) {
    data_.emplace_back(key, std::move(value));
  }
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  template <std::integral T>
  void set(const std::string& key, T value) {
    set(key, std::to_string(value));
  }

  const std::string& title() const { return title_; }
  const std::vector<std::pair<std::string, std::string>>& data() const { return data_; }

  /* first value stored under key, empty string when absent */
  std::string value_of(const std::string& key) const;

  std::string render() const;

 private:
  std::string title_;
  std::vector<std::string> lines_;
  std::vector<std::pair<std::string, std::string>> data_;
};

/* Controller table export: header `state,x_1,..,x_d,actions_bitmask`, one
 * row per state with a nonempty action set, ascending. Coordinates are the
 * grid centers. The reader accepts any subset of states in strictly
 * ascending order and leaves missing states empty; it rejects mask bits at
 * or above num_actions. */
void write_controller_csv(const std::string& path, const UniformGrid& grid,
                          std::span<const std::uint64_t> masks);
Controller read_controller_csv(const std::string& path, const UniformGrid& grid,
                               action_t num_actions);

/* Value-function export: header `state,x_1,..,x_d,value`, one row per grid
 * state, ascending, with the literal `inf` for unreachable states. The
 * reader defaults missing states to infinity. */
void write_value_csv(const std::string& path, const UniformGrid& grid,
                     std::span<const std::uint32_t> values);
ValueFunction read_value_csv(const std::string& path, const UniformGrid& grid);

/* Closed-loop trace export: header `t,x_1,..,x_d,mode`, one row per visited
 * point. Row t carries the 1-based mode applied at step t; the final row,
 * which has no applied mode, carries 0. points holds modes.size() + 1 points
 * flattened in visit order. */
void write_trajectory_csv(const std::string& path, int dim, std::span<const double> points,
                          std::span<const action_t> modes);

/* Dense plotting exports for two-dimensional grids: every cell in state
 * order as `i,j,x,y,mask` or `i,j,x,y,value` with i the dimension-0 index.
 * Any other dimension raises config_error. */
void write_controller_grid_csv(const std::string& path, const UniformGrid& grid,
                               std::span<const std::uint64_t> masks);
void write_value_grid_csv(const std::string& path, const UniformGrid& grid,
                          std::span<const std::uint32_t> values);

}  // namespace symctrl

#endif
