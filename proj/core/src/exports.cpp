#include "symctrl/exports.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace symctrl {

namespace {

[[noreturn]] void fail_file(const std::string& path, int line, const std::string& what) {
  throw config_error(path + " line " + std::to_string(line) + ": " + what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write file: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read file: " + path);
  return in;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw config_error("failed while writing file: " + path);
}

std::string coordinate_header(int dim) {
  std::string h;
  for (int k = 1; k <= dim; ++k) {
    h += ",x_";
    h += std::to_string(k);
  }
  return h;
}

void append_point(std::string& row, std::span<const double> x) {
  for (const double v : x) {
    row += ',';
    row += format_double(v);
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string::npos) {
      out.push_back(line.substr(begin));
      return out;
    }
    out.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

std::uint64_t parse_u64(const std::string& token, const std::string& path, int line) {
  if (token.empty() || token.front() == '-' || token.front() == '+') {
    fail_file(path, line, "malformed integer '" + token + "'");
  }
  const char* begin = token.c_str();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + token.size()) fail_file(path, line, "malformed integer '" + token + "'");
  return v;
}

/* strips a trailing carriage return so files survive CRLF round trips */
void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string Report::value_of(const std::string& key) const {
  for (const auto& [k, v] : data_) {
    if (k == key) return v;
  }
  return std::string();
}

std::string Report::render() const {
  std::string out = title_;
  out += '\n';
  for (const std::string& line : lines_) {
    out += line;
    out += '\n';
  }
  out += "---\n";
  for (const auto& [k, v] : data_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

void write_controller_csv(const std::string& path, const UniformGrid& grid,
                          std::span<const std::uint64_t> masks) {
  if (masks.size() != grid.num_points()) {
    throw std::invalid_argument("mask table does not match the grid");
  }
  std::ofstream out = open_out(path);
  out << "state" << coordinate_header(grid.dim()) << ",actions_bitmask\n";
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  std::string row;
  for (state_t q = 0; q < grid.num_points(); ++q) {
    if (masks[q] == 0) continue;
    row.clear();
    row += std::to_string(q);
    grid.center(q, x);
    append_point(row, x);
    row += ',';
    row += std::to_string(masks[q]);
    row += '\n';
    out << row;
  }
  finish_out(out, path);
}

Controller read_controller_csv(const std::string& path, const UniformGrid& grid,
                               action_t num_actions) {
  if (num_actions == 0 || num_actions > Controller::max_actions) {
    throw std::invalid_argument("action count must be between 1 and 64");
  }
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw config_error(path + ": empty file");
  chomp(line);
  const std::string header = "state" + coordinate_header(grid.dim()) + ",actions_bitmask";
  if (line != header) fail_file(path, 1, "expected header '" + header + "'");

  Controller table(grid.num_points(), num_actions);
  const std::size_t columns = static_cast<std::size_t>(grid.dim()) + 2;
  std::int64_t prev = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != columns) fail_file(path, line_no, "wrong column count");
    const std::uint64_t state = parse_u64(cells.front(), path, line_no);
    if (state >= grid.num_points()) fail_file(path, line_no, "state out of range");
    if (static_cast<std::int64_t>(state) <= prev) {
      fail_file(path, line_no, "states must be strictly ascending");
    }
    prev = static_cast<std::int64_t>(state);
    const std::uint64_t mask = parse_u64(cells.back(), path, line_no);
    if (num_actions < 64 && (mask >> num_actions) != 0) {
      fail_file(path, line_no, "mask uses actions beyond the configured count");
    }
    table.set_mask(static_cast<state_t>(state), mask);
  }
  return table;
}

void write_value_csv(const std::string& path, const UniformGrid& grid,
                     std::span<const std::uint32_t> values) {
  if (values.size() != grid.num_points()) {
    throw std::invalid_argument("value table does not match the grid");
  }
  std::ofstream out = open_out(path);
  out << "state" << coordinate_header(grid.dim()) << ",value\n";
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  std::string row;
  for (state_t q = 0; q < grid.num_points(); ++q) {
    row.clear();
    row += std::to_string(q);
    grid.center(q, x);
    append_point(row, x);
    row += ',';
    if (values[q] == time_infinity) {
      row += "inf";
    } else {
      row += std::to_string(values[q]);
    }
    row += '\n';
    out << row;
  }
  finish_out(out, path);
}

ValueFunction read_value_csv(const std::string& path, const UniformGrid& grid) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw config_error(path + ": empty file");
  chomp(line);
  const std::string header = "state" + coordinate_header(grid.dim()) + ",value";
  if (line != header) fail_file(path, 1, "expected header '" + header + "'");

  ValueFunction vf;
  vf.values.assign(grid.num_points(), time_infinity);
  const std::size_t columns = static_cast<std::size_t>(grid.dim()) + 2;
  std::int64_t prev = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != columns) fail_file(path, line_no, "wrong column count");
    const std::uint64_t state = parse_u64(cells.front(), path, line_no);
    if (state >= grid.num_points()) fail_file(path, line_no, "state out of range");
    if (static_cast<std::int64_t>(state) <= prev) {
      fail_file(path, line_no, "states must be strictly ascending");
    }
    prev = static_cast<std::int64_t>(state);
    if (cells.back() == "inf") continue;
    const std::uint64_t value = parse_u64(cells.back(), path, line_no);
    if (value >= time_infinity) fail_file(path, line_no, "finite value too large");
    vf.values[static_cast<state_t>(state)] = static_cast<std::uint32_t>(value);
  }
  return vf;
}

void write_trajectory_csv(const std::string& path, int dim, std::span<const double> points,
                          std::span<const action_t> modes) {
  const std::size_t d = static_cast<std::size_t>(dim);
  if (dim <= 0 || points.size() != (modes.size() + 1) * d) {
    throw std::invalid_argument("trajectory points do not match the mode count");
  }
  std::ofstream out = open_out(path);
  out << 't' << coordinate_header(dim) << ",mode\n";
  std::string row;
  for (std::size_t t = 0; t <= modes.size(); ++t) {
    row.clear();
    row += std::to_string(t);
    append_point(row, points.subspan(t * d, d));
    row += ',';
    row += std::to_string(t < modes.size() ? modes[t] + 1 : 0);
    row += '\n';
    out << row;
  }
  finish_out(out, path);
}

namespace {

template <typename Cell>
void write_dense_grid(const std::string& path, const UniformGrid& grid, const char* column,
                      std::size_t table_size, Cell&& cell) {
  if (grid.dim() != 2) throw config_error("dense grid exports need a two-dimensional grid");
  if (table_size != grid.num_points()) {
    throw std::invalid_argument("table does not match the grid");
  }
  std::ofstream out = open_out(path);
  out << "i,j,x,y," << column << '\n';
  std::vector<double> x(2);
  std::string row;
  const std::uint32_t ni = grid.counts()[0];
  const std::uint32_t nj = grid.counts()[1];
  state_t q = 0;
  for (std::uint32_t j = 0; j < nj; ++j) {
    for (std::uint32_t i = 0; i < ni; ++i, ++q) {
      row.clear();
      row += std::to_string(i);
      row += ',';
      row += std::to_string(j);
      grid.center(q, x);
      append_point(row, x);
      row += ',';
      row += cell(q);
      row += '\n';
      out << row;
    }
  }
  finish_out(out, path);
}

}  // namespace

void write_controller_grid_csv(const std::string& path, const UniformGrid& grid,
                               std::span<const std::uint64_t> masks) {
  write_dense_grid(path, grid, "mask", masks.size(),
                   [&](state_t q) { return std::to_string(masks[q]); });
}

void write_value_grid_csv(const std::string& path, const UniformGrid& grid,
                          std::span<const std::uint32_t> values) {
  write_dense_grid(path, grid, "value", values.size(), [&](state_t q) {
    return values[q] == time_infinity ? std::string("inf") : std::to_string(values[q]);
  });
}

}  // namespace symctrl
