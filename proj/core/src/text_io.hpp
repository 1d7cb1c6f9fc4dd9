#ifndef SYMCTRL_SRC_TEXT_IO_HPP_
#define SYMCTRL_SRC_TEXT_IO_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "symctrl/types.hpp"

namespace symctrl::detail {

/* Whitespace tokenizer over content lines. Text from '#' to end of line is
 * a comment, blank lines are skipped, and line numbers are 1-based positions
 * in the underlying stream. */
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /* fills tokens with the next content line; false at end of input */
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      tokens.clear();
      std::istringstream split(line);
      std::string tok;
      while (split >> tok) tokens.push_back(std::move(tok));
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::size_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
  throw config_error("line " + std::to_string(line) + ": " + what);
}

inline std::uint32_t parse_u32(const std::string& tok, std::size_t line, const char* what) {
  std::uint32_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    parse_fail(line, std::string("expected ") + what + ", got '" + tok + "'");
  return value;
}

inline double parse_double(const std::string& tok, std::size_t line, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(value))
    parse_fail(line, std::string("expected finite ") + what + ", got '" + tok + "'");
  return value;
}

}  // namespace symctrl::detail

#endif
