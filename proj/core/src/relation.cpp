#include "symctrl/relation.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "text_io.hpp"

namespace symctrl {

FiniteRelation::FiniteRelation(state_t num_left, state_t num_right,
                               std::vector<std::pair<state_t, state_t>> pairs)
    : num_left_(num_left), num_right_(num_right) {
  if (num_left == 0 || num_right == 0)
    throw config_error("relation endpoints need at least one state each");
  for (const auto& [q1, q2] : pairs) {
    if (q1 >= num_left)
      throw std::out_of_range("left state id " + std::to_string(q1) + " out of range");
    if (q2 >= num_right)
      throw std::out_of_range("right state id " + std::to_string(q2) + " out of range");
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  if (pairs.size() >= std::numeric_limits<std::uint32_t>::max())
    throw config_error("pair count overflows the 32-bit index");

  fwd_offsets_.assign(static_cast<std::size_t>(num_left) + 1, 0);
  fwd_targets_.resize(pairs.size());
  for (const auto& [q1, q2] : pairs) ++fwd_offsets_[q1 + 1];
  for (std::size_t q = 0; q < num_left; ++q) fwd_offsets_[q + 1] += fwd_offsets_[q];
  for (std::size_t i = 0; i < pairs.size(); ++i) fwd_targets_[i] = pairs[i].second;

  bwd_offsets_.assign(static_cast<std::size_t>(num_right) + 1, 0);
  bwd_targets_.resize(pairs.size());
  for (const auto& [q1, q2] : pairs) ++bwd_offsets_[q2 + 1];
  for (std::size_t q = 0; q < num_right; ++q) bwd_offsets_[q + 1] += bwd_offsets_[q];
  std::vector<std::uint32_t> cursor(bwd_offsets_.begin(), bwd_offsets_.end() - 1);
  for (const auto& [q1, q2] : pairs) bwd_targets_[cursor[q2]++] = q1;
}

std::span<const state_t> FiniteRelation::image(state_t q1) const {
  if (q1 >= num_left_)
    throw std::out_of_range("left state id " + std::to_string(q1) + " out of range");
  return {fwd_targets_.data() + fwd_offsets_[q1], fwd_targets_.data() + fwd_offsets_[q1 + 1]};
}

std::span<const state_t> FiniteRelation::preimage(state_t q2) const {
  if (q2 >= num_right_)
    throw std::out_of_range("right state id " + std::to_string(q2) + " out of range");
  return {bwd_targets_.data() + bwd_offsets_[q2], bwd_targets_.data() + bwd_offsets_[q2 + 1]};
}

std::vector<state_t> FiniteRelation::image_of_set(std::span<const state_t> left) const {
  std::vector<state_t> out;
  for (state_t q1 : left) {
    const auto span = image(q1);
    out.insert(out.end(), span.begin(), span.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<state_t> FiniteRelation::preimage_of_set(std::span<const state_t> right) const {
  std::vector<state_t> out;
  for (state_t q2 : right) {
    const auto span = preimage(q2);
    out.insert(out.end(), span.begin(), span.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool FiniteRelation::contains(state_t q1, state_t q2) const {
  const auto span = image(q1);
  return std::binary_search(span.begin(), span.end(), q2);
}

FiniteRelation FiniteRelation::transpose() const {
  std::vector<std::pair<state_t, state_t>> swapped;
  swapped.reserve(num_pairs());
  for (state_t q1 = 0; q1 < num_left_; ++q1)
    for (state_t q2 : image(q1)) swapped.emplace_back(q2, q1);
  return FiniteRelation(num_right_, num_left_, std::move(swapped));
}

void FiniteRelation::write_text(std::ostream& out) const {
  for (state_t q1 = 0; q1 < num_left_; ++q1)
    for (state_t q2 : image(q1)) out << "r " << q1 << ' ' << q2 << '\n';
}

FiniteRelation FiniteRelation::read_text(std::istream& in, state_t num_left,
                                         state_t num_right) {
  detail::LineReader reader(in);
  std::vector<std::string> tok;
  std::vector<std::pair<state_t, state_t>> pairs;
  while (reader.next(tok)) {
    const std::size_t line = reader.line_number();
    if (tok[0] != "r" || tok.size() != 3)
      detail::parse_fail(line, "expected 'r <left state> <right state>'");
    const state_t q1 = detail::parse_u32(tok[1], line, "left state id");
    const state_t q2 = detail::parse_u32(tok[2], line, "right state id");
    if (q1 >= num_left) detail::parse_fail(line, "left state id " + tok[1] + " out of range");
    if (q2 >= num_right) detail::parse_fail(line, "right state id " + tok[2] + " out of range");
    pairs.emplace_back(q1, q2);
  }
  return FiniteRelation(num_left, num_right, std::move(pairs));
}

}  // namespace symctrl
