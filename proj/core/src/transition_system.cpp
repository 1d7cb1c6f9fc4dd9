#include "symctrl/transition_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "text_io.hpp"

namespace symctrl {

namespace {

/* upper bound on num_states * num_actions, keeps the offset table allocatable */
constexpr std::uint64_t max_slots = std::uint64_t{1} << 28;

}  // namespace

void TransitionSystem::check_state(state_t q) const {
  if (q >= num_states_)
    throw std::out_of_range("state id " + std::to_string(q) + " out of range");
}

void TransitionSystem::check_action(action_t l) const {
  if (l >= num_actions_)
    throw std::out_of_range("action id " + std::to_string(l) + " out of range");
}

std::span<const state_t> TransitionSystem::successors(state_t q, action_t l) const {
  check_state(q);
  check_action(l);
  const std::size_t s = slot(q, l);
  return {successors_.data() + offsets_[s], successors_.data() + offsets_[s + 1]};
}

bool TransitionSystem::is_enabled(state_t q, action_t l) const {
  check_state(q);
  check_action(l);
  const std::size_t s = slot(q, l);
  return offsets_[s] != offsets_[s + 1];
}

std::vector<action_t> TransitionSystem::enabled(state_t q) const {
  check_state(q);
  std::vector<action_t> out;
  for (action_t l = 0; l < num_actions_; ++l) {
    const std::size_t s = slot(q, l);
    if (offsets_[s] != offsets_[s + 1]) out.push_back(l);
  }
  return out;
}

bool TransitionSystem::is_blocking(state_t q) const {
  check_state(q);
  const std::size_t base = slot(q, 0);
  return offsets_[base] == offsets_[base + num_actions_];
}

std::span<const double> TransitionSystem::output(state_t q) const {
  check_state(q);
  return {outputs_.data() + static_cast<std::size_t>(q) * dim_,
          static_cast<std::size_t>(dim_)};
}

double TransitionSystem::output_distance(state_t q, state_t p) const {
  return distance(output(q), output(p), norm_);
}

void TransitionSystem::write_text(std::ostream& out) const {
  out << "ts " << num_states_ << ' ' << num_actions_ << ' ' << dim_ << '\n';
  out << "norm " << (norm_ == Norm::l2 ? "l2" : "linf") << '\n';
  for (state_t q = 0; q < num_states_; ++q) {
    out << "o " << q;
    for (double v : output(q)) out << ' ' << format_double(v);
    out << '\n';
  }
  for (state_t q = 0; q < num_states_; ++q) {
    for (action_t l = 0; l < num_actions_; ++l) {
      const auto succ = successors(q, l);
      if (succ.empty()) continue;
      out << "t " << q << ' ' << l;
      for (state_t s : succ) out << ' ' << s;
      out << '\n';
    }
  }
}

TransitionSystem TransitionSystem::read_text(std::istream& in) {
  detail::LineReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok)) throw config_error("transition-system input is empty");
  if (tok[0] != "ts" || tok.size() != 4)
    detail::parse_fail(reader.line_number(), "expected header 'ts <states> <actions> <dim>'");
  const state_t n = detail::parse_u32(tok[1], reader.line_number(), "state count");
  const action_t a = detail::parse_u32(tok[2], reader.line_number(), "action count");
  const std::uint32_t d = detail::parse_u32(tok[3], reader.line_number(), "dimension");
  if (n == 0 || a == 0 || d == 0)
    detail::parse_fail(reader.line_number(),
                       "state count, action count, and dimension must be positive");

  Builder builder(n, a, static_cast<int>(d));
  std::vector<char> output_seen(n, 0);
  std::vector<double> point(d, 0.0);
  bool norm_seen = false;
  while (reader.next(tok)) {
    const std::size_t line = reader.line_number();
    if (tok[0] == "norm") {
      if (norm_seen) detail::parse_fail(line, "duplicate norm line");
      if (tok.size() != 2 || (tok[1] != "l2" && tok[1] != "linf"))
        detail::parse_fail(line, "expected 'norm l2' or 'norm linf'");
      builder.set_norm(tok[1] == "l2" ? Norm::l2 : Norm::linf);
      norm_seen = true;
    } else if (tok[0] == "o") {
      if (tok.size() != 2 + static_cast<std::size_t>(d))
        detail::parse_fail(line, "expected 'o <state> <" + std::to_string(d) + " coordinates>'");
      const state_t q = detail::parse_u32(tok[1], line, "state id");
      if (q >= n) detail::parse_fail(line, "state id " + tok[1] + " out of range");
      if (output_seen[q]) detail::parse_fail(line, "duplicate output for state " + tok[1]);
      for (std::uint32_t k = 0; k < d; ++k)
        point[k] = detail::parse_double(tok[2 + k], line, "coordinate");
      builder.set_output(q, point);
      output_seen[q] = 1;
    } else if (tok[0] == "t") {
      if (tok.size() < 4)
        detail::parse_fail(line, "expected 't <state> <action> <succ..>'");
      const state_t q = detail::parse_u32(tok[1], line, "state id");
      const action_t l = detail::parse_u32(tok[2], line, "action id");
      if (q >= n) detail::parse_fail(line, "state id " + tok[1] + " out of range");
      if (l >= a) detail::parse_fail(line, "action id " + tok[2] + " out of range");
      for (std::size_t k = 3; k < tok.size(); ++k) {
        const state_t succ = detail::parse_u32(tok[k], line, "successor id");
        if (succ >= n) detail::parse_fail(line, "successor id " + tok[k] + " out of range");
        builder.add_transition(q, l, succ);
      }
    } else {
      detail::parse_fail(line, "unknown directive '" + tok[0] + "'");
    }
  }
  for (state_t q = 0; q < n; ++q)
    if (!output_seen[q])
      throw config_error("state " + std::to_string(q) + " has no output line");
  return builder.build();
}

TransitionSystem TransitionSystem::from_parts(state_t num_states, action_t num_actions,
                                              int dim, Norm norm,
                                              std::vector<double> outputs,
                                              std::vector<std::uint32_t> offsets,
                                              std::vector<state_t> successors,
                                              std::vector<std::string> action_names) {
  if (num_states == 0 || num_actions == 0 || dim <= 0)
    throw config_error("state count, action count, and dimension must be positive");
  const std::uint64_t slots =
      static_cast<std::uint64_t>(num_states) * num_actions;
  if (slots > max_slots) throw config_error("state-action table exceeds the 2^28 slot cap");
  if (outputs.size() != static_cast<std::size_t>(num_states) * dim)
    throw config_error("output array size does not match num_states * dim");
  for (double v : outputs)
    if (!std::isfinite(v)) throw config_error("outputs must be finite");
  if (offsets.size() != slots + 1 || offsets.front() != 0 ||
      offsets.back() != successors.size())
    throw config_error("offset array does not describe the successor array");
  if (successors.size() >= std::numeric_limits<std::uint32_t>::max())
    throw config_error("transition count overflows the 32-bit successor index");
  for (std::size_t s = 0; s < slots; ++s) {
    if (offsets[s] > offsets[s + 1]) throw config_error("offset array must be non-decreasing");
    for (std::uint32_t i = offsets[s]; i < offsets[s + 1]; ++i) {
      if (successors[i] >= num_states) throw config_error("successor id out of range");
      if (i + 1 < offsets[s + 1] && successors[i] >= successors[i + 1])
        throw config_error("successor sets must be sorted ascending without duplicates");
    }
  }
  if (!action_names.empty() && action_names.size() != num_actions)
    throw config_error("action name table size does not match the action count");

  TransitionSystem ts;
  ts.num_states_ = num_states;
  ts.num_actions_ = num_actions;
  ts.dim_ = dim;
  ts.norm_ = norm;
  ts.outputs_ = std::move(outputs);
  ts.offsets_ = std::move(offsets);
  ts.successors_ = std::move(successors);
  ts.action_names_ = std::move(action_names);
  return ts;
}

TransitionSystem::Builder::Builder(state_t num_states, action_t num_actions, int dim,
                                   Norm norm)
    : num_states_(num_states),
      num_actions_(num_actions),
      dim_(dim),
      norm_(norm) {
  if (num_states == 0 || num_actions == 0 || dim <= 0)
    throw config_error("state count, action count, and dimension must be positive");
  if (static_cast<std::uint64_t>(num_states) * num_actions > max_slots)
    throw config_error("state-action table exceeds the 2^28 slot cap");
  outputs_.assign(static_cast<std::size_t>(num_states) * dim, 0.0);
  output_set_.assign(num_states, 0);
}

TransitionSystem::Builder& TransitionSystem::Builder::set_norm(Norm norm) {
  norm_ = norm;
  return *this;
}

TransitionSystem::Builder& TransitionSystem::Builder::set_output(state_t q,
                                                                 std::span<const double> x) {
  if (q >= num_states_)
    throw std::out_of_range("state id " + std::to_string(q) + " out of range");
  if (x.size() != static_cast<std::size_t>(dim_))
    throw config_error("output dimension mismatch for state " + std::to_string(q));
  for (double v : x)
    if (!std::isfinite(v))
      throw config_error("output for state " + std::to_string(q) + " is not finite");
  std::copy(x.begin(), x.end(), outputs_.begin() + static_cast<std::size_t>(q) * dim_);
  output_set_[q] = 1;
  return *this;
}

TransitionSystem::Builder& TransitionSystem::Builder::add_transition(state_t q, action_t l,
                                                                     state_t succ) {
  if (q >= num_states_ || succ >= num_states_)
    throw std::out_of_range("state id out of range in transition");
  if (l >= num_actions_)
    throw std::out_of_range("action id " + std::to_string(l) + " out of range");
  edges_.push_back({q, l, succ});
  return *this;
}

TransitionSystem::Builder& TransitionSystem::Builder::set_action_name(action_t l,
                                                                      std::string name) {
  if (l >= num_actions_)
    throw std::out_of_range("action id " + std::to_string(l) + " out of range");
  if (action_names_.empty()) action_names_.resize(num_actions_);
  action_names_[l] = std::move(name);
  return *this;
}

TransitionSystem TransitionSystem::Builder::build() {
  for (state_t q = 0; q < num_states_; ++q)
    if (!output_set_[q]) throw config_error("state " + std::to_string(q) + " has no output");
  std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.q, x.l, x.succ) < std::tie(y.q, y.l, y.succ);
  });
  edges_.erase(std::unique(edges_.begin(), edges_.end(),
                           [](const Edge& x, const Edge& y) {
                             return x.q == y.q && x.l == y.l && x.succ == y.succ;
                           }),
               edges_.end());
  if (edges_.size() >= std::numeric_limits<std::uint32_t>::max())
    throw config_error("transition count overflows the 32-bit successor index");

  const std::size_t slots = static_cast<std::size_t>(num_states_) * num_actions_;
  std::vector<std::uint32_t> offsets(slots + 1, 0);
  for (const Edge& e : edges_)
    ++offsets[static_cast<std::size_t>(e.q) * num_actions_ + e.l + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<state_t> successors(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) successors[i] = edges_[i].succ;

  TransitionSystem ts;
  ts.num_states_ = num_states_;
  ts.num_actions_ = num_actions_;
  ts.dim_ = dim_;
  ts.norm_ = norm_;
  ts.outputs_ = std::move(outputs_);
  ts.offsets_ = std::move(offsets);
  ts.successors_ = std::move(successors);
  ts.action_names_ = std::move(action_names_);
  edges_.clear();
  output_set_.clear();
  return ts;
}

}  // namespace symctrl
