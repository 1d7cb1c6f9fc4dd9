#include "symctrl/controller.hpp"

#include <bit>
#include <stdexcept>
#include <string>
#include <utility>

namespace symctrl {

namespace {

std::uint64_t high_bits(action_t num_actions) {
  return num_actions >= 64 ? 0 : ~std::uint64_t{0} << num_actions;
}

}  // namespace

Controller::Controller(state_t num_states, action_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), masks_(num_states, 0) {
  if (num_states == 0) throw config_error("controller needs at least one state");
  if (num_actions == 0 || num_actions > max_actions)
    throw config_error("controller action count must be in [1, 64]");
}

Controller::Controller(state_t num_states, action_t num_actions,
                       std::vector<std::uint64_t> masks)
    : Controller(num_states, num_actions) {
  if (masks.size() != num_states)
    throw config_error("mask array size does not match the state count");
  for (std::uint64_t m : masks)
    if (m & high_bits(num_actions))
      throw config_error("mask enables an action at or above the action count");
  masks_ = std::move(masks);
}

void Controller::check_state(state_t q) const {
  if (q >= num_states_)
    throw std::out_of_range("state id " + std::to_string(q) + " out of range");
}

void Controller::check_action(action_t l) const {
  if (l >= num_actions_)
    throw std::out_of_range("action id " + std::to_string(l) + " out of range");
}

bool Controller::contains(state_t q, action_t l) const {
  check_state(q);
  check_action(l);
  return (masks_[q] >> l) & 1u;
}

void Controller::insert(state_t q, action_t l) {
  check_state(q);
  check_action(l);
  masks_[q] |= std::uint64_t{1} << l;
}

void Controller::erase(state_t q, action_t l) {
  check_state(q);
  check_action(l);
  masks_[q] &= ~(std::uint64_t{1} << l);
}

std::uint64_t Controller::mask(state_t q) const {
  check_state(q);
  return masks_[q];
}

void Controller::set_mask(state_t q, std::uint64_t m) {
  check_state(q);
  if (m & high_bits(num_actions_))
    throw config_error("mask enables an action at or above the action count");
  masks_[q] = m;
}

std::vector<action_t> Controller::actions(state_t q) const {
  check_state(q);
  std::vector<action_t> out;
  for (std::uint64_t m = masks_[q]; m != 0; m &= m - 1)
    out.push_back(static_cast<action_t>(std::countr_zero(m)));
  return out;
}

bool Controller::is_blocking(state_t q) const {
  check_state(q);
  return masks_[q] == 0;
}

state_t Controller::domain_size() const {
  state_t n = 0;
  for (std::uint64_t m : masks_) n += (m != 0);
  return n;
}

std::size_t Controller::num_enabled_pairs() const {
  std::size_t n = 0;
  for (std::uint64_t m : masks_) n += std::popcount(m);
  return n;
}

WellDefinedCheck is_well_defined(const TransitionSystem& t, const Controller& s) {
  if (t.num_states() != s.num_states() || t.num_actions() != s.num_actions())
    throw std::invalid_argument("controller and system disagree on state or action counts");
  for (state_t q = 0; q < t.num_states(); ++q) {
    for (std::uint64_t m = s.mask(q); m != 0; m &= m - 1) {
      const auto l = static_cast<action_t>(std::countr_zero(m));
      if (!t.is_enabled(q, l)) return {false, q, l};
    }
  }
  return {};
}

TransitionSystem apply_controller(const TransitionSystem& t, const Controller& s) {
  const WellDefinedCheck check = is_well_defined(t, s);
  if (!check.ok)
    throw std::invalid_argument("controller is not well-defined: enables action " +
                                std::to_string(check.action) + " at state " +
                                std::to_string(check.state) + " where it is disabled");

  const state_t n = t.num_states();
  const action_t a = t.num_actions();
  std::vector<std::uint32_t> offsets(static_cast<std::size_t>(n) * a + 1, 0);
  std::size_t total = 0;
  for (state_t q = 0; q < n; ++q) {
    for (action_t l = 0; l < a; ++l) {
      const std::size_t slot = static_cast<std::size_t>(q) * a + l;
      if (s.contains(q, l)) total += t.successors(q, l).size();
      offsets[slot + 1] = static_cast<std::uint32_t>(total);
    }
  }
  std::vector<state_t> successors;
  successors.reserve(total);
  for (state_t q = 0; q < n; ++q)
    for (action_t l = 0; l < a; ++l)
      if (s.contains(q, l)) {
        const auto span = t.successors(q, l);
        successors.insert(successors.end(), span.begin(), span.end());
      }

  std::vector<double> outputs;
  outputs.reserve(static_cast<std::size_t>(n) * t.dimension());
  for (state_t q = 0; q < n; ++q) {
    const auto x = t.output(q);
    outputs.insert(outputs.end(), x.begin(), x.end());
  }
  return TransitionSystem::from_parts(n, a, t.dimension(), t.norm(), std::move(outputs),
                                      std::move(offsets), std::move(successors),
                                      t.action_names());
}

bool is_more_permissive(const Controller& s1, const Controller& s2) {
  if (s1.num_states() != s2.num_states() || s1.num_actions() != s2.num_actions())
    throw std::invalid_argument("controllers disagree on state or action counts");
  for (state_t q = 0; q < s1.num_states(); ++q)
    if (s2.mask(q) & ~s1.mask(q)) return false;
  return true;
}

}  // namespace symctrl
