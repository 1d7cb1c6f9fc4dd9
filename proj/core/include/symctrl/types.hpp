#ifndef SYMCTRL_TYPES_HPP_
#define SYMCTRL_TYPES_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace symctrl {

using state_t = std::uint32_t;
using action_t = std::uint32_t;

/* saturating time sentinel: 1 + infinity stays infinity */
inline constexpr std::uint32_t time_infinity = std::numeric_limits<std::uint32_t>::max();

inline std::uint32_t saturating_succ(std::uint32_t v) {
  return v == time_infinity ? time_infinity : v + 1u;
}

enum class Norm { l2, linf };

/* distance between output points; both spans must have equal size */
double distance(std::span<const double> a, std::span<const double> b, Norm n);

/* canonical float serialization, 17 significant digits (%.17g) */
std::string format_double(double v);

/* scenario or CLI input that cannot be acted on (exit code 1) */
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* a state with output in the safe region but no enabled action (exit code 3) */
struct blocking_state_error : std::runtime_error {
  state_t state;
  blocking_state_error(const std::string& what, state_t q)
      : std::runtime_error(what), state(q) {}
};

}  // namespace symctrl

#endif
