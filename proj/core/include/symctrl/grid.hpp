#ifndef SYMCTRL_GRID_HPP_
#define SYMCTRL_GRID_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "symctrl/region.hpp"
#include "symctrl/types.hpp"

namespace symctrl {

/* Uniform cell grid over a closed box. Cell i along a dimension covers
 * [lo + i eta, lo + (i+1) eta]; its point is the center lo + (i + 1/2) eta,
 * clipped to the domain when the last cell sticks out. States are indexed
 * row-major with the lowest dimension fastest. */
class UniformGrid {
 public:
  /* counts are floor((hi - lo) / eta) + 1 per dimension; throws config_error
   * on malformed domains, nonpositive spacing, or more points than a state
   * index can address */
  UniformGrid(Box domain, std::vector<double> spacing);

  int dim() const { return static_cast<int>(spacing_.size()); }
  const Box& domain() const { return domain_; }
  std::span<const double> spacing() const { return spacing_; }
  std::span<const std::uint32_t> counts() const { return counts_; }
  state_t num_points() const { return num_points_; }

  void center(state_t q, std::span<double> out) const;
  std::vector<double> center(state_t q) const;

  std::vector<std::uint32_t> coords(state_t q) const;
  state_t index(std::span<const std::uint32_t> c) const;

  /* true when x lies in the closed domain box */
  bool in_domain(std::span<const double> x) const;

  /* nearest grid point to x, ties toward the lower index per dimension;
   * empty when x leaves the domain */
  std::optional<state_t> nearest(std::span<const double> x) const;

  /* ascending indices of every grid point within radius of x; closed
   * comparison, so boundary points are included */
  std::vector<state_t> within(std::span<const double> x, double radius, Norm norm) const;

  bool operator==(const UniformGrid&) const = default;

 private:
  Box domain_;
  std::vector<double> spacing_;
  std::vector<std::uint32_t> counts_;
  state_t num_points_ = 0;
};

}  // namespace symctrl

#endif
