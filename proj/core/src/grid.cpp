#include "symctrl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace symctrl {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

UniformGrid::UniformGrid(Box domain, std::vector<double> spacing)
    : domain_(std::move(domain)), spacing_(std::move(spacing)) {
  const std::size_t d = spacing_.size();
  if (d == 0) {
    throw config_error("grid needs at least one dimension");
  }
  if (domain_.lo.size() != d || domain_.hi.size() != d) {
    throw config_error("grid domain dimension does not match spacing");
  }
  counts_.resize(d);
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    const double lo = domain_.lo[k];
    const double hi = domain_.hi[k];
    const double eta = spacing_[k];
    if (!finite(lo) || !finite(hi) || lo > hi) {
      throw config_error("grid domain is not a finite box in dimension " +
                         std::to_string(k + 1));
    }
    if (!finite(eta) || eta <= 0.0) {
      throw config_error("grid spacing must be positive in dimension " +
                         std::to_string(k + 1));
    }
    const double cells = std::floor((hi - lo) / eta) + 1.0;
    if (cells >= 4294967295.0) {
      throw config_error("grid has too many points in dimension " +
                         std::to_string(k + 1));
    }
    counts_[k] = static_cast<std::uint32_t>(cells);
    total *= counts_[k];
    if (total > std::numeric_limits<state_t>::max()) {
      throw config_error("grid has more points than a state index can hold");
    }
  }
  num_points_ = static_cast<state_t>(total);
}

void UniformGrid::center(state_t q, std::span<double> out) const {
  if (q >= num_points_) {
    throw std::out_of_range("grid point index out of range");
  }
  if (out.size() != spacing_.size()) {
    throw std::invalid_argument("center output span has the wrong dimension");
  }
  state_t rest = q;
  for (std::size_t k = 0; k < spacing_.size(); ++k) {
    const std::uint32_t c = rest % counts_[k];
    rest /= counts_[k];
    const double raw = domain_.lo[k] + (c + 0.5) * spacing_[k];
    out[k] = std::min(raw, domain_.hi[k]);
  }
}

std::vector<double> UniformGrid::center(state_t q) const {
  std::vector<double> out(spacing_.size());
  center(q, out);
  return out;
}

std::vector<std::uint32_t> UniformGrid::coords(state_t q) const {
  if (q >= num_points_) {
    throw std::out_of_range("grid point index out of range");
  }
  std::vector<std::uint32_t> c(spacing_.size());
  state_t rest = q;
  for (std::size_t k = 0; k < spacing_.size(); ++k) {
    c[k] = rest % counts_[k];
    rest /= counts_[k];
  }
  return c;
}

state_t UniformGrid::index(std::span<const std::uint32_t> c) const {
  if (c.size() != spacing_.size()) {
    throw std::invalid_argument("coordinate tuple has the wrong dimension");
  }
  std::uint64_t q = 0;
  std::uint64_t stride = 1;
  for (std::size_t k = 0; k < spacing_.size(); ++k) {
    if (c[k] >= counts_[k]) {
      throw std::out_of_range("grid coordinate out of range in dimension " +
                              std::to_string(k + 1));
    }
    q += stride * c[k];
    stride *= counts_[k];
  }
  return static_cast<state_t>(q);
}

bool UniformGrid::in_domain(std::span<const double> x) const {
  if (x.size() != spacing_.size()) {
    throw std::invalid_argument("point has the wrong dimension");
  }
  for (std::size_t k = 0; k < spacing_.size(); ++k) {
    if (!(x[k] >= domain_.lo[k] && x[k] <= domain_.hi[k])) {
      return false;
    }
  }
  return true;
}

std::optional<state_t> UniformGrid::nearest(std::span<const double> x) const {
  if (!in_domain(x)) {
    return std::nullopt;
  }
  std::uint64_t q = 0;
  std::uint64_t stride = 1;
  for (std::size_t k = 0; k < spacing_.size(); ++k) {
    const double lo = domain_.lo[k];
    const double eta = spacing_[k];
    const std::uint32_t n = counts_[k];
    const double raw = std::floor((x[k] - lo) / eta);
    const std::int64_t base =
        raw <= 0.0 ? 0 : static_cast<std::int64_t>(std::min(raw, double(n - 1)));
    std::uint32_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::int64_t c = std::max<std::int64_t>(0, base - 1);
         c <= std::min<std::int64_t>(n - 1, base + 1); ++c) {
      const double center_c = std::min(lo + (c + 0.5) * eta, domain_.hi[k]);
      const double gap = std::abs(x[k] - center_c);
      if (gap < best_gap) {
        best_gap = gap;
        best = static_cast<std::uint32_t>(c);
      }
    }
    q += stride * best;
    stride *= counts_[k];
  }
  return static_cast<state_t>(q);
}

std::vector<state_t> UniformGrid::within(std::span<const double> x,
                                         double radius, Norm norm) const {
  if (x.size() != spacing_.size()) {
    throw std::invalid_argument("point has the wrong dimension");
  }
  if (!(radius >= 0.0)) {
    throw std::invalid_argument("radius must be nonnegative");
  }
  const std::size_t d = spacing_.size();
  /* per-dimension index window; one slack cell on each side absorbs the
   * clipped last center and rounding of the bound arithmetic */
  std::vector<std::uint32_t> lo_c(d), hi_c(d), cur(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double lo = domain_.lo[k];
    const double eta = spacing_[k];
    const double n = counts_[k];
    double a = std::floor((x[k] - radius - lo) / eta - 0.5) - 1.0;
    double b = std::floor((x[k] + radius - lo) / eta - 0.5) + 1.0;
    a = std::clamp(a, 0.0, n - 1.0);
    b = std::clamp(b, 0.0, n - 1.0);
    lo_c[k] = static_cast<std::uint32_t>(a);
    hi_c[k] = static_cast<std::uint32_t>(b);
    if (lo_c[k] > hi_c[k]) {
      return {};
    }
    cur[k] = lo_c[k];
  }
  std::vector<state_t> out;
  std::vector<double> point(d);
  /* odometer over the window with the lowest dimension fastest, which walks
   * global indices in ascending order */
  for (;;) {
    const state_t q = index(cur);
    center(q, point);
    if (distance(point, x, norm) <= radius) {
      out.push_back(q);
    }
    std::size_t k = 0;
    while (k < d && cur[k] == hi_c[k]) {
      cur[k] = lo_c[k];
      ++k;
    }
    if (k == d) {
      break;
    }
    ++cur[k];
  }
  return out;
}

}  // namespace symctrl
