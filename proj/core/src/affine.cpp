#include "symctrl/affine.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace symctrl {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

FlowMap::FlowMap(const SwitchedSystem& sys, double tau) : dim_(sys.dim), tau_(tau) {
  if (sys.dim < 1) throw config_error("switched system dimension must be positive");
  if (sys.modes.empty()) throw config_error("switched system needs at least one mode");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw config_error("sampling period must be positive and finite");
  const std::size_t n = static_cast<std::size_t>(sys.dim);
  for (std::size_t p = 0; p < sys.modes.size(); ++p) {
    const AffineMode& mode = sys.modes[p];
    if (mode.a.size() != n * n)
      throw config_error("mode " + std::to_string(p + 1) + " matrix must have " +
                         std::to_string(n * n) + " entries");
    if (mode.b.size() != n)
      throw config_error("mode " + std::to_string(p + 1) + " offset must have " +
                         std::to_string(n) + " entries");
    if (!all_finite(mode.a) || !all_finite(mode.b))
      throw config_error("mode " + std::to_string(p + 1) + " has non-finite entries");
  }

  step_matrix_.reserve(sys.modes.size());
  step_offset_.reserve(sys.modes.size());
  for (std::size_t p = 0; p < sys.modes.size(); ++p) {
    const AffineMode& mode = sys.modes[p];
    /* augmented generator: top-left the mode matrix, top-right the offset,
     * bottom row zero; its exponential carries the flow and its integral */
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(sys.dim + 1, sys.dim + 1);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) aug(r, c) = mode.a[r * n + c] * tau;
    for (std::size_t r = 0; r < n; ++r) aug(r, n) = mode.b[r] * tau;
    const Eigen::MatrixXd e = aug.exp();
    if (!e.allFinite())
      throw config_error("mode " + std::to_string(p + 1) +
                         " step matrix is not finite at this sampling period");

    std::vector<double> m(n * n);
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) m[r * n + c] = e(r, c);
      v[r] = e(r, n);
    }
    step_matrix_.push_back(std::move(m));
    step_offset_.push_back(std::move(v));
  }
}

void FlowMap::step(std::size_t mode, std::span<const double> x, std::span<double> out) const {
  if (mode >= step_matrix_.size()) throw std::out_of_range("mode index out of range");
  const std::size_t n = static_cast<std::size_t>(dim_);
  if (x.size() != n || out.size() != n)
    throw std::invalid_argument("state size does not match the system dimension");
  const std::vector<double>& m = step_matrix_[mode];
  const std::vector<double>& v = step_offset_[mode];
  for (std::size_t r = 0; r < n; ++r) {
    double acc = v[r];
    for (std::size_t c = 0; c < n; ++c) acc += m[r * n + c] * x[c];
    out[r] = acc;
  }
}

std::vector<double> FlowMap::step(std::size_t mode, std::span<const double> x) const {
  std::vector<double> out(static_cast<std::size_t>(dim_));
  step(mode, x, out);
  return out;
}

}  // namespace symctrl
