#ifndef SYMCTRL_AFFINE_HPP_
#define SYMCTRL_AFFINE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "symctrl/types.hpp"

namespace symctrl {

/* one affine vector field dx/dt = a x + b, with a stored row-major */
struct AffineMode {
  std::vector<double> a;
  std::vector<double> b;
};

/* finitely many affine modes over a shared state space; the control input
 * is the active mode index */
struct SwitchedSystem {
  int dim = 0;
  std::vector<AffineMode> modes;
};

/* Exact time step of every mode over a fixed period: stepping solves the
 * affine differential equation in closed form through the exponential of the
 * augmented (dim+1) square matrix [[a, b], [0, 0]], precomputed per mode at
 * construction. Stepping itself is one matrix-vector product, deterministic
 * across runs and thread counts. */
class FlowMap {
 public:
  /* validates shapes and finiteness, then computes the per-mode step
   * matrices; throws config_error on malformed systems, nonpositive or
   * non-finite tau, or a non-finite exponential */
  FlowMap(const SwitchedSystem& sys, double tau);

  int dim() const { return dim_; }
  std::size_t num_modes() const { return step_matrix_.size(); }
  double tau() const { return tau_; }

  /* x' = e^{a tau} x + (integral of e^{a s} ds over [0, tau]) b */
  void step(std::size_t mode, std::span<const double> x, std::span<double> out) const;
  std::vector<double> step(std::size_t mode, std::span<const double> x) const;

 private:
  int dim_;
  double tau_;
  /* per mode: dim x dim row-major matrix and the constant offset */
  std::vector<std::vector<double>> step_matrix_;
  std::vector<std::vector<double>> step_offset_;
};

}  // namespace symctrl

#endif
