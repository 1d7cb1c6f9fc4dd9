#ifndef SYMCTRL_REGION_HPP_
#define SYMCTRL_REGION_HPP_

#include <optional>
#include <span>
#include <vector>

#include "symctrl/types.hpp"

namespace symctrl {

/* closed axis-aligned box; degenerate (lo == hi in some dimension) is legal */
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  bool operator==(const Box&) const = default;
};

/* Output-space region: a finite union of closed boxes under a norm tag.
 * The box list is canonicalized (sorted by lo lexicographically, then hi).
 * An empty union is legal and contains nothing.
 *
 * Contraction and expansion are the closed-ball operators
 *   contraction(phi) = { o in region : ball(o, phi) subset of region }
 *   expansion(phi)   = { o : dist(o, region) <= phi }
 * with non-strict boundaries throughout. Membership in the expansion is exact
 * in any dimension. Membership in the contraction is exact with respect to
 * the whole union for dim <= 2 (interval and rectangle covers of the ball;
 * under l2 a covered bounding square is accepted and residual gap rectangles
 * are tested against the disk). For dim >= 3 a sound under-approximation is
 * used (the union of per-box shrinks) and contraction_exact() reports false. */
class Region {
 public:
  Region(int dim, Norm norm, std::vector<Box> boxes);

  int dim() const { return dim_; }
  Norm norm() const { return norm_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  bool empty() const { return boxes_.empty(); }

  bool contains(std::span<const double> o) const;
  bool in_expansion(double phi, std::span<const double> o) const;
  bool in_contraction(double phi, std::span<const double> o) const;

  /* true when in_contraction decides membership exactly at this dimension */
  bool contraction_exact() const { return dim_ <= 2; }

  /* distance from o to the region (+inf for the empty region) */
  double distance_to(std::span<const double> o) const;

  /* test evidence: when in_contraction returns false on a point inside the
   * region, gap_point holds a point of the phi-ball outside the union
   * (up to the documented closed-face tangency cases under l2) */
  struct ContractionResult {
    bool inside = false;
    bool exact = true;
    std::optional<std::vector<double>> gap_point;
  };
  ContractionResult in_contraction_checked(double phi,
                                           std::span<const double> o) const;

  /* exact box-in-union cover test for dim <= 2; for dim >= 3 a deterministic
   * sample lattice over b is tested (sound for rejection only) */
  bool covers_box(const Box& b) const;

  bool operator==(const Region& other) const = default;

 private:
  int dim_;
  Norm norm_;
  std::vector<Box> boxes_;
};

/* A synthesis set: a region observed either as-is or through one metric
 * transform. Used so fixed points can run directly on contracted or expanded
 * safe and target sets. */
struct RegionView {
  Region region;
  double contract = 0.0;
  double expand = 0.0;

  bool member(std::span<const double> o) const;
  /* containment precheck for target-inside-safe style contracts; exact on the
   * base regions for dim <= 2, monotone under equal transforms */
  static bool contained_in(const RegionView& inner, const RegionView& outer);
};

}  // namespace symctrl

#endif
