#pragma once

/// @file maps.hpp
/// @brief Piecewise-affine expanding maps on a convex planar domain.
///
/// A map is a finite list of affine branches whose polygonal domains tile
/// the domain omega (up to measure zero) and whose images stay inside omega.
/// The two-dimensional tent family t * phi_1 on the triangle
/// (0,0),(2,0),(1,1) is the built-in fixture.

#include <optional>
#include <stdexcept>
#include <vector>

#include "ulamtent/geometry.hpp"

namespace ulamtent {

/// Lower end of the admissible tent parameter range, 2^{-1/2} (1 + sqrt 2)^{1/4}.
double tau();

/// Iterate at which the tent family satisfies the uniformity condition.
inline constexpr int kTentUniformityIterate = 6;

struct Branch {
  Polygon domain;
  AffineMap2 forward;
  AffineMap2 inverse;
  double jacobian = 0.0;  // |det forward.linear|, constant on the domain
};

struct MapEvaluation {
  Point2 image;
  std::size_t branch = 0;  // zero-based
};

class PiecewiseAffineMap {
 public:
  /// Builds branches from (domain, forward) pairs and validates that the
  /// domains tile omega, are pairwise interior-disjoint, and map into omega.
  /// Throws std::invalid_argument on violation.
  PiecewiseAffineMap(Polygon omega, const std::vector<std::pair<Polygon, AffineMap2>>& pieces);

  const Polygon& omega() const { return omega_; }
  const std::vector<Branch>& branches() const { return branches_; }

  /// Image of a branch domain under its forward map.
  Polygon image(std::size_t branch) const;

  /// Applies the first branch (in index order) whose domain contains x.
  /// Throws std::out_of_range when x is outside omega.
  MapEvaluation eval(Point2 x) const;

  /// Index of the first branch containing x, or nullopt.
  std::optional<std::size_t> branch_of(Point2 x) const;

 private:
  Polygon omega_;
  std::vector<Branch> branches_;
};

/// Validated tent parameter, tau() <= t <= 1.
class TentParams {
 public:
  /// Throws std::out_of_range outside [tau, 1].
  explicit TentParams(double t);
  double t() const { return t_; }

 private:
  double t_;
};

Polygon tent_omega();
Polygon tent_left_triangle();   // R1: 0 <= x2 <= x1 <= 1
Polygon tent_right_triangle();  // R2: 1 <= x1 <= 2, 0 <= x2 <= 2 - x1

/// Two-branch tent map t * phi_1. Branch order is (R1, R2), so points on the
/// shared segment x1 = 1 are evaluated with the R1 branch.
PiecewiseAffineMap tent_family(TentParams params);

/// The map phi^j materialized over all admissible itineraries of length j:
/// one branch per nonempty domain D_{b1} ∩ f_{b1}^{-1}(D_{b2}) ∩ ...
PiecewiseAffineMap iterate_map(const PiecewiseAffineMap& map, int iterate);

struct ConditionConstants {
  double sigma = 0.0;  // sup of ||D(phi_i^{-1})|| over branches
  double delta = 0.0;  // log-Jacobian distortion constant
  std::optional<double> alpha;
  std::optional<double> beta;
  int ell = kTentUniformityIterate;
  std::optional<double> theta;
  std::optional<double> big_m;
};

/// Expansion and distortion constants of phi^iterate. alpha, beta, theta and
/// big_m are left unset: no closed form is available for them here.
ConditionConstants condition_constants(const PiecewiseAffineMap& map, int iterate,
                                       int ell = kTentUniformityIterate);

class EmptyComparisonDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// psi = phi_{t,i}^{-1} ∘ phi_{s,i} restricted to
/// K = phi_{s,i}^{-1}(phi_t(R_i) ∩ phi_s(R_i)).
struct ComparisonMap {
  AffineMap2 psi;
  Polygon k_set;
  std::size_t branch_index = 0;  // zero-based
  double sup_deviation = 0.0;    // max over K of |psi(x) - x|, attained at a vertex
};

/// Throws EmptyComparisonDomain when K is empty, std::out_of_range for a bad
/// branch index.
ComparisonMap comparison_map(const PiecewiseAffineMap& map_t, const PiecewiseAffineMap& map_s,
                             std::size_t branch_index);
ComparisonMap comparison_map(TentParams t, TentParams s, std::size_t branch_index);

/// |J_s / (J_t ∘ psi) - 1| on one branch; for affine branches both Jacobians are constants.
double jacobian_ratio_deviation(const PiecewiseAffineMap& map_t, const PiecewiseAffineMap& map_s,
                                std::size_t branch_index);
/// Tent closed form |s^2/t^2 - 1|.
double jacobian_ratio_deviation(TentParams t, TentParams s);

}  // namespace ulamtent
