#pragma once

/// @file analysis.hpp
/// @brief Parameter sweeps over the tent family and the quantities derived
/// from them: L1 distances between invariant densities, Hölder fits,
/// entropies, closed-form bound checks, and operator-gap estimates.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ulamtent/bv.hpp"
#include "ulamtent/maps.hpp"
#include "ulamtent/ulam.hpp"

namespace ulamtent {

struct EntropyEstimate {
  double lebesgue = 0.0;  // ∫ log J dm
  double measure = 0.0;   // ∫ log J rho dm
};

struct DensityPair {
  double t = 0.0;  // the larger parameter
  double s = 0.0;
  double l1_distance = 0.0;
};

struct SweepResult {
  std::vector<double> t_values;
  std::vector<DensityVector> densities;
  std::vector<EntropyEstimate> entropies;
  std::vector<double> residuals;  // invariance residual per t
  int resolution = 0;
  std::vector<DensityPair> pairs;  // all i < j, in grid order
};

/// steps equispaced points from t_min to t_max inclusive.
std::vector<double> equispaced_grid(double t_min, double t_max, int steps);

/// For each t: tent map, Ulam matrix, stationary density, entropy; then all
/// pairwise L1 distances. The grid must be strictly increasing inside
/// [tau, 1]. Solver failures are rethrown as NonConvergenceError naming t.
SweepResult sweep(std::span<const double> t_grid, const UlamPartition& part);

/// sum_j |a_j - b_j| m(Q_j). Throws std::invalid_argument on a size mismatch.
double l1_distance(const DensityVector& a, const DensityVector& b, const UlamPartition& part);

struct GapDistance {
  double gap = 0.0;
  double distance = 0.0;
};

struct HolderFit {
  double c_hat = 0.0;
  double eta_hat = 0.0;
  double r_squared = 0.0;
  int pairs_used = 0;
  double min_distance = 0.0;
  /// max over used pairs of distance / (c_hat gap^eta_hat) - 1, floored at 0.
  double slack = 0.0;
};

/// Least-squares line through (log gap, log distance) over pairs with
/// distance > min_distance and gap > 0. Throws std::invalid_argument with
/// fewer than 3 usable pairs or when all usable gaps are equal.
HolderFit holder_fit(std::span<const GapDistance> pairs, double min_distance);

/// Entropy formula against Lebesgue and against rho, with J evaluated at
/// cell centroids. Throws std::domain_error if J <= 0 somewhere.
EntropyEstimate entropy(const PiecewiseAffineMap& map, const DensityVector& rho, const UlamPartition& part);
EntropyEstimate entropy(TentParams t, const DensityVector& rho, const UlamPartition& part);

/// Time average of log J over seeded orbits after a 100-step transient.
double birkhoff_entropy(const PiecewiseAffineMap& map, int orbits, int length, std::uint64_t seed);
double birkhoff_entropy(TentParams t, int orbits, int length, std::uint64_t seed);

struct BoundItem {
  std::string name;  // "a" .. "e"
  double computed = 0.0;
  double paper_bound = 0.0;
  bool satisfied = false;
};

struct BoundReport {
  double t = 0.0;
  double s = 0.0;
  std::vector<BoundItem> items;
};

/// Closed-form closeness estimates for the tent pair (t, s):
///   a  m(phi_{u,i}^{-1}(phi_u(R_i) \ phi_v(R_i))), u = max(t,s), v = min(t,s)  vs |t-s|/tau
///   b  ||psi_{t,s,i} - id||_0                                   vs sqrt2/tau |t-s|
///   c  |J_s/(J_t∘psi) - 1|                                      vs 2/tau^2 |t-s|
///   d  ||log J_s - log J_t||_2                                  vs (2/tau) m(omega) |t-s|
///   e  ||log J_t||_inf                                          vs log 2
/// Items a-c take the maximum over both branches.
BoundReport verify_bounds(TentParams t, TentParams s);

/// Item a computed geometrically for one branch.
double image_difference_pullback(TentParams t, TentParams s, std::size_t branch);

/// max over the suite of ||L_t f - L_s f||_1 / ||f||_BV.
double tnorm_estimate(const TransferMatrix& P_t, const TransferMatrix& P_s, const UlamPartition& part,
                      const TestSuite& suite);
double tnorm_estimate(TentParams t, TentParams s, const UlamPartition& part, const TestSuite& suite);

/// rho * ∫ f dm
std::vector<double> spectral_projection(const DensityVector& rho, std::span<const double> f,
                                        const UlamPartition& part);

}  // namespace ulamtent
