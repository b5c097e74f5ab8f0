#pragma once

/// @file bv.hpp
/// @brief Bounded variation of piecewise-constant grid functions.
///
/// For f constant on the cells of a partition, the variation is the sum of
/// jumps across interior edges plus the trace on the boundary of omega:
///
///     V(f) = sum_{i~j} |f_i - f_j| len(Q_i ∩ Q_j) + sum_i |f_i| len(Q_i ∩ ∂omega).
///
/// This is exact for piecewise-constant functions. The module also houses the
/// numerical checks of the comparison-map estimate, the Sobolev inequality
/// with exponent 2 in the plane, and the Lasota-Yorke inequality.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulamtent/maps.hpp"
#include "ulamtent/ulam.hpp"

namespace ulamtent {

struct GridFunction {
  std::string descriptor;
  std::vector<double> values;
};

struct TestSuite {
  std::uint64_t seed = 0;
  std::vector<GridFunction> functions;
};

/// Deterministic mix of random convex-polygon indicators, truncated
/// trigonometric polynomials sampled at centroids, and random block fields.
/// Every function has positive variation.
TestSuite make_test_suite(const UlamPartition& part, std::uint64_t seed, int count = 20);

double discrete_variation(std::span<const double> f, const UlamPartition& part);

/// ||f||_1 + V(f)
double bv_norm(std::span<const double> f, const UlamPartition& part);

struct LemmaAvResult {
  double numerator = 0.0;      // sum over cells in K of |f(psi(c)) - f(c)| m(Q)
  double sup_deviation = 0.0;  // ||psi - id||_0 on K
  double variation = 0.0;      // V(f)
  double ratio = 0.0;          // numerator / (sup_deviation * variation), 0 when degenerate
  bool degenerate = false;     // zero denominator
};

/// Centroid-lookup estimate of ∫_K |f∘psi - f| dm / (||psi - id||_0 V(f)).
LemmaAvResult lemma_av_ratio(std::span<const double> f, const ComparisonMap& psi,
                             const UlamPartition& part);

/// ||f||_2 / V(f). Throws std::invalid_argument when V(f) = 0.
double sobolev_ratio(std::span<const double> f, const UlamPartition& part);

struct LYSample {
  double v_f = 0.0;   // V(f)
  double l1_f = 0.0;  // ||f||_1
  double v_lf = 0.0;  // V(L^ell f)
};

struct LYReport {
  double theta_hat = 0.0;
  double m_hat = 0.0;
  int ell = 1;
  std::optional<double> t;
  std::vector<LYSample> samples;
};

/// Fits V(L^ell f) <= theta V(f) + M ||f||_1 to the samples: least squares
/// in the residuals normalized by ||f||_BV, subject to every sample
/// satisfying the inequality and theta, M >= 0. Among equally good fits the
/// smallest theta wins.
LYReport fit_lasota_yorke(std::vector<LYSample> samples, int ell);

/// Applies the transfer operator ell times to each suite function and fits
/// the Lasota-Yorke constants. Throws std::invalid_argument for ell < 1 or
/// an empty suite.
LYReport ly_check(const TransferMatrix& P, const UlamPartition& part, const TestSuite& suite,
                  int ell);
LYReport ly_check(TentParams t, const UlamPartition& part, const TestSuite& suite,
                  int ell = kTentUniformityIterate);

}  // namespace ulamtent
