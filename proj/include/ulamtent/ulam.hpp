#pragma once

/// @file ulam.hpp
/// @brief Ulam discretization of the transfer operator.
///
/// The domain is covered by a grid of squares clipped to omega. For affine
/// branches the preimage of a cell is a polygon, so every transition weight
///
///     P_ij = m(Q_i ∩ phi^{-1}(Q_j)) / m(Q_i)
///
/// is computed exactly by polygon clipping. Densities are piecewise constant
/// on cells; the transfer operator acts on them as
/// f'_j = sum_i f_i m(Q_i) P_ij / m(Q_j).

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ulamtent/geometry.hpp"
#include "ulamtent/maps.hpp"

namespace ulamtent {

struct CellAdjacency {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;  // length of the shared edge, > 0
};

class UlamPartition {
 public:
  /// Squares of side width(omega)/n over the bounding box of omega, clipped
  /// to omega, zero-area clips dropped, ordered row-major by square index.
  /// For the tent triangle this is side 2/n over [0,2]x[0,1]. n must be even
  /// and >= 2 (std::invalid_argument otherwise).
  static UlamPartition build(int n, const Polygon& omega = tent_omega());

  int resolution() const { return resolution_; }
  std::size_t size() const { return cells_.size(); }
  const Polygon& omega() const { return omega_; }
  const std::vector<Polygon>& cells() const { return cells_; }
  const std::vector<double>& areas() const { return areas_; }
  const std::vector<Point2>& centroids() const { return centroids_; }
  const std::vector<CellAdjacency>& adjacency() const { return adjacency_; }
  /// Length of the boundary of omega contained in each cell's boundary.
  const std::vector<double>& boundary_lengths() const { return boundary_lengths_; }
  double cell_side() const { return side_; }
  /// Unclipped grid square of cell i.
  BoundingBox square_of(std::size_t i) const;

  /// Cell containing x (within tolerance), first by index; nullopt outside omega.
  std::optional<std::size_t> locate(Point2 x) const;
  /// Like locate, but falls back to the cell with the nearest centroid.
  std::size_t locate_nearest(Point2 x) const;

  /// Cells whose grid square intersects the box [lo, hi].
  std::vector<std::size_t> cells_overlapping(const BoundingBox& box) const;

 private:
  UlamPartition() = default;

  int resolution_ = 0;
  int columns_ = 0;
  int rows_ = 0;
  double side_ = 0.0;
  Point2 origin_{};
  Polygon omega_;
  std::vector<Polygon> cells_;
  std::vector<double> areas_;
  std::vector<Point2> centroids_;
  std::vector<CellAdjacency> adjacency_;
  std::vector<double> boundary_lengths_;
  std::vector<long> cell_of_square_;  // -1 where the clipped square is empty
  std::vector<std::pair<int, int>> square_index_;
};

struct MatrixEntry {
  std::size_t col = 0;
  double weight = 0.0;
};

/// Sparse row-stochastic Ulam matrix (compressed rows, columns ascending).
class TransferMatrix {
 public:
  TransferMatrix(std::vector<std::vector<MatrixEntry>> rows, std::optional<double> t_param);

  std::size_t size() const { return row_start_.size() - 1; }
  std::span<const MatrixEntry> row(std::size_t i) const;
  std::optional<double> t_param() const { return t_param_; }
  std::size_t nonzeros() const { return entries_.size(); }

  /// Incoming entries of column j as (row, weight), rows ascending.
  std::span<const MatrixEntry> column(std::size_t j) const;

 private:
  std::vector<std::size_t> row_start_;
  std::vector<MatrixEntry> entries_;
  std::vector<std::size_t> col_start_;
  std::vector<MatrixEntry> col_entries_;
  std::optional<double> t_param_;
};

/// Piecewise-constant density on the cells of a partition.
struct DensityVector {
  std::vector<double> values;
};

/// Exact Ulam matrix of map on part. Rows are assembled in parallel; each
/// row accumulates branches and columns in ascending order.
TransferMatrix transfer_matrix(const PiecewiseAffineMap& map, const UlamPartition& part,
                               std::optional<double> t_param = std::nullopt);
TransferMatrix transfer_matrix(TentParams t, const UlamPartition& part);

/// Density action of P. Throws std::invalid_argument for a size mismatch,
/// non-finite input, or negative input when allow_signed is false.
std::vector<double> apply_transfer(const TransferMatrix& P, const UlamPartition& part,
                                   std::span<const double> f, bool allow_signed = true);

/// sum_j |f_j| m(Q_j)
double l1_norm(std::span<const double> f, const UlamPartition& part);
/// sum_j f_j m(Q_j)
double integral(std::span<const double> f, const UlamPartition& part);

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual, long iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

struct StationaryOptions {
  double step_tolerance = 1e-12;
  double residual_tolerance = 1e-10;
  long max_iterations = 100000;
};

struct StationaryResult {
  DensityVector density;
  long iterations = 0;
  double residual = 0.0;  // || P rho - rho ||_1
};

/// Power iteration from the uniform density, renormalized to unit mass each
/// step, until the L1 step falls below step_tolerance. Throws
/// NonConvergenceError when the cap is hit or the final invariance residual
/// exceeds residual_tolerance.
StationaryResult stationary_density(const TransferMatrix& P, const UlamPartition& part,
                                    const StationaryOptions& options = {});

/// Throws std::invalid_argument unless values are nonnegative with unit mass.
void validate_density(const DensityVector& rho, const UlamPartition& part);

/// |∫ f L g dm - ∫ (f∘phi) g dm|, the right side by midpoint quadrature on a
/// 4x4 sub-grid of each cell's square (samples outside the cell discarded).
double duality_check(const PiecewiseAffineMap& map, const TransferMatrix& P,
                     const UlamPartition& part, std::span<const double> f,
                     std::span<const double> g);

}  // namespace ulamtent
