#include "ulamtent/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ulamtent/parallel.hpp"

namespace ulamtent {

UlamPartition UlamPartition::build(int n, const Polygon& omega) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("grid resolution must be even and >= 2, got " + std::to_string(n));
  }
  if (omega.empty()) throw std::invalid_argument("partition domain is empty");

  UlamPartition part;
  part.resolution_ = n;
  part.omega_ = omega;
  const BoundingBox box = omega.bounds();
  part.origin_ = box.lo;
  part.side_ = (box.hi.x1 - box.lo.x1) / n;
  part.columns_ = n;
  part.rows_ = static_cast<int>(std::ceil((box.hi.x2 - box.lo.x2) / part.side_ - 1e-9));
  part.cell_of_square_.assign(static_cast<std::size_t>(part.columns_) * part.rows_, -1);

  const double h = part.side_;
  for (int iy = 0; iy < part.rows_; ++iy) {
    for (int ix = 0; ix < part.columns_; ++ix) {
      const Point2 lo{box.lo.x1 + ix * h, box.lo.x2 + iy * h};
      const Point2 hi{box.lo.x1 + (ix + 1) * h, box.lo.x2 + (iy + 1) * h};
      Polygon cell = clip_convex(Polygon::rectangle(lo, hi), omega);
      if (cell.empty()) continue;
      part.cell_of_square_[static_cast<std::size_t>(iy) * part.columns_ + ix] =
          static_cast<long>(part.cells_.size());
      part.areas_.push_back(area(cell));
      part.centroids_.push_back(centroid(cell));
      part.boundary_lengths_.push_back(shared_edge_length(cell, omega));
      part.cells_.push_back(std::move(cell));
      part.square_index_.emplace_back(ix, iy);
    }
  }

  const auto cell_at = [&](int ix, int iy) -> long {
    if (ix < 0 || iy < 0 || ix >= part.columns_ || iy >= part.rows_) return -1;
    return part.cell_of_square_[static_cast<std::size_t>(iy) * part.columns_ + ix];
  };
  for (int iy = 0; iy < part.rows_; ++iy) {
    for (int ix = 0; ix < part.columns_; ++ix) {
      const long a = cell_at(ix, iy);
      if (a < 0) continue;
      for (const long b : {cell_at(ix + 1, iy), cell_at(ix, iy + 1)}) {
        if (b < 0) continue;
        const double len = shared_edge_length(part.cells_[a], part.cells_[b]);
        if (len > kEdgeTolerance) {
          part.adjacency_.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), len});
        }
      }
    }
  }
  return part;
}

BoundingBox UlamPartition::square_of(std::size_t i) const {
  const auto [ix, iy] = square_index_.at(i);
  return {{origin_.x1 + ix * side_, origin_.x2 + iy * side_},
          {origin_.x1 + (ix + 1) * side_, origin_.x2 + (iy + 1) * side_}};
}

std::optional<std::size_t> UlamPartition::locate(Point2 x) const {
  const int ix = static_cast<int>(std::floor((x.x1 - origin_.x1) / side_));
  const int iy = static_cast<int>(std::floor((x.x2 - origin_.x2) / side_));
  const auto probe = [&](int cx, int cy) -> std::optional<std::size_t> {
    if (cx < 0 || cy < 0 || cx >= columns_ || cy >= rows_) return std::nullopt;
    const long c = cell_of_square_[static_cast<std::size_t>(cy) * columns_ + cx];
    if (c >= 0 && contains(cells_[c], x)) return static_cast<std::size_t>(c);
    return std::nullopt;
  };
  if (auto c = probe(ix, iy)) return c;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (auto c = probe(ix + dx, iy + dy)) return c;
    }
  }
  return std::nullopt;
}

std::size_t UlamPartition::locate_nearest(Point2 x) const {
  if (auto c = locate(x)) return *c;
  std::size_t best = 0;
  double best_dist = INFINITY;
  for (std::size_t i = 0; i < centroids_.size(); ++i) {
    const double d = norm(centroids_[i] - x);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

std::vector<std::size_t> UlamPartition::cells_overlapping(const BoundingBox& box) const {
  const auto index = [&](double v, double o, int count) {
    return std::clamp(static_cast<int>(std::floor((v - o) / side_)), 0, count - 1);
  };
  const int x0 = index(box.lo.x1 - kEdgeTolerance, origin_.x1, columns_);
  const int x1 = index(box.hi.x1 + kEdgeTolerance, origin_.x1, columns_);
  const int y0 = index(box.lo.x2 - kEdgeTolerance, origin_.x2, rows_);
  const int y1 = index(box.hi.x2 + kEdgeTolerance, origin_.x2, rows_);
  std::vector<std::size_t> out;
  for (int iy = y0; iy <= y1; ++iy) {
    for (int ix = x0; ix <= x1; ++ix) {
      const long c = cell_of_square_[static_cast<std::size_t>(iy) * columns_ + ix];
      if (c >= 0) out.push_back(static_cast<std::size_t>(c));
    }
  }
  return out;
}

TransferMatrix::TransferMatrix(std::vector<std::vector<MatrixEntry>> rows,
                               std::optional<double> t_param)
    : t_param_(t_param) {
  const std::size_t n = rows.size();
  row_start_.reserve(n + 1);
  row_start_.push_back(0);
  std::vector<std::size_t> col_count(n, 0);
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), [](const MatrixEntry& a, const MatrixEntry& b) { return a.col < b.col; });
    for (const MatrixEntry& e : r) {
      if (e.col >= n) throw std::invalid_argument("matrix column out of range");
      if (!(e.weight >= 0.0)) throw std::invalid_argument("matrix weight is negative or NaN");
      ++col_count[e.col];
      entries_.push_back(e);
    }
    row_start_.push_back(entries_.size());
  }
  col_start_.assign(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) col_start_[j + 1] = col_start_[j] + col_count[j];
  col_entries_.resize(entries_.size());
  std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      const MatrixEntry& e = entries_[k];
      col_entries_[fill[e.col]++] = {i, e.weight};
    }
  }
}

std::span<const MatrixEntry> TransferMatrix::row(std::size_t i) const {
  return std::span<const MatrixEntry>(entries_).subspan(row_start_.at(i), row_start_[i + 1] - row_start_[i]);
}

std::span<const MatrixEntry> TransferMatrix::column(std::size_t j) const {
  return std::span<const MatrixEntry>(col_entries_).subspan(col_start_.at(j), col_start_[j + 1] - col_start_[j]);
}

TransferMatrix transfer_matrix(const PiecewiseAffineMap& map, const UlamPartition& part,
                               std::optional<double> t_param) {
  // m(Q_i ∩ phi_b^{-1}(Q_j)) = m(phi_b(Q_i ∩ D_b) ∩ Q_j) / J_b for affine phi_b.
  std::vector<std::vector<MatrixEntry>> rows(part.size());
  parallel_for(part.size(), [&](std::size_t i) {
    const Polygon& cell = part.cells()[i];
    const double cell_area = part.areas()[i];
    std::map<std::size_t, double> acc;
    for (const Branch& b : map.branches()) {
      const Polygon piece = clip_convex(cell, b.domain);
      if (piece.empty()) continue;
      const Polygon img = apply_affine(b.forward, piece);
      for (const std::size_t j : part.cells_overlapping(img.bounds())) {
        const double a = area(clip_convex(img, part.cells()[j]));
        if (a > 0.0) acc[j] += a / (b.jacobian * cell_area);
      }
    }
    auto& row = rows[i];
    row.reserve(acc.size());
    for (const auto& [j, w] : acc) row.push_back({j, w});
  });
  return TransferMatrix(std::move(rows), t_param);
}

TransferMatrix transfer_matrix(TentParams t, const UlamPartition& part) {
  return transfer_matrix(tent_family(t), part, t.t());
}

std::vector<double> apply_transfer(const TransferMatrix& P, const UlamPartition& part,
                                   std::span<const double> f, bool allow_signed) {
  const std::size_t n = part.size();
  if (P.size() != n || f.size() != n) throw std::invalid_argument("size mismatch in apply_transfer");
  for (const double v : f) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in apply_transfer");
    if (!allow_signed && v < 0.0) throw std::invalid_argument("negative value with allow_signed unset");
  }
  const auto& a = part.areas();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (const MatrixEntry& e : P.column(j)) s += f[e.col] * a[e.col] * e.weight;
    out[j] = s / a[j];
  }
  return out;
}

double l1_norm(std::span<const double> f, const UlamPartition& part) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += std::abs(f[j]) * part.areas()[j];
  return s;
}

double integral(std::span<const double> f, const UlamPartition& part) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * part.areas()[j];
  return s;
}

namespace {

double l1_difference(std::span<const double> a, std::span<const double> b, const UlamPartition& part) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] - b[j]) * part.areas()[j];
  return s;
}

}  // namespace

StationaryResult stationary_density(const TransferMatrix& P, const UlamPartition& part,
                                    const StationaryOptions& options) {
  std::vector<double> f(part.size(), 1.0);
  const double mass0 = integral(f, part);
  for (double& v : f) v /= mass0;

  long iter = 0;
  double step = INFINITY;
  while (iter < options.max_iterations) {
    std::vector<double> g = apply_transfer(P, part, f, false);
    const double mass = integral(g, part);
    for (double& v : g) v /= mass;
    step = l1_difference(g, f, part);
    f = std::move(g);
    ++iter;
    if (step < options.step_tolerance) break;
  }
  const std::vector<double> image = apply_transfer(P, part, f, false);
  const double residual = l1_difference(image, f, part);
  if (step >= options.step_tolerance) {
    throw NonConvergenceError("power iteration did not converge after " + std::to_string(iter) +
                                  " iterations (residual " + std::to_string(residual) + ")",
                              residual, iter);
  }
  if (residual > options.residual_tolerance) {
    throw NonConvergenceError("invariance residual " + std::to_string(residual) + " exceeds tolerance",
                              residual, iter);
  }
  return {DensityVector{std::move(f)}, iter, residual};
}

void validate_density(const DensityVector& rho, const UlamPartition& part) {
  if (rho.values.size() != part.size()) throw std::invalid_argument("density size mismatch");
  for (const double v : rho.values) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("density value is negative or non-finite");
  }
  if (std::abs(integral(rho.values, part) - 1.0) > 1e-10) {
    throw std::invalid_argument("density does not have unit mass");
  }
}

double duality_check(const PiecewiseAffineMap& map, const TransferMatrix& P, const UlamPartition& part,
                     std::span<const double> f, std::span<const double> g) {
  const std::size_t n = part.size();
  if (f.size() != n || g.size() != n) throw std::invalid_argument("size mismatch in duality_check");

  const std::vector<double> lg = apply_transfer(P, part, g, true);
  double lhs = 0.0;
  for (std::size_t j = 0; j < n; ++j) lhs += f[j] * lg[j] * part.areas()[j];

  // Samples on a cell's boundary carry half weight.
  constexpr int kSub = 4;
  const double h = part.cell_side();
  double rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] == 0.0) continue;
    const Polygon& cell = part.cells()[i];
    const Point2 lo = part.square_of(i).lo;
    double weight_sum = 0.0;
    double value_sum = 0.0;
    for (int ky = 0; ky < kSub; ++ky) {
      for (int kx = 0; kx < kSub; ++kx) {
        const Point2 x{lo.x1 + (kx + 0.5) * h / kSub, lo.x2 + (ky + 0.5) * h / kSub};
        if (!contains(cell, x)) continue;
        const double w = contains(cell, x, -kEdgeTolerance) ? 1.0 : 0.5;
        const Point2 y = map.eval(x).image;
        value_sum += w * f[part.locate_nearest(y)];
        weight_sum += w;
      }
    }
    if (weight_sum == 0.0) {
      value_sum = f[part.locate_nearest(map.eval(part.centroids()[i]).image)];
      weight_sum = 1.0;
    }
    rhs += g[i] * part.areas()[i] * value_sum / weight_sum;
  }
  return std::abs(lhs - rhs);
}

}  // namespace ulamtent
