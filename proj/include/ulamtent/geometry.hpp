#pragma once

/// @file geometry.hpp
/// @brief Convex polygon arithmetic in the plane.
///
/// Every measure computed by the library (cell areas, transition areas,
/// boundary lengths) reduces to operations on convex polygons: half-plane
/// clipping, shoelace areas and affine images. Polygons are immutable values
/// normalized to counter-clockwise order with no repeated or collinear
/// vertices; degenerate results collapse to the empty polygon.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace ulamtent {

/// Point-on-line classification tolerance, in coordinate units.
inline constexpr double kEdgeTolerance = 1e-12;
/// Polygons with area below this are normalized to empty.
inline constexpr double kAreaTolerance = 1e-14;

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x1, s * p.x2}; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x1, p.x2); }
inline constexpr double dot(Point2 a, Point2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline constexpr double cross(Point2 a, Point2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }

struct BoundingBox {
  Point2 lo;
  Point2 hi;
};

/// Convex polygon with counter-clockwise vertices, or the empty polygon.
class Polygon {
 public:
  Polygon() = default;

  /// Validates and normalizes a vertex list. Clockwise input is reversed;
  /// repeated and collinear vertices are dropped; a result with area below
  /// kAreaTolerance is empty. Throws std::invalid_argument for non-finite
  /// coordinates or a non-convex / self-intersecting outline.
  static Polygon from_vertices(std::vector<Point2> vertices);

  /// Axis-aligned rectangle [lo, hi].
  static Polygon rectangle(Point2 lo, Point2 hi);

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }

  BoundingBox bounds() const;

 private:
  friend Polygon make_convex_unchecked(std::vector<Point2> vertices);
  explicit Polygon(std::vector<Point2> v) : vertices_(std::move(v)) {}

  std::vector<Point2> vertices_;
};

/// Normalizes vertices already known to outline a convex region (clip and
/// affine outputs). Skips the convexity check of Polygon::from_vertices.
Polygon make_convex_unchecked(std::vector<Point2> vertices);

/// x -> linear * x + translation, linear stored row-major.
struct AffineMap2 {
  std::array<double, 4> linear{1.0, 0.0, 0.0, 1.0};
  Point2 translation{};

  static AffineMap2 identity() { return {}; }
  static AffineMap2 scaling(double s) { return {{s, 0.0, 0.0, s}, {}}; }

  Point2 operator()(Point2 p) const {
    return {linear[0] * p.x1 + linear[1] * p.x2 + translation.x1,
            linear[2] * p.x1 + linear[3] * p.x2 + translation.x2};
  }

  double det() const { return linear[0] * linear[3] - linear[1] * linear[2]; }

  /// Throws std::domain_error when the linear part is singular.
  AffineMap2 inverse() const;

  /// Largest singular value of the linear part.
  double operator_norm() const;
};

/// (outer ∘ inner)(x) = outer(inner(x)).
AffineMap2 compose(const AffineMap2& outer, const AffineMap2& inner);

/// Shoelace area; 0 for the empty polygon.
double area(const Polygon& p);

double perimeter(const Polygon& p);

/// Area centroid. Undefined for the empty polygon (throws std::invalid_argument).
Point2 centroid(const Polygon& p);

/// Keeps the part of p on the left of the directed line a -> b.
Polygon clip_halfplane(const Polygon& p, Point2 a, Point2 b);

/// Intersection of two convex polygons (Sutherland-Hodgman against each edge
/// of clip). Empty when the interiors are disjoint.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

/// Image of p under f, re-oriented counter-clockwise.
Polygon apply_affine(const AffineMap2& f, const Polygon& p);

/// Length of the one-dimensional overlap of the two boundaries.
double shared_edge_length(const Polygon& a, const Polygon& b);

/// True when x lies in p or within tol of its boundary.
bool contains(const Polygon& p, Point2 x, double tol = kEdgeTolerance);

/// Nearest point of p to x (x itself when inside).
Point2 project_into(const Polygon& p, Point2 x);

}  // namespace ulamtent
