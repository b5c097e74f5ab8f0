#include "ulamtent/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace ulamtent {

namespace {

double signed_area(std::span<const Point2> v) {
  const std::size_t n = v.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = v[i];
    const Point2& q = v[(i + 1) % n];
    twice += cross(p, q);
  }
  return 0.5 * twice;
}

// Distance of p from the line through a and b (a != b).
double line_distance(Point2 a, Point2 b, Point2 p) {
  const Point2 d = b - a;
  return std::abs(cross(d, p - a)) / norm(d);
}

void drop_repeated(std::vector<Point2>& v) {
  std::vector<Point2> out;
  out.reserve(v.size());
  for (const Point2& p : v) {
    if (out.empty() || norm(p - out.back()) > kEdgeTolerance) out.push_back(p);
  }
  while (out.size() > 1 && norm(out.front() - out.back()) <= kEdgeTolerance) out.pop_back();
  v = std::move(out);
}

void drop_collinear(std::vector<Point2>& v) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& prev = v[(i + n - 1) % n];
      const Point2& next = v[(i + 1) % n];
      if (line_distance(prev, next, v[i]) <= kEdgeTolerance) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
}

// Returns false when the outline is degenerate (caller yields empty).
bool normalize(std::vector<Point2>& v) {
  drop_repeated(v);
  if (v.size() < 3) return false;
  const double a = signed_area(v);
  if (std::abs(a) < kAreaTolerance) return false;
  if (a < 0.0) std::reverse(v.begin(), v.end());
  drop_collinear(v);
  return v.size() >= 3 && signed_area(v) >= kAreaTolerance;
}

}  // namespace

Polygon make_convex_unchecked(std::vector<Point2> vertices) {
  if (!normalize(vertices)) return Polygon{};
  return Polygon{std::move(vertices)};
}

Polygon Polygon::from_vertices(std::vector<Point2> vertices) {
  for (const Point2& p : vertices) {
    if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) {
      throw std::invalid_argument("polygon vertex is not finite");
    }
  }
  // A zero-area outline is only a degenerate polygon if it never turns both ways.
  std::vector<Point2> raw = vertices;
  drop_repeated(raw);
  bool left = false, right = false;
  for (std::size_t i = 0; raw.size() >= 3 && i < raw.size(); ++i) {
    const Point2 e0 = raw[(i + 1) % raw.size()] - raw[i];
    const Point2 e1 = raw[(i + 2) % raw.size()] - raw[(i + 1) % raw.size()];
    const double c = cross(e0, e1);
    if (c > kEdgeTolerance * norm(e0) * norm(e1)) left = true;
    if (c < -kEdgeTolerance * norm(e0) * norm(e1)) right = true;
  }
  if (left && right) throw std::invalid_argument("polygon is not convex");
  if (!normalize(vertices)) return Polygon{};

  // Strict left turns everywhere and total turning of exactly one revolution.
  const std::size_t n = vertices.size();
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e0 = vertices[(i + 1) % n] - vertices[i];
    const Point2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    const double c = cross(e0, e1);
    if (c <= 0.0) throw std::invalid_argument("polygon is not convex");
    turning += std::atan2(c, dot(e0, e1));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-9) {
    throw std::invalid_argument("polygon is self-intersecting");
  }
  return Polygon{std::move(vertices)};
}

Polygon Polygon::rectangle(Point2 lo, Point2 hi) {
  return from_vertices({lo, {hi.x1, lo.x2}, hi, {lo.x1, hi.x2}});
}

BoundingBox Polygon::bounds() const {
  BoundingBox box{{INFINITY, INFINITY}, {-INFINITY, -INFINITY}};
  for (const Point2& p : vertices_) {
    box.lo = {std::min(box.lo.x1, p.x1), std::min(box.lo.x2, p.x2)};
    box.hi = {std::max(box.hi.x1, p.x1), std::max(box.hi.x2, p.x2)};
  }
  return box;
}

AffineMap2 AffineMap2::inverse() const {
  const double d = det();
  const double scale = std::max({std::abs(linear[0]), std::abs(linear[1]), std::abs(linear[2]),
                                 std::abs(linear[3])});
  if (d == 0.0 || std::abs(d) <= 1e-14 * scale * scale) {
    throw std::domain_error("affine map has a singular linear part");
  }
  AffineMap2 inv;
  inv.linear = {linear[3] / d, -linear[1] / d, -linear[2] / d, linear[0] / d};
  const Point2 t = translation;
  inv.translation = {-(inv.linear[0] * t.x1 + inv.linear[1] * t.x2),
                     -(inv.linear[2] * t.x1 + inv.linear[3] * t.x2)};
  return inv;
}

double AffineMap2::operator_norm() const {
  const auto [a, b, c, d] = linear;
  const double frob2 = a * a + b * b + c * c + d * d;
  const double dt = det();
  const double disc = std::sqrt(std::max(0.0, frob2 * frob2 - 4.0 * dt * dt));
  return std::sqrt(0.5 * (frob2 + disc));
}

AffineMap2 compose(const AffineMap2& outer, const AffineMap2& inner) {
  const auto& A = outer.linear;
  const auto& B = inner.linear;
  AffineMap2 out;
  out.linear = {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3],
                A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3]};
  out.translation = outer(inner.translation);
  return out;
}

double area(const Polygon& p) {
  if (p.empty()) return 0.0;
  return signed_area(p.vertices());
}

double perimeter(const Polygon& p) {
  double total = 0.0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) total += norm(p[(i + 1) % n] - p[i]);
  return total;
}

Point2 centroid(const Polygon& p) {
  if (p.empty()) throw std::invalid_argument("centroid of an empty polygon");
  // Shift to the first vertex for better conditioning.
  const Point2 o = p[0];
  const std::size_t n = p.size();
  double twice = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = p[i] - o;
    const Point2 b = p[(i + 1) % n] - o;
    const double c = cross(a, b);
    twice += c;
    cx += (a.x1 + b.x1) * c;
    cy += (a.x2 + b.x2) * c;
  }
  return {o.x1 + cx / (3.0 * twice), o.x2 + cy / (3.0 * twice)};
}

Polygon clip_halfplane(const Polygon& p, Point2 a, Point2 b) {
  if (p.empty()) return p;
  const Point2 dir = b - a;
  const double len = norm(dir);
  const auto side = [&](Point2 q) { return cross(dir, q - a) / len; };

  std::vector<Point2> out;
  out.reserve(p.size() + 1);
  const std::size_t n = p.size();
  bool all_inside = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 P = p[i];
    const Point2 Q = p[(i + 1) % n];
    const double dP = side(P);
    const double dQ = side(Q);
    if (dP >= -kEdgeTolerance) {
      out.push_back(P);
    } else {
      all_inside = false;
    }
    if ((dP > kEdgeTolerance && dQ < -kEdgeTolerance) ||
        (dP < -kEdgeTolerance && dQ > kEdgeTolerance)) {
      out.push_back(P + (dP / (dP - dQ)) * (Q - P));
    }
  }
  if (all_inside) return p;
  return make_convex_unchecked(std::move(out));
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  if (subject.empty() || clip.empty()) return Polygon{};
  const BoundingBox s = subject.bounds();
  const BoundingBox c = clip.bounds();
  if (s.hi.x1 < c.lo.x1 || c.hi.x1 < s.lo.x1 || s.hi.x2 < c.lo.x2 || c.hi.x2 < s.lo.x2) {
    return Polygon{};
  }
  Polygon out = subject;
  const std::size_t n = clip.size();
  for (std::size_t i = 0; i < n && !out.empty(); ++i) {
    out = clip_halfplane(out, clip[i], clip[(i + 1) % n]);
  }
  return out;
}

Polygon apply_affine(const AffineMap2& f, const Polygon& p) {
  std::vector<Point2> image;
  image.reserve(p.size());
  for (const Point2& v : p.vertices()) image.push_back(f(v));
  return make_convex_unchecked(std::move(image));
}

double shared_edge_length(const Polygon& a, const Polygon& b) {
  double total = 0.0;
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < na; ++i) {
    const Point2 p0 = a[i];
    const Point2 p1 = a[(i + 1) % na];
    const Point2 d = p1 - p0;
    const double len = norm(d);
    const Point2 u = (1.0 / len) * d;
    for (std::size_t j = 0; j < nb; ++j) {
      const Point2 q0 = b[j];
      const Point2 q1 = b[(j + 1) % nb];
      if (std::abs(cross(u, q0 - p0)) > kEdgeTolerance ||
          std::abs(cross(u, q1 - p0)) > kEdgeTolerance) {
        continue;
      }
      const double s0 = dot(u, q0 - p0);
      const double s1 = dot(u, q1 - p0);
      const double overlap = std::min(len, std::max(s0, s1)) - std::max(0.0, std::min(s0, s1));
      if (overlap > kEdgeTolerance) total += overlap;
    }
  }
  return total;
}

bool contains(const Polygon& p, Point2 x, double tol) {
  if (p.empty()) return false;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 d = p[(i + 1) % n] - p[i];
    if (cross(d, x - p[i]) / norm(d) < -tol) return false;
  }
  return true;
}

Point2 project_into(const Polygon& p, Point2 x) {
  if (contains(p, x, 0.0)) return x;
  Point2 best = p[0];
  double best_dist = INFINITY;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = p[i];
    const Point2 d = p[(i + 1) % n] - a;
    const double s = std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
    const Point2 q = a + s * d;
    const double dist = norm(x - q);
    if (dist < best_dist) {
      best_dist = dist;
      best = q;
    }
  }
  return best;
}

}  // namespace ulamtent
