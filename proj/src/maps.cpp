#include "ulamtent/maps.hpp"

#include <algorithm>
#include <numbers>
#include <string>

namespace ulamtent {

namespace {

constexpr double kCoverTolerance = 1e-10;

Branch make_branch(Polygon domain, const AffineMap2& forward) {
  return Branch{std::move(domain), forward, forward.inverse(), std::abs(forward.det())};
}

void validate(const Polygon& omega, const std::vector<Branch>& branches) {
  if (omega.empty()) throw std::invalid_argument("map domain is empty");
  if (branches.empty()) throw std::invalid_argument("map has no branches");
  const double omega_area = area(omega);
  double covered = 0.0;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const Branch& b = branches[i];
    const std::string tag = "branch " + std::to_string(i) + ": ";
    if (b.domain.empty()) throw std::invalid_argument(tag + "empty domain");
    const double a = area(b.domain);
    if (std::abs(area(clip_convex(b.domain, omega)) - a) > kCoverTolerance) {
      throw std::invalid_argument(tag + "domain leaves omega");
    }
    covered += a;
    if (std::abs(b.jacobian - std::abs(b.forward.det())) > 1e-12 || b.jacobian <= 0.0) {
      throw std::invalid_argument(tag + "jacobian does not match |det|");
    }
    const Polygon img = apply_affine(b.forward, b.domain);
    for (const Point2& v : img.vertices()) {
      if (norm(b.forward(b.inverse(v)) - v) > 1e-12) {
        throw std::invalid_argument(tag + "inverse is inconsistent with forward map");
      }
    }
    if (std::abs(area(clip_convex(img, omega)) - area(img)) > kCoverTolerance) {
      throw std::invalid_argument(tag + "image leaves omega");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (area(clip_convex(b.domain, branches[j].domain)) > 1e-12) {
        throw std::invalid_argument(tag + "overlaps branch " + std::to_string(j));
      }
    }
  }
  if (std::abs(covered - omega_area) > kCoverTolerance) {
    throw std::invalid_argument("branch domains do not cover omega");
  }
}

}  // namespace

double tau() {
  static const double value = std::pow(std::numbers::sqrt2 + 1.0, 0.25) / std::numbers::sqrt2;
  return value;
}

PiecewiseAffineMap::PiecewiseAffineMap(Polygon omega,
                                       const std::vector<std::pair<Polygon, AffineMap2>>& pieces)
    : omega_(std::move(omega)) {
  branches_.reserve(pieces.size());
  for (const auto& [domain, forward] : pieces) branches_.push_back(make_branch(domain, forward));
  validate(omega_, branches_);
}

Polygon PiecewiseAffineMap::image(std::size_t branch) const {
  const Branch& b = branches_.at(branch);
  return apply_affine(b.forward, b.domain);
}

std::optional<std::size_t> PiecewiseAffineMap::branch_of(Point2 x) const {
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    if (contains(branches_[i].domain, x)) return i;
  }
  return std::nullopt;
}

MapEvaluation PiecewiseAffineMap::eval(Point2 x) const {
  const auto b = branch_of(x);
  if (!b) throw std::out_of_range("point is outside the map domain");
  return {branches_[*b].forward(x), *b};
}

TentParams::TentParams(double t) : t_(t) {
  if (!(t >= tau() && t <= 1.0)) {
    throw std::out_of_range("tent parameter " + std::to_string(t) + " is outside [tau, 1] with tau = " +
                            std::to_string(tau()));
  }
}

Polygon tent_omega() { return Polygon::from_vertices({{0.0, 0.0}, {2.0, 0.0}, {1.0, 1.0}}); }
Polygon tent_left_triangle() { return Polygon::from_vertices({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}); }
Polygon tent_right_triangle() { return Polygon::from_vertices({{1.0, 0.0}, {2.0, 0.0}, {1.0, 1.0}}); }

PiecewiseAffineMap tent_family(TentParams params) {
  const double t = params.t();
  const AffineMap2 left{{t, t, t, -t}, {0.0, 0.0}};
  const AffineMap2 right{{-t, t, -t, -t}, {2.0 * t, 2.0 * t}};
  PiecewiseAffineMap map(tent_omega(), {{tent_left_triangle(), left}, {tent_right_triangle(), right}});
  return map;
}

PiecewiseAffineMap iterate_map(const PiecewiseAffineMap& map, int iterate) {
  if (iterate < 1) throw std::invalid_argument("iterate must be >= 1");
  std::vector<std::pair<Polygon, AffineMap2>> pieces;
  for (const Branch& b : map.branches()) pieces.emplace_back(b.domain, b.forward);
  for (int step = 1; step < iterate; ++step) {
    std::vector<std::pair<Polygon, AffineMap2>> next;
    for (const auto& [domain, composed] : pieces) {
      const AffineMap2 back = composed.inverse();
      for (const Branch& b : map.branches()) {
        Polygon sub = clip_convex(domain, apply_affine(back, b.domain));
        if (sub.empty()) continue;
        next.emplace_back(std::move(sub), compose(b.forward, composed));
      }
    }
    pieces = std::move(next);
  }
  return PiecewiseAffineMap(map.omega(), pieces);
}

ConditionConstants condition_constants(const PiecewiseAffineMap& map, int iterate, int ell) {
  if (map.branches().empty()) throw std::invalid_argument("map has no branches");
  const PiecewiseAffineMap it = iterate == 1 ? map : iterate_map(map, iterate);
  ConditionConstants c;
  for (const Branch& b : it.branches()) c.sigma = std::max(c.sigma, b.inverse.operator_norm());
  // Affine branches have constant Jacobian on each domain: no distortion.
  c.delta = 0.0;
  c.ell = ell;
  return c;
}

ComparisonMap comparison_map(const PiecewiseAffineMap& map_t, const PiecewiseAffineMap& map_s,
                             std::size_t branch_index) {
  if (branch_index >= map_t.branches().size() || branch_index >= map_s.branches().size()) {
    throw std::out_of_range("branch index out of range");
  }
  const Branch& bt = map_t.branches()[branch_index];
  const Branch& bs = map_s.branches()[branch_index];
  const Polygon common = clip_convex(map_t.image(branch_index), map_s.image(branch_index));
  ComparisonMap out;
  out.k_set = apply_affine(bs.inverse, common);
  if (out.k_set.empty()) {
    throw EmptyComparisonDomain("comparison domain K is empty for branch " +
                                std::to_string(branch_index));
  }
  out.psi = compose(bt.inverse, bs.forward);
  out.branch_index = branch_index;
  for (const Point2& v : out.k_set.vertices()) {
    out.sup_deviation = std::max(out.sup_deviation, norm(out.psi(v) - v));
  }
  return out;
}

ComparisonMap comparison_map(TentParams t, TentParams s, std::size_t branch_index) {
  return comparison_map(tent_family(t), tent_family(s), branch_index);
}

double jacobian_ratio_deviation(const PiecewiseAffineMap& map_t, const PiecewiseAffineMap& map_s,
                                std::size_t branch_index) {
  const double jt = map_t.branches().at(branch_index).jacobian;
  const double js = map_s.branches().at(branch_index).jacobian;
  return std::abs(js / jt - 1.0);
}

double jacobian_ratio_deviation(TentParams t, TentParams s) {
  const double r = s.t() / t.t();
  return std::abs(r * r - 1.0);
}

}  // namespace ulamtent
