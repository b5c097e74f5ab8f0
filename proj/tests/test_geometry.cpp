#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ulamtent/geometry.hpp"
#include "ulamtent/maps.hpp"

using namespace ulamtent;

namespace {

// Independent area oracle: count lattice points of a fine grid inside p.
double lattice_area(const Polygon& p, int samples) {
  const BoundingBox b = p.bounds();
  const double dx = (b.hi.x1 - b.lo.x1) / samples;
  const double dy = (b.hi.x2 - b.lo.x2) / samples;
  long inside = 0;
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      if (contains(p, {b.lo.x1 + (i + 0.5) * dx, b.lo.x2 + (j + 0.5) * dy}, 0.0)) ++inside;
    }
  }
  return inside * dx * dy;
}

Polygon random_convex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> r(0.3, 1.0);
  std::uniform_real_distribution<double> c(-0.5, 0.5);
  const Point2 centre{c(rng), c(rng)};
  const double radius = r(rng);
  std::vector<double> angles(7);
  for (double& a : angles) a = u(rng);
  std::sort(angles.begin(), angles.end());
  std::vector<Point2> v;
  for (double a : angles) v.push_back(centre + radius * Point2{std::cos(a), std::sin(a)});
  return Polygon::from_vertices(v);
}

}  // namespace

TEST_CASE("shoelace area and perimeter of the tent domain") {
  const Polygon omega = tent_omega();
  CHECK(area(omega) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(perimeter(omega) == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(area(tent_left_triangle()) == doctest::Approx(0.5));
  CHECK(area(Polygon{}) == 0.0);
  CHECK(std::abs(area(omega) - lattice_area(omega, 2000)) < 2e-3);
}

TEST_CASE("from_vertices normalizes orientation and drops redundant vertices") {
  const Polygon cw = Polygon::from_vertices({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(area(cw) == doctest::Approx(1.0));
  CHECK(cross(cw[1] - cw[0], cw[2] - cw[1]) > 0.0);
  const Polygon redundant = Polygon::from_vertices({{0, 0}, {0.5, 0}, {1, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(redundant.size() == 4);
  CHECK(Polygon::from_vertices({{0, 0}, {1, 1}, {2, 2}}).empty());
}

TEST_CASE("from_vertices rejects invalid outlines") {
  CHECK_THROWS_AS(Polygon::from_vertices({{0, 0}, {2, 0}, {1, 0.2}, {2, 1}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Polygon::from_vertices({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Polygon::from_vertices({{0, 0}, {NAN, 0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("clip_convex against hand-computed overlaps") {
  const Polygon a = Polygon::rectangle({0, 0}, {1, 1});
  const Polygon b = Polygon::rectangle({0.5, 0.25}, {2, 2});
  CHECK(area(clip_convex(a, b)) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(clip_convex(a, Polygon::rectangle({1, 0}, {2, 1})).empty());
  CHECK(clip_convex(a, Polygon::rectangle({3, 3}, {4, 4})).empty());
  // Square cut by the diagonal of the tent domain.
  const Polygon cell = Polygon::rectangle({0.0, 0.0}, {0.5, 0.5});
  CHECK(area(clip_convex(cell, tent_left_triangle())) == doctest::Approx(0.125));
}

TEST_CASE("clipping is additive, monotone and idempotent on random polygons") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon p = random_convex(rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Point2 a{u(rng), u(rng)};
    const Point2 b{u(rng), u(rng)};
    if (norm(b - a) < 1e-3) continue;
    const double left = area(clip_halfplane(p, a, b));
    const double right = area(clip_halfplane(p, b, a));
    CHECK(std::abs(left + right - area(p)) <= 1e-12);
    const Polygon q = random_convex(rng);
    const Polygon pq = clip_convex(p, q);
    CHECK(area(pq) <= std::min(area(p), area(q)) + 1e-12);
    CHECK(std::abs(area(clip_convex(pq, q)) - area(pq)) <= 1e-12);
    CHECK(std::abs(area(clip_convex(p, p)) - area(p)) <= 1e-12);
  }
}

TEST_CASE("affine images scale area by |det|") {
  const AffineMap2 phi11{{1, 1, 1, -1}, {}};
  const Polygon img = apply_affine(phi11, tent_left_triangle());
  CHECK(area(img) == doctest::Approx(1.0));
  CHECK(area(clip_convex(img, tent_omega())) == doctest::Approx(1.0));
  CHECK(area(apply_affine(AffineMap2::identity(), tent_left_triangle())) == doctest::Approx(0.5));
  const double t = 0.93;
  CHECK(area(apply_affine(AffineMap2::scaling(t), tent_omega())) == doctest::Approx(t * t).epsilon(1e-14));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon p = random_convex(rng);
    const AffineMap2 f{{u(rng), u(rng), u(rng), u(rng)}, {u(rng), u(rng)}};
    if (std::abs(f.det()) < 1e-3) continue;
    CHECK(std::abs(area(apply_affine(f, p)) - std::abs(f.det()) * area(p)) <= 1e-12 * (1 + std::abs(f.det())));
  }
}

TEST_CASE("affine inverse, composition and operator norm") {
  const AffineMap2 f{{2, 1, -1, 3}, {0.5, -2}};
  const AffineMap2 g = f.inverse();
  const Point2 x{0.3, -0.7};
  const Point2 back = g(f(x));
  CHECK(back.x1 == doctest::Approx(x.x1).epsilon(1e-14));
  CHECK(back.x2 == doctest::Approx(x.x2).epsilon(1e-14));
  const Point2 fx = compose(f, g)(x);
  CHECK(fx.x1 == doctest::Approx(x.x1));
  CHECK_THROWS_AS((AffineMap2{{1, 2, 2, 4}, {}}).inverse(), std::domain_error);

  // Operator norm oracle: maximise |Av| over sampled unit vectors.
  double best = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double a = 2.0 * M_PI * k / 100000;
    const AffineMap2 lin{f.linear, {}};
    best = std::max(best, norm(lin({std::cos(a), std::sin(a)})));
  }
  CHECK(f.operator_norm() == doctest::Approx(best).epsilon(1e-8));
}

TEST_CASE("shared_edge_length") {
  const Polygon a = Polygon::rectangle({0, 0}, {1, 1});
  CHECK(shared_edge_length(a, Polygon::rectangle({1, 0}, {2, 1})) == doctest::Approx(1.0));
  CHECK(shared_edge_length(a, Polygon::rectangle({1, 1}, {2, 2})) == doctest::Approx(0.0));
  CHECK(shared_edge_length(a, Polygon::rectangle({1, 0.5}, {2, 3})) == doctest::Approx(0.5));
  CHECK(shared_edge_length(tent_left_triangle(), tent_right_triangle()) == doctest::Approx(1.0));
  CHECK(shared_edge_length(tent_left_triangle(), tent_omega()) == doctest::Approx(1.0 + std::sqrt(2.0)));
}

TEST_CASE("contains, centroid and project_into") {
  const Polygon omega = tent_omega();
  CHECK(contains(omega, {1.0, 0.5}));
  CHECK(contains(omega, {1.0, 1.0}));
  CHECK_FALSE(contains(omega, {0.2, 0.5}));
  const Point2 c = centroid(omega);
  CHECK(c.x1 == doctest::Approx(1.0));
  CHECK(c.x2 == doctest::Approx(1.0 / 3.0));
  const Point2 p = project_into(omega, {1.0, 2.0});
  CHECK(p.x1 == doctest::Approx(1.0));
  CHECK(p.x2 == doctest::Approx(1.0));
  const Point2 inside{1.0, 0.2};
  CHECK(project_into(omega, inside) == inside);
  CHECK_THROWS_AS(centroid(Polygon{}), std::invalid_argument);
}
