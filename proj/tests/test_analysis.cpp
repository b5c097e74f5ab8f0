#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "ulamtent/analysis.hpp"

using namespace ulamtent;

namespace {

std::vector<GapDistance> synthetic(double c, double eta) {
  std::vector<GapDistance> out;
  for (double g = 0.01; g < 0.2; g += 0.013) out.push_back({g, c * std::pow(g, eta)});
  return out;
}

DensityVector random_density(const UlamPartition& part, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  DensityVector d{std::vector<double>(part.size())};
  for (double& v : d.values) v = u(rng);
  return d;
}

}  // namespace

TEST_CASE("equispaced grid") {
  const std::vector<double> g = equispaced_grid(tau(), 1.0, 17);
  REQUIRE(g.size() == 17);
  CHECK(g.front() == tau());
  CHECK(g.back() == 1.0);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);
  CHECK_THROWS_AS(equispaced_grid(0.9, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(equispaced_grid(1.0, 0.9, 5), std::invalid_argument);
}

TEST_CASE("sweep fixtures") {
  const UlamPartition part = UlamPartition::build(32);
  SUBCASE("single point t = 1") {
    const std::vector<double> grid{1.0};
    const SweepResult r = sweep(grid, part);
    REQUIRE(r.densities.size() == 1);
    for (double v : r.densities[0].values) CHECK(std::abs(v - 1.0) <= 1e-10);
    CHECK(r.entropies[0].lebesgue == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    CHECK(r.pairs.empty());
    CHECK(r.resolution == 32);
  }
  SUBCASE("endpoints") {
    const std::vector<double> grid{tau(), 1.0};
    const SweepResult r = sweep(grid, part);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].t == 1.0);
    CHECK(r.pairs[0].s == tau());
    CHECK(r.pairs[0].l1_distance > 0.0);
    CHECK(r.entropies[0].lebesgue == doctest::Approx(0.440687).epsilon(1e-6));
    CHECK(r.entropies[0].measure == doctest::Approx(0.5 * std::log(std::sqrt(2.0) + 1.0)).epsilon(1e-12));
    CHECK(r.entropies[1].measure == doctest::Approx(0.693147).epsilon(1e-6));
    for (double res : r.residuals) CHECK(res <= 1e-10);
  }
  SUBCASE("pair count") {
    const UlamPartition coarse = UlamPartition::build(8);
    const std::vector<double> grid = equispaced_grid(tau(), 1.0, 17);
    CHECK(sweep(grid, coarse).pairs.size() == 136);
  }
  SUBCASE("invalid grids") {
    const std::vector<double> decreasing{0.95, 0.9};
    const std::vector<double> outside{0.5, 0.9};
    const std::vector<double> empty;
    CHECK_THROWS_AS(sweep(decreasing, part), std::invalid_argument);
    CHECK_THROWS_AS(sweep(outside, part), std::out_of_range);
    CHECK_THROWS_AS(sweep(empty, part), std::invalid_argument);
  }
}

TEST_CASE("L1 distance is a metric") {
  const UlamPartition part = UlamPartition::build(32);
  DensityVector one{std::vector<double>(part.size(), 1.0)};
  DensityVector split{std::vector<double>(part.size())};
  for (std::size_t i = 0; i < part.size(); ++i) split.values[i] = part.centroids()[i].x1 < 1.0 ? 2.0 : 0.0;
  CHECK(l1_distance(one, one, part) == 0.0);
  CHECK(l1_distance(one, split, part) == doctest::Approx(1.0).epsilon(1e-13));
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const DensityVector a = random_density(part, rng), b = random_density(part, rng), c = random_density(part, rng);
    CHECK(l1_distance(a, c, part) <= l1_distance(a, b, part) + l1_distance(b, c, part) + 1e-14);
    CHECK(l1_distance(a, b, part) == l1_distance(b, a, part));
  }
  CHECK_THROWS_AS(l1_distance(one, DensityVector{{1.0}}, part), std::invalid_argument);
}

TEST_CASE("Hölder fit on synthetic data") {
  const HolderFit a = holder_fit(synthetic(2.0, 0.5), 1e-3);
  CHECK(a.c_hat == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(a.eta_hat == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(a.r_squared == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(a.slack <= 1e-12);
  const HolderFit b = holder_fit(synthetic(3.0, 1.0), 1e-3);
  CHECK(b.c_hat == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(b.eta_hat == doctest::Approx(1.0).epsilon(1e-6));
  const HolderFit flat = holder_fit(synthetic(0.1, 0.0), 1e-3);
  CHECK(std::abs(flat.eta_hat) <= 1e-12);
  CHECK(flat.c_hat == doctest::Approx(0.1).epsilon(1e-12));

  std::vector<GapDistance> scaled = synthetic(2.0, 0.5);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  for (GapDistance& p : scaled) p.distance *= jitter(rng);
  const HolderFit base = holder_fit(scaled, 1e-3);
  for (GapDistance& p : scaled) p.distance *= 7.0;
  const HolderFit times = holder_fit(scaled, 1e-3);
  CHECK(times.c_hat == doctest::Approx(7.0 * base.c_hat).epsilon(1e-10));
  CHECK(std::abs(times.eta_hat - base.eta_hat) <= 1e-10);
  CHECK(base.slack > 0.0);
}

TEST_CASE("Hölder fit noise floor and errors") {
  std::vector<GapDistance> pairs = synthetic(2.0, 0.5);
  pairs.push_back({0.5, 1e-6});
  const HolderFit fit = holder_fit(pairs, 1e-3);
  CHECK(fit.pairs_used == static_cast<int>(pairs.size()) - 1);
  CHECK(fit.min_distance == 1e-3);
  CHECK_THROWS_AS(holder_fit(std::vector<GapDistance>{{0.1, 1}, {0.2, 2}}, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(holder_fit(std::vector<GapDistance>{{0.1, 1}, {0.1, 2}, {0.1, 3}}, 1e-3),
                  std::invalid_argument);
  CHECK_THROWS_AS(holder_fit(pairs, 100.0), std::invalid_argument);
}

TEST_CASE("entropy estimators") {
  const UlamPartition part = UlamPartition::build(16);
  for (double t : {tau(), 0.9, 0.97, 1.0}) {
    const TransferMatrix P = transfer_matrix(TentParams{t}, part);
    const DensityVector rho = stationary_density(P, part).density;
    const EntropyEstimate e = entropy(TentParams{t}, rho, part);
    CHECK(std::abs(e.lebesgue - std::log(2 * t * t)) <= 1e-12);
    CHECK(std::abs(e.measure - std::log(2 * t * t)) <= 1e-12);
    CHECK(std::abs(birkhoff_entropy(TentParams{t}, 4, 200, 42) - std::log(2 * t * t)) <= 1e-12);
  }
  CHECK(birkhoff_entropy(TentParams{1.0}, 1, 1, 0) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(birkhoff_entropy(TentParams{0.9}, 3, 50, 5) == doctest::Approx(0.482426).epsilon(1e-6));
  CHECK_THROWS_AS(birkhoff_entropy(TentParams{0.9}, 0, 50, 5), std::invalid_argument);
}

TEST_CASE("entropy of a map with non-constant Jacobian") {
  // Two branches with Jacobians 4 (left quarter) and 4/3 (the rest): the two
  // estimators differ and the Birkhoff average tracks the invariant measure.
  const Polygon omega = Polygon::rectangle({0, 0}, {1, 1});
  const PiecewiseAffineMap map(omega, {{Polygon::rectangle({0, 0}, {0.25, 1}), AffineMap2{{4, 0, 0, 1}, {}}},
                                       {Polygon::rectangle({0.25, 0}, {1, 1}),
                                        AffineMap2{{4.0 / 3.0, 0, 0, 1}, {-1.0 / 3.0, 0}}}});
  const UlamPartition part = UlamPartition::build(8, omega);
  const DensityVector rho = stationary_density(transfer_matrix(map, part), part).density;
  const EntropyEstimate e = entropy(map, rho, part);
  const double expected = 0.25 * std::log(4.0) + 0.75 * std::log(4.0 / 3.0);
  CHECK(e.lebesgue == doctest::Approx(expected).epsilon(1e-12));
  // Lebesgue is invariant for this full-branch map, so both coincide.
  CHECK(e.measure == doctest::Approx(expected).epsilon(1e-9));
  CHECK(birkhoff_entropy(map, 16, 2000, 1) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("closed-form bound report") {
  const BoundReport r = verify_bounds(TentParams{1.0}, TentParams{0.95});
  REQUIRE(r.items.size() == 5);
  const auto item = [&](const char* n) {
    for (const BoundItem& it : r.items) {
      if (it.name == n) return it;
    }
    FAIL("missing item");
    return BoundItem{};
  };
  CHECK(item("a").computed == doctest::Approx(0.04875).epsilon(1e-12));
  CHECK(item("a").paper_bound == doctest::Approx(0.0567272).epsilon(1e-6));
  CHECK(item("b").computed == doctest::Approx(std::sqrt(2.0) * 0.05).epsilon(1e-12));
  CHECK(item("b").paper_bound == doctest::Approx(0.080224).epsilon(1e-5));
  CHECK(item("c").computed == doctest::Approx(1.0 - 0.9025).epsilon(1e-12));
  CHECK(item("d").computed == doctest::Approx(std::abs(std::log(2 * 0.9025) - std::log(2.0))).epsilon(1e-12));
  CHECK(item("e").computed == doctest::Approx(std::numbers::ln2).epsilon(1e-14));
  for (const BoundItem& it : r.items) CHECK(it.satisfied);

  const BoundReport same = verify_bounds(TentParams{0.92}, TentParams{0.92});
  for (const BoundItem& it : same.items) {
    if (it.name != "e") CHECK(std::abs(it.computed) <= 1e-15);
  }
  const BoundReport low = verify_bounds(TentParams{tau()}, TentParams{tau()});
  CHECK(low.items[4].computed == doctest::Approx(0.440687).epsilon(1e-6));
}

TEST_CASE("item (a) geometry matches the closed form in both orders") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(tau(), 1.0);
  for (int k = 0; k < 50; ++k) {
    const double t = u(rng), s = u(rng);
    const double big = std::max(t, s), small = std::min(t, s);
    const double closed = (big * big - small * small) / (2 * big * big);
    for (std::size_t b = 0; b < 2; ++b) {
      CHECK(std::abs(image_difference_pullback(TentParams{t}, TentParams{s}, b) - closed) <= 1e-10);
    }
  }
}

TEST_CASE("operator gap estimate") {
  const UlamPartition part = UlamPartition::build(32);
  const TestSuite suite = make_test_suite(part, 42);
  CHECK(tnorm_estimate(TentParams{0.93}, TentParams{0.93}, part, suite) == 0.0);
  const TestSuite constant{0, {{"one", std::vector<double>(part.size(), 1.0)}}};
  CHECK(tnorm_estimate(TentParams{1.0}, TentParams{0.95}, part, constant) > 0.0);
  const double g1 = tnorm_estimate(TentParams{1.0}, TentParams{0.96}, part, suite);
  const double g2 = tnorm_estimate(TentParams{1.0}, TentParams{0.92}, part, suite);
  CHECK(g2 > g1);
  CHECK_THROWS_AS(tnorm_estimate(TentParams{1.0}, TentParams{0.95}, part, TestSuite{}), std::invalid_argument);
}

TEST_CASE("spectral projection") {
  const UlamPartition part = UlamPartition::build(32);
  const DensityVector rho_t = stationary_density(transfer_matrix(TentParams{0.9}, part), part).density;
  const DensityVector rho_s = stationary_density(transfer_matrix(TentParams{0.97}, part), part).density;
  const std::vector<double> fixed = spectral_projection(rho_t, rho_t.values, part);
  for (std::size_t j = 0; j < part.size(); ++j) CHECK(std::abs(fixed[j] - rho_t.values[j]) <= 1e-12);
  const std::vector<double> zero = spectral_projection(rho_t, std::vector<double>(part.size(), 0.0), part);
  for (double v : zero) CHECK(v == 0.0);

  std::mt19937_64 rng(6);
  const DensityVector f = random_density(part, rng);
  const std::vector<double> once = spectral_projection(rho_t, f.values, part);
  const std::vector<double> twice = spectral_projection(rho_t, once, part);
  for (std::size_t j = 0; j < part.size(); ++j) CHECK(std::abs(once[j] - twice[j]) <= 1e-12);

  const DensityVector a{spectral_projection(rho_s, rho_s.values, part)};
  const DensityVector b{spectral_projection(rho_t, rho_s.values, part)};
  CHECK(std::abs(l1_distance(rho_s, rho_t, part) - l1_distance(a, b, part)) <= 1e-12);
}
