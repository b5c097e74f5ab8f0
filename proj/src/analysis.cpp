#include "ulamtent/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ulamtent/parallel.hpp"

namespace ulamtent {

std::vector<double> equispaced_grid(double t_min, double t_max, int steps) {
  if (steps < 2) throw std::invalid_argument("a sweep grid needs at least 2 steps");
  if (!(t_min < t_max)) throw std::invalid_argument("sweep grid needs t_min < t_max");
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) grid[k] = t_min + (t_max - t_min) * k / (steps - 1);
  grid.back() = t_max;
  return grid;
}

SweepResult sweep(std::span<const double> t_grid, const UlamPartition& part) {
  if (t_grid.empty()) throw std::invalid_argument("empty sweep grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    (void)TentParams{t_grid[k]};
    if (k > 0 && !(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("sweep grid must be strictly increasing");
  }
  SweepResult out;
  out.t_values.assign(t_grid.begin(), t_grid.end());
  out.resolution = part.resolution();
  for (const double t : t_grid) {
    const TentParams params{t};
    const TransferMatrix P = transfer_matrix(params, part);
    StationaryResult sr;
    try {
      sr = stationary_density(P, part);
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError("t = " + std::to_string(t) + ": " + e.what(), e.residual(), e.iterations());
    }
    out.entropies.push_back(entropy(params, sr.density, part));
    out.residuals.push_back(sr.residual);
    out.densities.push_back(std::move(sr.density));
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    for (std::size_t j = i + 1; j < t_grid.size(); ++j) {
      out.pairs.push_back({t_grid[j], t_grid[i], l1_distance(out.densities[j], out.densities[i], part)});
    }
  }
  return out;
}

double l1_distance(const DensityVector& a, const DensityVector& b, const UlamPartition& part) {
  if (a.values.size() != b.values.size() || a.values.size() != part.size()) {
    throw std::invalid_argument("density length mismatch");
  }
  double d = 0.0;
  for (std::size_t j = 0; j < part.size(); ++j) d += std::abs(a.values[j] - b.values[j]) * part.areas()[j];
  return d;
}

HolderFit holder_fit(std::span<const GapDistance> pairs, double min_distance) {
  std::vector<double> xs, ys;
  for (const GapDistance& p : pairs) {
    if (p.gap > 0.0 && p.distance > min_distance) {
      xs.push_back(std::log(p.gap));
      ys.push_back(std::log(p.distance));
    }
  }
  const std::size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("Hölder fit needs at least 3 pairs above the noise floor");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (sxx <= 1e-300) throw std::invalid_argument("Hölder fit needs distinct gaps");

  HolderFit fit;
  fit.eta_hat = sxy / sxx;
  const double intercept = my - fit.eta_hat * mx;
  fit.c_hat = std::exp(intercept);
  double ss_res = 0.0, worst = -INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = ys[k] - (intercept + fit.eta_hat * xs[k]);
    ss_res += r * r;
    worst = std::max(worst, r);
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.pairs_used = static_cast<int>(n);
  fit.min_distance = min_distance;
  fit.slack = std::max(0.0, std::expm1(worst));
  return fit;
}

EntropyEstimate entropy(const PiecewiseAffineMap& map, const DensityVector& rho, const UlamPartition& part) {
  if (rho.values.size() != part.size()) throw std::invalid_argument("density size mismatch");
  EntropyEstimate e;
  for (std::size_t j = 0; j < part.size(); ++j) {
    const auto b = map.branch_of(part.centroids()[j]);
    if (!b) throw std::domain_error("cell centroid outside every branch domain");
    const double jac = map.branches()[*b].jacobian;
    if (!(jac > 0.0)) throw std::domain_error("non-positive Jacobian");
    const double lj = std::log(jac);
    e.lebesgue += lj * part.areas()[j];
    e.measure += lj * rho.values[j] * part.areas()[j];
  }
  return e;
}

EntropyEstimate entropy(TentParams t, const DensityVector& rho, const UlamPartition& part) {
  return entropy(tent_family(t), rho, part);
}

double birkhoff_entropy(const PiecewiseAffineMap& map, int orbits, int length, std::uint64_t seed) {
  if (orbits < 1 || length < 1) throw std::invalid_argument("orbits and length must be >= 1");
  constexpr int kTransient = 100;
  const Polygon& omega = map.omega();
  const BoundingBox box = omega.bounds();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.lo.x1, box.hi.x1);
  std::uniform_real_distribution<double> uy(box.lo.x2, box.hi.x2);

  // Rounding can push an orbit a few ulps past the boundary; snap it back.
  const auto step = [&](Point2 x) {
    const MapEvaluation ev = map.eval(x);
    return std::pair{project_into(omega, ev.image), ev.branch};
  };
  double sum = 0.0;
  for (int o = 0; o < orbits; ++o) {
    Point2 x;
    do {
      x = {ux(rng), uy(rng)};
    } while (!contains(omega, x, 0.0));
    for (int k = 0; k < kTransient; ++k) x = step(x).first;
    double orbit_sum = 0.0;
    for (int k = 0; k < length; ++k) {
      const auto [next, branch] = step(x);
      orbit_sum += std::log(map.branches()[branch].jacobian);
      x = next;
    }
    sum += orbit_sum / length;
  }
  return sum / orbits;
}

double birkhoff_entropy(TentParams t, int orbits, int length, std::uint64_t seed) {
  return birkhoff_entropy(tent_family(t), orbits, length, seed);
}

double image_difference_pullback(TentParams t, TentParams s, std::size_t branch) {
  const TentParams& big = t.t() >= s.t() ? t : s;
  const TentParams& small = t.t() >= s.t() ? s : t;
  const PiecewiseAffineMap map_big = tent_family(big);
  const PiecewiseAffineMap map_small = tent_family(small);
  const Polygon outer = map_big.image(branch);
  const Polygon inner = map_small.image(branch);
  // outer \ inner is not convex; with inner ⊆ outer its area is a difference.
  const double diff = area(outer) - area(clip_convex(outer, inner));
  return diff / map_big.branches()[branch].jacobian;
}

BoundReport verify_bounds(TentParams t, TentParams s) {
  const double gap = std::abs(t.t() - s.t());
  const double tau_v = tau();
  const double omega_area = area(tent_omega());

  double a = 0.0, b = 0.0, c = 0.0;
  const PiecewiseAffineMap map_t = tent_family(t);
  const PiecewiseAffineMap map_s = tent_family(s);
  for (std::size_t i = 0; i < map_t.branches().size(); ++i) {
    a = std::max(a, image_difference_pullback(t, s, i));
    b = std::max(b, comparison_map(map_t, map_s, i).sup_deviation);
    c = std::max(c, jacobian_ratio_deviation(map_t, map_s, i));
  }
  const double jt = 2.0 * t.t() * t.t();
  const double js = 2.0 * s.t() * s.t();
  const double d = std::abs(std::log(js) - std::log(jt)) * std::sqrt(omega_area);
  const double e = std::abs(std::log(jt));

  BoundReport report{t.t(), s.t(), {}};
  const auto add = [&](std::string name, double computed, double bound) {
    report.items.push_back({std::move(name), computed, bound, computed <= bound + 1e-12});
  };
  add("a", a, gap / tau_v);
  add("b", b, std::numbers::sqrt2 / tau_v * gap);
  add("c", c, 2.0 / (tau_v * tau_v) * gap);
  add("d", d, 2.0 / tau_v * omega_area * gap);
  add("e", e, std::numbers::ln2);
  return report;
}

double tnorm_estimate(const TransferMatrix& P_t, const TransferMatrix& P_s, const UlamPartition& part,
                      const TestSuite& suite) {
  if (suite.functions.empty()) throw std::invalid_argument("empty test suite");
  double best = 0.0;
  for (const GridFunction& g : suite.functions) {
    const std::vector<double> ft = apply_transfer(P_t, part, g.values, true);
    const std::vector<double> fs = apply_transfer(P_s, part, g.values, true);
    double diff = 0.0;
    for (std::size_t j = 0; j < part.size(); ++j) diff += std::abs(ft[j] - fs[j]) * part.areas()[j];
    best = std::max(best, diff / bv_norm(g.values, part));
  }
  return best;
}

double tnorm_estimate(TentParams t, TentParams s, const UlamPartition& part, const TestSuite& suite) {
  return tnorm_estimate(transfer_matrix(t, part), transfer_matrix(s, part), part, suite);
}

std::vector<double> spectral_projection(const DensityVector& rho, std::span<const double> f,
                                        const UlamPartition& part) {
  if (f.size() != rho.values.size()) throw std::invalid_argument("size mismatch in spectral_projection");
  const double mass = integral(f, part);
  std::vector<double> out(rho.values.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = rho.values[j] * mass;
  return out;
}

}  // namespace ulamtent
