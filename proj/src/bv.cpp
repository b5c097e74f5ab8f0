#include "ulamtent/bv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ulamtent {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

GridFunction polygon_indicator(const UlamPartition& part, std::mt19937_64& rng) {
  const BoundingBox box = part.omega().bounds();
  std::uniform_real_distribution<double> ux(box.lo.x1, box.hi.x1);
  std::uniform_real_distribution<double> uy(box.lo.x2, box.hi.x2);
  std::uniform_real_distribution<double> radius(0.05, 0.3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> corners(3, 7);
  while (true) {
    Point2 c{ux(rng), uy(rng)};
    if (!contains(part.omega(), c)) continue;
    const double r = radius(rng);
    std::vector<double> angles(static_cast<std::size_t>(corners(rng)));
    for (double& a : angles) a = angle(rng);
    std::sort(angles.begin(), angles.end());
    std::vector<Point2> verts;
    for (const double a : angles) verts.push_back(c + r * Point2{std::cos(a), std::sin(a)});
    const Polygon shape = make_convex_unchecked(std::move(verts));
    if (shape.empty()) continue;
    GridFunction g{"indicator of convex polygon (" + std::to_string(shape.size()) + " vertices, center " +
                       fmt_double(c.x1) + "," + fmt_double(c.x2) + ")",
                   std::vector<double>(part.size(), 0.0)};
    bool any = false;
    for (std::size_t i = 0; i < part.size(); ++i) {
      if (contains(shape, part.centroids()[i], 0.0)) {
        g.values[i] = 1.0;
        any = true;
      }
    }
    if (any) return g;
  }
}

GridFunction trig_polynomial(const UlamPartition& part, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> freq(-4, 4);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  struct Term {
    int p, q;
    double a, phi;
  };
  std::array<Term, 3> terms{};
  for (Term& term : terms) term = {freq(rng), freq(rng), amp(rng), phase(rng)};
  GridFunction g{"trigonometric polynomial, 3 terms", std::vector<double>(part.size())};
  for (std::size_t i = 0; i < part.size(); ++i) {
    const Point2 x = part.centroids()[i];
    double v = 0.0;
    for (const Term& term : terms) {
      v += term.a * std::cos(2.0 * std::numbers::pi * (term.p * x.x1 + term.q * x.x2) + term.phi);
    }
    g.values[i] = v;
  }
  return g;
}

GridFunction block_field(const UlamPartition& part, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> blocks(2, 12);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  const int bx = blocks(rng);
  const int by = std::max(1, bx / 2);
  std::vector<double> table(static_cast<std::size_t>(bx) * by);
  for (double& v : table) v = value(rng);
  const BoundingBox box = part.omega().bounds();
  GridFunction g{"random block field " + std::to_string(bx) + "x" + std::to_string(by),
                 std::vector<double>(part.size())};
  for (std::size_t i = 0; i < part.size(); ++i) {
    const Point2 x = part.centroids()[i];
    const int ix = std::clamp(static_cast<int>((x.x1 - box.lo.x1) / (box.hi.x1 - box.lo.x1) * bx), 0, bx - 1);
    const int iy = std::clamp(static_cast<int>((x.x2 - box.lo.x2) / (box.hi.x2 - box.lo.x2) * by), 0, by - 1);
    g.values[i] = table[static_cast<std::size_t>(iy) * bx + ix];
  }
  return g;
}

}  // namespace

TestSuite make_test_suite(const UlamPartition& part, std::uint64_t seed, int count) {
  if (count < 1) throw std::invalid_argument("test suite needs at least one function");
  TestSuite suite;
  suite.seed = seed;
  std::mt19937_64 rng(seed);
  while (static_cast<int>(suite.functions.size()) < count) {
    GridFunction g;
    switch (suite.functions.size() % 3) {
      case 0: g = polygon_indicator(part, rng); break;
      case 1: g = trig_polynomial(part, rng); break;
      default: g = block_field(part, rng); break;
    }
    if (discrete_variation(g.values, part) > 0.0) suite.functions.push_back(std::move(g));
  }
  return suite;
}

double discrete_variation(std::span<const double> f, const UlamPartition& part) {
  if (f.size() != part.size()) throw std::invalid_argument("grid function size mismatch");
  double v = 0.0;
  for (const CellAdjacency& e : part.adjacency()) v += std::abs(f[e.a] - f[e.b]) * e.length;
  for (std::size_t i = 0; i < f.size(); ++i) v += std::abs(f[i]) * part.boundary_lengths()[i];
  return v;
}

double bv_norm(std::span<const double> f, const UlamPartition& part) {
  return l1_norm(f, part) + discrete_variation(f, part);
}

LemmaAvResult lemma_av_ratio(std::span<const double> f, const ComparisonMap& psi,
                             const UlamPartition& part) {
  LemmaAvResult r;
  r.sup_deviation = psi.sup_deviation;
  r.variation = discrete_variation(f, part);
  for (std::size_t i = 0; i < part.size(); ++i) {
    const Point2 c = part.centroids()[i];
    if (!contains(psi.k_set, c)) continue;
    const std::size_t j = part.locate_nearest(psi.psi(c));
    r.numerator += std::abs(f[j] - f[i]) * part.areas()[i];
  }
  const double denom = r.sup_deviation * r.variation;
  if (denom == 0.0) {
    r.degenerate = true;
    r.ratio = 0.0;
  } else {
    r.ratio = r.numerator / denom;
  }
  return r;
}

double sobolev_ratio(std::span<const double> f, const UlamPartition& part) {
  const double v = discrete_variation(f, part);
  if (v == 0.0) throw std::invalid_argument("Sobolev ratio of a function with zero variation");
  double sq = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sq += f[i] * f[i] * part.areas()[i];
  return std::sqrt(sq) / v;
}

LYReport fit_lasota_yorke(std::vector<LYSample> samples, int ell) {
  if (samples.empty()) throw std::invalid_argument("Lasota-Yorke fit needs samples");

  // Constraints a*theta + b*M >= c: one per sample plus theta >= 0, M >= 0.
  struct Constraint {
    double a, b, c;
  };
  std::vector<Constraint> cons;
  for (const LYSample& s : samples) cons.push_back({s.v_f, s.l1_f, s.v_lf});
  cons.push_back({1.0, 0.0, 0.0});
  cons.push_back({0.0, 1.0, 0.0});

  // Residual k is (theta u_k + M w_k - z_k) after dividing by ||f_k||_BV.
  std::vector<std::array<double, 3>> rows;
  for (const LYSample& s : samples) {
    const double n = s.v_f + s.l1_f;
    rows.push_back({s.v_f / n, s.l1_f / n, s.v_lf / n});
  }
  const auto objective = [&](double th, double m) {
    double sum = 0.0;
    for (const auto& r : rows) {
      const double e = th * r[0] + m * r[1] - r[2];
      sum += e * e;
    }
    return sum;
  };
  const auto feasible = [&](double th, double m) {
    for (const Constraint& k : cons) {
      const double scale = std::abs(k.a * th) + std::abs(k.b * m) + std::abs(k.c);
      if (k.a * th + k.b * m < k.c - 1e-12 * std::max(1.0, scale)) return false;
    }
    return true;
  };

  double best_theta = 0.0, best_m = 0.0, best_obj = INFINITY;
  bool found = false;
  const auto consider = [&](double th, double m) {
    if (!std::isfinite(th) || !std::isfinite(m) || !feasible(th, m)) return;
    th = std::max(th, 0.0);
    m = std::max(m, 0.0);
    const double obj = objective(th, m);
    const double tie = 1e-12 * std::max(1.0, std::abs(best_obj));
    if (!found || obj < best_obj - tie || (std::abs(obj - best_obj) <= tie && th < best_theta)) {
      best_theta = th;
      best_m = m;
      best_obj = obj;
      found = true;
    }
  };

  // Convex QP in two unknowns: the optimum is the equality-constrained
  // minimizer of some active set (none, one constraint, or two).
  double s00 = 0, s01 = 0, s11 = 0, r0 = 0, r1 = 0;
  for (const auto& r : rows) {
    s00 += r[0] * r[0];
    s01 += r[0] * r[1];
    s11 += r[1] * r[1];
    r0 += r[0] * r[2];
    r1 += r[1] * r[2];
  }
  const double det = s00 * s11 - s01 * s01;
  if (std::abs(det) > 1e-14 * std::max(1.0, s00 * s11)) {
    consider((r0 * s11 - r1 * s01) / det, (s00 * r1 - s01 * r0) / det);
  }
  for (const Constraint& k : cons) {
    const double nn = k.a * k.a + k.b * k.b;
    const double p0 = k.c * k.a / nn, p1 = k.c * k.b / nn;
    const double d0 = -k.b, d1 = k.a;
    double num = 0.0, den = 0.0;
    for (const auto& r : rows) {
      const double ud = r[0] * d0 + r[1] * d1;
      num += (r[0] * p0 + r[1] * p1 - r[2]) * ud;
      den += ud * ud;
    }
    const double lambda = den > 0.0 ? -num / den : 0.0;
    consider(p0 + lambda * d0, p1 + lambda * d1);
  }
  for (std::size_t i = 0; i < cons.size(); ++i) {
    for (std::size_t j = i + 1; j < cons.size(); ++j) {
      const Constraint& p = cons[i];
      const Constraint& q = cons[j];
      const double d = p.a * q.b - p.b * q.a;
      if (std::abs(d) <= 1e-14 * (std::abs(p.a * q.b) + std::abs(p.b * q.a))) continue;
      consider((p.c * q.b - p.b * q.c) / d, (p.a * q.c - p.c * q.a) / d);
    }
  }
  if (!found) throw std::runtime_error("Lasota-Yorke fit found no feasible point");

  LYReport report;
  report.theta_hat = best_theta;
  report.m_hat = best_m;
  report.ell = ell;
  report.samples = std::move(samples);
  return report;
}

LYReport ly_check(const TransferMatrix& P, const UlamPartition& part, const TestSuite& suite, int ell) {
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  if (suite.functions.empty()) throw std::invalid_argument("empty test suite");
  std::vector<LYSample> samples;
  samples.reserve(suite.functions.size());
  for (const GridFunction& g : suite.functions) {
    std::vector<double> f = g.values;
    for (int k = 0; k < ell; ++k) f = apply_transfer(P, part, f, true);
    samples.push_back({discrete_variation(g.values, part), l1_norm(g.values, part), discrete_variation(f, part)});
  }
  LYReport report = fit_lasota_yorke(std::move(samples), ell);
  report.t = P.t_param();
  return report;
}

LYReport ly_check(TentParams t, const UlamPartition& part, const TestSuite& suite, int ell) {
  return ly_check(transfer_matrix(t, part), part, suite, ell);
}

}  // namespace ulamtent
